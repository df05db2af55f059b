#!/usr/bin/env python3
"""Reproduce the Monte Carlo summary tables and consistency demos.

Writes one CSV per scenario into --outdir and prints progress.  With the
defaults this is the full study (1000 replications); pass --reps for a quick
look.
"""

import argparse
import pathlib
import sys
import time

from paircov import ExperimentConfig, WeightSeq, rows_to_csv
from paircov.harness import run_scenario


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--outdir", default="results")
    parser.add_argument("--reps", type=int, default=1000)
    parser.add_argument("--seed", type=int, default=42)
    parser.add_argument("--threads", type=int, default=1)
    args = parser.parse_args()

    outdir = pathlib.Path(args.outdir)
    outdir.mkdir(parents=True, exist_ok=True)

    jobs = [
        ("table1", dict(n_list=(51, 101, 201, 401, 801))),
        ("table2", dict(n_list=(51, 101, 201, 401, 801))),
        ("inconsistency_case_i", dict(n_list=(51, 201, 801), weights=WeightSeq.unit(2))),
        ("inconsistency_case_iii", dict(n_list=(51, 201, 801), weights=WeightSeq.unit(2))),
        ("inconsistency_case_iv", dict(n_list=(51, 201, 801), weights=WeightSeq.unit(2))),
        ("appendix_b", dict(n_list=(50, 100, 200, 400, 800))),
    ]
    for scenario, overrides in jobs:
        t0 = time.time()
        config = ExperimentConfig(
            scenario=scenario,
            replications=args.reps,
            base_seed=args.seed,
            threads=args.threads,
            **overrides,
        )
        rows = run_scenario(config)
        path = outdir / f"{scenario}.csv"
        path.write_text(rows_to_csv(rows))
        print(f"{scenario}: {len(rows)} rows -> {path} ({time.time() - t0:.1f}s)")
    return 0


if __name__ == "__main__":
    sys.exit(main())
