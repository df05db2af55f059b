"""Command-line frontend: simulation, estimation, tau^2, and experiments.

Exit codes: 0 success, 2 usage error, 3 computation failure.  All randomness
flows from --seed; repeated identical invocations produce byte-identical
output files.
"""

from __future__ import annotations

import argparse
import csv
import math
import sys
from importlib.metadata import PackageNotFoundError, version as pkg_version

import numpy as np

from .asymptotics import tau2_approx, tau2_exact
from .estimate import mle, wpcmle, wpmle
from .harness import ExperimentConfig, rows_to_csv, run_scenario
from .simulate import replication_stream, simulate_ou
from .types import CovParams, Design, ParamBox, SamplePath, WeightSeq, grid_design


class UsageError(ValueError):
    pass


def _parse_box(text: str) -> ParamBox:
    """Box "a,b,c,d"; an upper bound of "inf" makes that side the ray (0, inf)."""
    parts = [p.strip() for p in text.split(",")]
    if len(parts) != 4:
        raise UsageError('--box expects four comma-separated values "a,b,c,d"')

    def side(lo_s: str, hi_s: str):
        if hi_s.lower() == "inf":
            return None
        return (float(lo_s), float(hi_s))

    return ParamBox(side(parts[0], parts[1]), side(parts[2], parts[3]))


def _parse_weights(args) -> WeightSeq:
    if args.weights is not None:
        return WeightSeq([float(x) for x in args.weights.split(",")])
    return WeightSeq.unit(args.K)


def _load_design(args) -> Design:
    if getattr(args, "grid", None) is not None:
        return grid_design(args.grid)
    if getattr(args, "n", None) is not None:
        return Design(np.linspace(0.0, 1.0, args.n))
    raise UsageError("one of --n or --grid is required")


def _read_path_csv(filename: str) -> SamplePath:
    s, z = [], []
    with open(filename, newline="") as f:
        reader = csv.DictReader(f)
        if reader.fieldnames is None or not {"s", "z"} <= set(reader.fieldnames):
            raise UsageError(f"{filename}: expected a CSV with header columns s,z")
        for row in reader:
            s.append(float(row["s"]))
            z.append(float(row["z"]))
    return SamplePath(Design(s), z)


def cmd_simulate(args) -> int:
    design = _load_design(args)
    rng = replication_stream(args.seed, 0)
    path = simulate_ou(CovParams(args.theta, args.sigma2), design, rng)
    with open(args.out, "w", newline="\n") as f:
        f.write("s,z\n")
        for s, z in zip(design.points, path.values):
            f.write(f"{s:.10g},{z:.17g}\n")
    return 0


def cmd_estimate(args) -> int:
    path = _read_path_csv(getattr(args, "in"))
    box = _parse_box(args.box)
    try:
        if args.method == "mle":
            result = mle(path, box)
        elif args.method == "wpmle":
            result = wpmle(path, _parse_weights(args), box)
        else:
            result = wpcmle(path, _parse_weights(args), box)
    except Exception as exc:
        print(f"estimation failed: {exc}", file=sys.stderr)
        return 3
    print(f"theta_hat={result.psi_hat.theta:.10g}")
    print(f"sigma2_hat={result.psi_hat.sigma2:.10g}")
    print(f"microergodic={result.microergodic:.10g}")
    print(f"objective={result.objective_value:.10g}")
    print(f"converged={str(result.converged).lower()}")
    return 0


def cmd_tau(args) -> int:
    if getattr(args, "in") is not None:
        design = _read_path_csv(getattr(args, "in")).design
    else:
        design = _load_design(args)
    w = _parse_weights(args)
    if args.exact:
        if args.theta0 is None:
            raise UsageError("--exact requires --theta0")
        tau = tau2_exact(design, w, args.theta0)
    else:
        tau = tau2_approx(design, w)
    print(f"tau2={tau.tau2:.6f}")
    if args.asym_var:
        if args.theta0 is None or args.sigma20 is None:
            raise UsageError("--asym-var requires --theta0 and --sigma20")
        mu = args.theta0 * args.sigma20
        av = mu * mu * tau.tau2 / (design.n * w.total**2)
        print(f"asym_var={av:.4f}")
    return 0


def cmd_experiment(args) -> int:
    scenario = {
        "table1": "table1",
        "table2": "table2",
        "case-i": "inconsistency_case_i",
        "case-iii": "inconsistency_case_iii",
        "case-iv": "inconsistency_case_iv",
        "appendix-b": "appendix_b",
    }[args.scenario]
    kwargs = dict(
        scenario=scenario,
        n_list=tuple(int(x) for x in args.n_list.split(",")),
        replications=args.reps,
        base_seed=args.seed,
        psi0=CovParams(args.theta0, args.sigma20),
        threads=args.threads,
    )
    if args.weights is not None or args.K != 1:
        kwargs["weights"] = _parse_weights(args)
    if args.box is not None:
        kwargs["box"] = _parse_box(args.box)
    config = ExperimentConfig(**kwargs)
    try:
        rows = run_scenario(config)
    except Exception as exc:
        print(f"experiment failed: {exc}", file=sys.stderr)
        return 3
    if any(row.failures > 0 for row in rows):
        print("experiment had failed replications", file=sys.stderr)
        return 3
    text = rows_to_csv(rows)
    with open(args.out, "w", newline="\n") as f:
        f.write(text)
    for row in rows:
        summary = f"{row.estimator} n={row.n}"
        if row.K is not None:
            summary += f" K={row.K}"
        if row.variance is not None:
            summary += f" mean={row.mean:.4f} var={row.variance:.4f}"
        if row.asym_var is not None:
            summary += f" asym_var={row.asym_var:.4f}"
        if row.sample_var is not None:
            summary += f" sample_var={row.sample_var:.4f}"
        print(summary)
    return 0


def cmd_version(args) -> int:
    try:
        print(pkg_version("paircov"))
    except PackageNotFoundError:
        print("unknown")
    return 0


def _add_weight_flags(p):
    p.add_argument("--weights", help='comma-separated lag weights, e.g. "1,0.5"')
    p.add_argument("--K", type=int, default=1, help="unit weights up to lag K")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="paircov",
        description="Pairwise-likelihood covariance estimation for a 1-d "
        "Gaussian process with exponential covariance.",
    )
    sub = parser.add_subparsers(dest="subcommand", required=True)

    p = sub.add_parser("simulate", help="simulate a process path to CSV")
    p.add_argument("--n", type=int, help="number of equispaced points on [0,1]")
    p.add_argument("--grid", type=int, help="grid level L: spacing 0.02/L, n = 50L+1")
    p.add_argument("--theta", type=float, required=True)
    p.add_argument("--sigma2", type=float, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.set_defaults(fn=cmd_simulate)

    p = sub.add_parser("estimate", help="estimate covariance parameters from a path CSV")
    p.add_argument("--in", required=True, help="input CSV with columns s,z")
    p.add_argument("--method", choices=("mle", "wpmle", "wpcmle"), required=True)
    _add_weight_flags(p)
    p.add_argument(
        "--box",
        default="0.01,2500,0.01,5",
        help='bounds "a,b,c,d" for theta and sigma2; upper bound "inf" = open ray',
    )
    p.set_defaults(fn=cmd_estimate)

    p = sub.add_parser("tau", help="compute tau^2 (and optionally the asymptotic variance)")
    p.add_argument("--in", help="design from a path CSV")
    p.add_argument("--grid", type=int, help="equispaced grid level L")
    p.add_argument("--n", type=int, help="number of equispaced points")
    _add_weight_flags(p)
    p.add_argument("--exact", action="store_true", help="exact tau^2 (needs --theta0)")
    p.add_argument("--asym-var", action="store_true", dest="asym_var")
    p.add_argument("--theta0", type=float)
    p.add_argument("--sigma20", type=float)
    p.set_defaults(fn=cmd_tau)

    p = sub.add_parser("experiment", help="run a Monte Carlo scenario, write CSV report")
    p.add_argument(
        "--scenario",
        choices=("table1", "table2", "case-i", "case-iii", "case-iv", "appendix-b"),
        required=True,
    )
    p.add_argument("--reps", type=int, default=1000)
    p.add_argument("--seed", type=int, default=42)
    p.add_argument("--out", required=True)
    p.add_argument("--threads", type=int, default=1)
    p.add_argument("--n-list", default="51,101,201,401,801", dest="n_list")
    p.add_argument("--theta0", type=float, default=15.0)
    p.add_argument("--sigma20", type=float, default=1.0)
    p.add_argument("--box", help="override the parameter box")
    _add_weight_flags(p)
    p.set_defaults(fn=cmd_experiment)

    p = sub.add_parser("version", help="print the package version")
    p.set_defaults(fn=cmd_version)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.fn(args)
    except (UsageError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
