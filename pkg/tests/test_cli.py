import csv

import numpy as np
import pytest

from paircov.cli import main


def run(argv, capsys):
    code = main(argv)
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def kv(out: str) -> dict:
    return dict(line.split("=", 1) for line in out.strip().splitlines() if "=" in line)


def test_version(capsys):
    code, out, _ = run(["version"], capsys)
    assert code == 0
    assert out.strip()


def test_simulate_grid_one(tmp_path, capsys):
    out_file = tmp_path / "path.csv"
    code, _, _ = run(
        ["simulate", "--grid", "1", "--theta", "15", "--sigma2", "1",
         "--seed", "7", "--out", str(out_file)], capsys
    )
    assert code == 0
    with open(out_file) as f:
        rows = list(csv.DictReader(f))
    assert len(rows) == 51
    s = [float(r["s"]) for r in rows]
    np.testing.assert_allclose(s, np.linspace(0, 1, 51), atol=1e-12)


def test_simulate_deterministic(tmp_path, capsys):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    args = ["simulate", "--n", "20", "--theta", "5", "--sigma2", "2", "--seed", "3"]
    assert run(args + ["--out", str(a)], capsys)[0] == 0
    assert run(args + ["--out", str(b)], capsys)[0] == 0
    assert a.read_bytes() == b.read_bytes()


def test_simulate_missing_flag_exits_2(tmp_path, capsys):
    code, _, _ = run(
        ["simulate", "--n", "5", "--sigma2", "1", "--out", str(tmp_path / "x.csv")],
        capsys,
    )
    assert code == 2


def test_estimate_singleton_box(tmp_path, capsys):
    f = tmp_path / "p.csv"
    run(["simulate", "--n", "30", "--theta", "15", "--sigma2", "1",
         "--seed", "1", "--out", str(f)], capsys)
    code, out, _ = run(
        ["estimate", "--in", str(f), "--method", "wpmle", "--K", "1",
         "--box", "7,7,1.3,1.3"], capsys
    )
    assert code == 0
    values = kv(out)
    assert float(values["theta_hat"]) == pytest.approx(7.0)
    assert float(values["sigma2_hat"]) == pytest.approx(1.3)
    assert float(values["microergodic"]) == pytest.approx(9.1)


def test_estimate_wpmle_vs_mle_close(tmp_path, capsys):
    f = tmp_path / "p.csv"
    run(["simulate", "--grid", "16", "--theta", "15", "--sigma2", "1",
         "--seed", "2", "--out", str(f)], capsys)
    _, out_wp, _ = run(["estimate", "--in", str(f), "--method", "wpmle", "--K", "1"], capsys)
    _, out_ml, _ = run(["estimate", "--in", str(f), "--method", "mle"], capsys)
    wp = float(kv(out_wp)["microergodic"])
    ml = float(kv(out_ml)["microergodic"])
    assert wp == pytest.approx(ml, rel=0.02)


def test_estimate_bad_box_exits_2(tmp_path, capsys):
    f = tmp_path / "p.csv"
    run(["simulate", "--n", "10", "--theta", "2", "--sigma2", "1",
         "--seed", "1", "--out", str(f)], capsys)
    code, _, err = run(["estimate", "--in", str(f), "--method", "mle",
                        "--box", "1,2,3"], capsys)
    assert code == 2
    assert err.strip()


def test_tau_values(capsys):
    code, out, _ = run(["tau", "--grid", "1", "--K", "1"], capsys)
    assert code == 0
    assert float(kv(out)["tau2"]) == pytest.approx(2 * 50 / 51, abs=1e-6)
    code, out, _ = run(
        ["tau", "--grid", "1", "--K", "1", "--asym-var",
         "--theta0", "15", "--sigma20", "1"], capsys
    )
    assert code == 0
    assert float(kv(out)["asym_var"]) == pytest.approx(8.6505, abs=1e-3)


def test_tau_exact_requires_theta0(capsys):
    code, _, _ = run(["tau", "--grid", "1", "--K", "1", "--exact"], capsys)
    assert code == 2


def test_experiment_table2_single_rep(tmp_path, capsys):
    out_file = tmp_path / "t2.csv"
    code, out, _ = run(
        ["experiment", "--scenario", "table2", "--reps", "1", "--seed", "42",
         "--n-list", "51", "--out", str(out_file)], capsys
    )
    assert code == 0
    with open(out_file) as f:
        rows = list(csv.DictReader(f))
    wp = next(r for r in rows if r["estimator"] == "WPMLE" and r["K"] == "1")
    assert float(wp["asym_var"]) == pytest.approx(8.6505, abs=1e-3)
    assert out.strip()  # one-line summaries printed


def test_experiment_deterministic_files(tmp_path, capsys):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    args = ["experiment", "--scenario", "table1", "--reps", "25", "--seed", "42",
            "--n-list", "51"]
    assert run(args + ["--out", str(a)], capsys)[0] == 0
    assert run(args + ["--out", str(b)], capsys)[0] == 0
    assert a.read_bytes() == b.read_bytes()


def test_experiment_case_iii_dichotomy(tmp_path, capsys):
    out_file = tmp_path / "c3.csv"
    code, _, _ = run(
        ["experiment", "--scenario", "case-iii", "--reps", "60", "--seed", "42",
         "--n-list", "51,801", "--K", "2", "--out", str(out_file)], capsys
    )
    assert code == 0
    with open(out_file) as f:
        rows = list(csv.DictReader(f))
    assert {r["estimator"] for r in rows} >= {"WPMLE", "WPCMLE"}
