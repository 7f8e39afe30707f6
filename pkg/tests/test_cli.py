import csv
import io
import math
import subprocess
import sys

import numpy as np
import pytest

from snbs import cli, confidence_interval
from snbs.generators import generate, model_config
from snbs.harness import ExperimentConfig, run_cell


def run(argv, capsys):
    code = cli.main([str(a) for a in argv])
    out, err = capsys.readouterr()
    return code, out, err


def rows(text):
    return list(csv.DictReader(io.StringIO(text)))


def write(tmp_path, name, text):
    p = tmp_path / name
    p.write_bytes(text.encode())
    return p


def test_ci_example(tmp_path, capsys):
    p = write(tmp_path, "x.csv", "1\n2\n3\n")
    code, out, _ = run(["ci", p, "--b", 2, "--level", 0.5, "--side", "lower"], capsys)
    assert code == 0
    (row,) = rows(out)
    assert float(row["hi"]) == pytest.approx(2.7698004, abs=1e-7)
    assert row["lo"] == "-inf" and row["n"] == "3" and row["b"] == "2"


def test_ci_accepts_crlf(tmp_path, capsys):
    p = write(tmp_path, "x.csv", "1\r\n2\r\n3\r\n")
    code, out, _ = run(["ci", p, "--b", 2, "--level", 0.5], capsys)
    assert code == 0 and float(rows(out)[0]["hi"]) == pytest.approx(2.7698004, abs=1e-7)


def test_ci_degenerate(tmp_path, capsys):
    p = write(tmp_path, "k.csv", "4\n4\n4\n4\n4\n")
    code, _, err = run(["ci", p, "--b", 2], capsys)
    assert code == cli.EXIT_DEGENERATE and "degenerate" in err


def test_ci_parse_error_reports_line(tmp_path, capsys):
    p = write(tmp_path, "bad.csv", "1.0\n2.5\nabc\n4\n")
    code, _, err = run(["ci", p, "--b", 2], capsys)
    assert code == cli.EXIT_INPUT and "bad.csv:3" in err


def test_ci_rejects_bad_block(tmp_path, capsys):
    p = write(tmp_path, "x.csv", "1\n2\n3\n4\n")
    assert run(["ci", p, "--b", 4], capsys)[0] == cli.EXIT_INPUT
    assert run(["ci", tmp_path / "missing.csv"], capsys)[0] == cli.EXIT_INPUT


def test_unknown_flag_is_rejected(capsys):
    with pytest.raises(SystemExit) as exc:
        cli.main(["ci", "x.csv", "--bogus"])
    assert exc.value.code == 2
    assert "usage" in capsys.readouterr().err


def test_simulate_is_deterministic(tmp_path, capsys):
    a, b = tmp_path / "a.txt", tmp_path / "b.txt"
    for p in (a, b):
        assert run(["simulate", "--model", "tar", "--rho", 0.5, "--n", 100, "--seed", 7, "--out", p],
                   capsys)[0] == 0
    assert a.read_bytes() == b.read_bytes()
    assert len(a.read_text().splitlines()) == 100


def test_simulate_then_ci_round_trip(tmp_path, capsys):
    p = tmp_path / "s.txt"
    run(["simulate", "--model", "b", "--d", 0.3, "--n", 200, "--seed", 11, "--out", p], capsys)
    code, out, _ = run(["ci", p, "--c", 1, "--side", "two"], capsys)
    assert code == 0
    series = generate(model_config("b", n=200, d=0.3, seed=11))
    ref = confidence_interval(series, 14, 0.9, "two")
    row = rows(out)[0]
    assert float(row["lo"]) == ref.lo and float(row["hi"]) == ref.hi


def test_ecdf_knots(capsys):
    code, out, _ = run(["ecdf", "--model", "a", "--d", 0.25, "--n", 500, "--c", 1], capsys)
    assert code == 0
    knots = rows(out)
    # n - b + 1 blocks with b = floor(sqrt(500)) = 22
    assert len(knots) == 479
    x = [float(r["x"]) for r in knots]
    assert x == sorted(x)
    assert float(knots[-1]["F"]) == 1.0


def test_ecdf_standardize(capsys):
    code, out, _ = run(["ecdf", "--model", "c", "--d", -1, "--n", 300, "--standardize"], capsys)
    x = np.array([float(r["x"]) for r in rows(out)])
    assert code == 0
    assert abs(x.mean()) < 1e-12 and x.std() == pytest.approx(1.0, rel=1e-12)


def test_generator_errors_exit_2(capsys):
    assert run(["simulate", "--model", "a", "--d", 0.7], capsys)[0] == cli.EXIT_INPUT
    assert run(["ecdf", "--model", "tar", "--rho", 1.5], capsys)[0] == cli.EXIT_INPUT


def test_advise_white_noise(tmp_path, capsys):
    p = write(tmp_path, "white.csv", "1\n" + "0\n" * 1000)
    code, out, err = run(["advise", "--acf", p, "--n", 1000, "--b", 31, "--regime", "srd"], capsys)
    assert code == 0
    summary = {r["key"]: r["value"] for r in rows(err)}
    assert float(summary["diagnostic"]) == pytest.approx(0.032, rel=1e-12)
    assert summary["recommended_b"] == "31"
    table = rows(out)
    assert len(table) == 1000
    assert all(0.0 <= float(r["bound"]) <= 1.0 for r in table)


def test_mc_matches_library(tmp_path, capsys):
    code, out, _ = run(["mc", "--model", "a", "--d", -1, "--n", 100, "--c", 1, "--reps", 60,
                        "--seed", 1, "--workers", 1], capsys)
    assert code == 0
    (row,) = rows(out)
    ref = run_cell(ExperimentConfig(model_config("a", n=100, d=-1.0), c=1.0, reps=60, master_seed=1))
    assert float(row["lower"]) == ref.lower and float(row["upper"]) == ref.upper
    assert row["excluded"] == "0" and row["reps"] == "60"


def test_mc_config_file(tmp_path, capsys):
    cfg = write(tmp_path, "cell.txt", "model=tar\nn=100\nc=0.5\nreps=40\nmaster_seed=2\nrho=0.5\n")
    code, out, _ = run(["mc", "--config", cfg, "--workers", 1], capsys)
    assert code == 0 and rows(out)[0]["model"] == "tar"
    # a flag overrides the file
    code, out, _ = run(["mc", "--config", cfg, "--reps", 30, "--workers", 1], capsys)
    assert rows(out)[0]["reps"] == "30"
    bad = write(tmp_path, "bad.txt", "model=tar\nn=oops\n")
    code, _, err = run(["mc", "--config", bad], capsys)
    assert code == cli.EXIT_INPUT and "line 2" in err


def test_module_entry_point(tmp_path):
    p = write(tmp_path, "x.csv", "1\n2\n3\n")
    out = subprocess.run([sys.executable, "-m", "snbs", "ci", str(p), "--b", "2", "--level", "0.5"],
                         capture_output=True, text=True)
    assert out.returncode == 0
    assert math.isclose(float(rows(out.stdout)[0]["hi"]), 2.769800358919501, rel_tol=1e-15)
