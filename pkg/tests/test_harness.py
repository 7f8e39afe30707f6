import math

import numpy as np
import pytest

from snbs import harness
from snbs.errors import SNBSError
from snbs.generators import model_config
from snbs.harness import (
    ExperimentConfig,
    block_size,
    config_from_mapping,
    read_config_file,
    run_cell,
    run_experiment,
    run_replication,
    true_mean,
)


def small(label="a", n=100, d=0.25, c=1.0, reps=200, seed=3, **kw):
    return ExperimentConfig(model_config(label, n=n, d=d), c=c, reps=reps, master_seed=seed, **kw)


def test_block_size():
    assert block_size(100, 1.0) == 10
    assert block_size(500, 1.0) == 22
    assert block_size(100, 0.5) == 5


def test_config_validation():
    with pytest.raises(SNBSError):
        small(c=0.1)
    with pytest.raises(SNBSError):
        small(reps=0)
    with pytest.raises(SNBSError):
        small(level=1.2)


def test_true_means():
    assert true_mean(model_config("a", n=100, d=0.25)) == 0.0
    assert true_mean(model_config("c", n=100, d=-1.0)) == 0.0
    gen = model_config("b", n=100, d=0.25)
    assert true_mean(gen) == pytest.approx(float(np.sum((1.0 + np.arange(1000)) ** -1.5)), rel=1e-13)
    lmsd = model_config("lmsd", n=100, d=0.2)
    ss = float(np.sum(((1.0 + np.arange(1000)) ** -0.8) ** 2))
    assert true_mean(lmsd) == pytest.approx(3.0 * math.exp(ss / 2), rel=1e-12)


def test_monte_carlo_true_mean_mode():
    gen = model_config("b", n=100, d=-1.0)
    mc = true_mean(gen, mc_reps=300)
    assert mc == pytest.approx(true_mean(gen), rel=0.05)
    assert mc == true_mean(gen, mc_reps=300)


def test_replication_is_deterministic():
    cfg = small()
    assert run_replication(cfg, 17) == run_replication(cfg, 17)


def test_degenerate_paths_are_excluded(monkeypatch):
    monkeypatch.setattr(harness, "make_simulator", lambda gen: (lambda rng: np.full(gen.n, 2.0)))
    row = run_cell(small(reps=25))
    assert row.excluded == 25 and row.reps == 0
    assert math.isnan(row.lower)


def test_stderr():
    assert harness._stderr(0.9, 5000) == pytest.approx(0.0042, abs=5e-5)
    row = run_cell(small(reps=150))
    assert row.lower_stderr == pytest.approx(math.sqrt(row.lower * (1 - row.lower) / 150))
    assert row.stderr == max(row.lower_stderr, row.upper_stderr)
    assert 0.0 <= row.lower <= 1.0 and 0.0 <= row.upper <= 1.0


def test_worker_count_independence():
    cfg = small(label="c", d=-1.0, reps=120)
    rows = [run_cell(cfg, workers=w) for w in (1, 2, 4)]
    assert all(r == rows[0] for r in rows)


def test_level_monotonicity():
    lo = run_cell(small(reps=200, level=0.9))
    hi = run_cell(small(reps=200, level=0.95))
    assert hi.lower >= lo.lower and hi.upper >= lo.upper


def test_experiment_reports_bad_cells():
    good = small(reps=20)
    table = run_experiment([good, small(reps=20, seed=4)])
    assert len(table.rows) == 2 and table.rows[0].error is None
    text = table.to_csv()
    assert text.splitlines()[0] == "model,d,n,c,level,reps,lower,upper,stderr,excluded"


def test_experiment_captures_errors(monkeypatch):
    def boom(gen):
        raise SNBSError("broken generator")
    monkeypatch.setattr(harness, "make_simulator", boom)
    table = run_experiment([small(reps=5, label="tar")])
    assert table.rows[0].error == "broken generator"
    assert "error: broken generator" in table.to_csv()


def test_grid():
    cells = harness.grid(["a", "b"], [0.1, 0.2], [100], [0.5, 1.0], reps=10)
    assert len(cells) == 8
    assert {c.b for c in cells} == {5, 10}


def test_config_file():
    text = "# coverage cell\nmodel = b*\nd=0.2\nn=100\nc=1\nreps=50\nmaster_seed=7\n\nlevel=0.9\n"
    values = read_config_file(text)
    cfg = config_from_mapping(values)
    assert cfg.label == "b*" and cfg.n == 100 and cfg.reps == 50 and cfg.master_seed == 7
    with pytest.raises(SNBSError, match="line 2"):
        read_config_file("n=10\nbogus\n")
    with pytest.raises(SNBSError, match="line 1"):
        read_config_file("n=ten\n")
    with pytest.raises(SNBSError, match="unknown key"):
        read_config_file("colour=red\n")


@pytest.mark.slow
def test_iid_coverage_near_nominal():
    cfg = ExperimentConfig(model_config("tar", n=500, rho=0.0), c=1.0, reps=5000, master_seed=2)
    row = run_cell(cfg)
    assert abs(row.lower - 0.9) <= 0.015
