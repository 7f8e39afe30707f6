"""Replicated coverage experiments for one-sided block-sampling intervals."""

from __future__ import annotations

import csv
import io
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Iterable, List, NamedTuple, Optional, Sequence

import numpy as np

from .core import one_sided_bounds
from .errors import AllBlocksDegenerateError, DegenerateNormalizerError, SNBSError
from .generators import (
    GeneratorConfig,
    Kind,
    Transform,
    coefficients,
    make_simulator,
    model_config,
    rng_stream,
)

__all__ = [
    "ExperimentConfig",
    "ReplicationResult",
    "CoverageRow",
    "CoverageTable",
    "block_size",
    "true_mean",
    "run_replication",
    "run_cell",
    "run_experiment",
    "read_config_file",
]

# random-stream namespaces under the master seed
_NS_PATHS = 0
_NS_TRUE_MEAN = 1


def block_size(n: int, c: float) -> int:
    """``floor(c * sqrt(n))``."""
    return int(math.floor(c * math.sqrt(n) + 1e-9))


@dataclass(frozen=True)
class ExperimentConfig:
    """One cell of a coverage experiment.

    ``true_mean_reps=None`` uses the closed-form mean when one exists and
    falls back to averaging ``1000`` simulated sample means otherwise; an
    integer forces the Monte Carlo estimate with that many paths.
    """

    generator: GeneratorConfig
    c: float = 1.0
    level: float = 0.9
    reps: int = 5000
    master_seed: int = 0
    true_mean_reps: Optional[int] = None

    def __post_init__(self):
        if self.reps < 1:
            raise SNBSError("reps must be >= 1")
        if not 0.0 < self.level < 1.0:
            raise SNBSError("level must lie in (0, 1)")
        if self.b < 2:
            raise SNBSError(f"block size floor(c*sqrt(n)) = {self.b} must be >= 2")
        if self.b > self.n:
            raise SNBSError(f"block size {self.b} exceeds n={self.n}")

    @property
    def n(self) -> int:
        return self.generator.n

    @property
    def b(self) -> int:
        return block_size(self.generator.n, self.c)

    @property
    def label(self) -> str:
        return self.generator.label or self.generator.kind.value


def analytic_mean(gen: GeneratorConfig) -> Optional[float]:
    """Closed-form mean of the simulated process, or None if unavailable."""
    if gen.kind is Kind.GAUSS_LINEAR:
        if gen.transform is Transform.SQUARE:
            return coefficients(gen.family, gen.d, gen.cutoff).sum_sq
        return 0.0
    if gen.kind is Kind.LMSD:
        sum_sq = coefficients(gen.family, gen.d, gen.cutoff).sum_sq
        return gen.alpha / (gen.alpha - 1.0) * math.exp(sum_sq / 2.0)
    if gen.kind is Kind.MA1_STABLE:
        return 0.0
    if gen.kind is Kind.TAR:
        # the stationary law of rho|X| + N(0,1) is skew-normal with
        # scale (1 - rho^2)^-1/2 and skewness delta = rho
        return gen.rho * math.sqrt(2.0 / math.pi) / math.sqrt(1.0 - gen.rho ** 2)
    return None


def monte_carlo_mean(gen: GeneratorConfig, reps: int = 1000, master_seed: int = 0) -> float:
    """Average of ``reps`` simulated sample means."""
    sim = make_simulator(gen)
    means = [math.fsum(sim(rng_stream(master_seed, i, _NS_TRUE_MEAN)).tolist()) / gen.n
             for i in range(reps)]
    return math.fsum(means) / reps


def true_mean(gen: GeneratorConfig, mc_reps: Optional[int] = None, master_seed: int = 0) -> float:
    if mc_reps is None:
        mu = analytic_mean(gen)
        if mu is not None:
            return mu
        mc_reps = 1000
    return monte_carlo_mean(gen, mc_reps, master_seed)


class ReplicationResult(NamedTuple):
    lower_hit: bool
    upper_hit: bool
    excluded: bool = False
    degenerate_blocks: int = 0


def _replicate(config: ExperimentConfig, sim, mu: float, rep_index: int) -> ReplicationResult:
    x = sim(rng_stream(config.master_seed, rep_index, _NS_PATHS))
    try:
        hi, lo, degenerate = one_sided_bounds(x, config.b, config.level)
    except (DegenerateNormalizerError, AllBlocksDegenerateError):
        return ReplicationResult(False, False, True, 0)
    return ReplicationResult(bool(mu <= hi), bool(lo <= mu), False, degenerate)


def run_replication(config: ExperimentConfig, rep_index: int,
                    mu: Optional[float] = None) -> ReplicationResult:
    """One path from stream ``(master_seed, rep_index)``; hit flags for both sides."""
    if mu is None:
        mu = true_mean(config.generator, config.true_mean_reps, config.master_seed)
    return _replicate(config, make_simulator(config.generator), mu, rep_index)


def _count_range(args):
    config, mu, start, stop = args
    sim = make_simulator(config.generator)
    lower = upper = excluded = degenerate = 0
    for i in range(start, stop):
        r = _replicate(config, sim, mu, i)
        lower += r.lower_hit
        upper += r.upper_hit
        excluded += r.excluded
        degenerate += r.degenerate_blocks
    return lower, upper, excluded, degenerate


@dataclass(frozen=True)
class CoverageRow:
    model: str
    d: float
    n: int
    c: float
    level: float
    reps: int
    lower: float
    upper: float
    lower_stderr: float
    upper_stderr: float
    excluded: int
    undefined_blocks: int
    true_mean: float = float("nan")
    error: Optional[str] = None

    @property
    def stderr(self) -> float:
        return max(self.lower_stderr, self.upper_stderr)


CSV_COLUMNS = ("model", "d", "n", "c", "level", "reps", "lower", "upper", "stderr", "excluded")


@dataclass
class CoverageTable:
    rows: List[CoverageRow] = field(default_factory=list)

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(CSV_COLUMNS)
        for r in self.rows:
            if r.error is not None:
                w.writerow([r.model, repr(r.d), r.n, repr(r.c), repr(r.level), r.reps,
                            "nan", "nan", "nan", f"error: {r.error}"])
                continue
            w.writerow([r.model, repr(r.d), r.n, repr(r.c), repr(r.level), r.reps,
                        repr(r.lower), repr(r.upper), repr(r.stderr), r.excluded])
        return buf.getvalue()


def _stderr(p: float, reps: int) -> float:
    return math.sqrt(p * (1.0 - p) / reps) if reps else float("nan")


def run_cell(config: ExperimentConfig, workers: int = 1) -> CoverageRow:
    """Coverage of both one-sided intervals over ``config.reps`` paths.

    Hits are aggregated as integers per contiguous range of replication
    indices, so the result does not depend on ``workers``.
    """
    mu = true_mean(config.generator, config.true_mean_reps, config.master_seed)
    workers = max(1, int(workers))
    chunks = max(1, min(config.reps, 4 * workers)) if workers > 1 else 1
    edges = np.linspace(0, config.reps, chunks + 1).astype(int)
    tasks = [(config, mu, int(a), int(b)) for a, b in zip(edges[:-1], edges[1:]) if b > a]
    if workers == 1:
        parts = [_count_range(t) for t in tasks]
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(_count_range, tasks))
    lower = sum(p[0] for p in parts)
    upper = sum(p[1] for p in parts)
    excluded = sum(p[2] for p in parts)
    degenerate = sum(p[3] for p in parts)
    used = config.reps - excluded
    lo = lower / used if used else float("nan")
    up = upper / used if used else float("nan")
    return CoverageRow(model=config.label, d=config.generator.d, n=config.n, c=config.c,
                       level=config.level, reps=used, lower=lo, upper=up,
                       lower_stderr=_stderr(lo, used), upper_stderr=_stderr(up, used),
                       excluded=excluded, undefined_blocks=degenerate, true_mean=mu)


def run_experiment(configs: Iterable[ExperimentConfig], workers: int = 1) -> CoverageTable:
    """Run every cell; a failing cell is reported in its row, not raised."""
    table = CoverageTable()
    for cfg in configs:
        try:
            table.rows.append(run_cell(cfg, workers))
        except SNBSError as exc:
            table.rows.append(CoverageRow(model=cfg.label, d=cfg.generator.d, n=cfg.n, c=cfg.c,
                                          level=cfg.level, reps=0, lower=float("nan"),
                                          upper=float("nan"), lower_stderr=float("nan"),
                                          upper_stderr=float("nan"), excluded=0,
                                          undefined_blocks=0, error=str(exc)))
    return table


def grid(models: Sequence[str], ds: Sequence[float], ns: Sequence[int], cs: Sequence[float],
         *, level: float = 0.9, reps: int = 5000, master_seed: int = 0,
         true_mean_reps: Optional[int] = None, **gen_kw) -> List[ExperimentConfig]:
    """Cartesian product of cells. Invalid cells raise immediately."""
    out = []
    for model in models:
        for d in ds:
            for n in ns:
                gen = model_config(model, n=n, d=d, **gen_kw)
                for c in cs:
                    out.append(ExperimentConfig(gen, c=c, level=level, reps=reps,
                                                master_seed=master_seed,
                                                true_mean_reps=true_mean_reps))
    return out


_INT_KEYS = {"n", "reps", "master_seed", "true_mean_reps", "burn_in", "cutoff", "workers"}
_FLOAT_KEYS = {"d", "c", "level", "rho", "alpha", "a", "df"}


def read_config_file(text: str) -> dict:
    """Parse flat ``key=value`` lines; ``#`` starts a comment."""
    out = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise SNBSError(f"line {lineno}: expected key=value")
        key, value = (s.strip() for s in line.split("=", 1))
        key = key.replace("-", "_")
        if key not in _INT_KEYS and key not in _FLOAT_KEYS and key != "model":
            raise SNBSError(f"line {lineno}: unknown key {key!r}")
        try:
            if key in _INT_KEYS:
                out[key] = int(value)
            elif key in _FLOAT_KEYS:
                out[key] = float(value)
            else:
                out[key] = value
        except ValueError as exc:
            raise SNBSError(f"line {lineno}: bad value for {key}: {value!r}") from exc
    return out


def config_from_mapping(values: dict) -> ExperimentConfig:
    values = dict(values)
    model = values.pop("model", "a")
    n = values.pop("n", 100)
    d = values.pop("d", 0.25)
    exp_kw = {k: values.pop(k) for k in ("c", "level", "reps", "master_seed", "true_mean_reps")
              if k in values}
    values.pop("workers", None)
    gen = model_config(model, n=n, d=d, **values)
    return ExperimentConfig(gen, **exp_kw)
