"""Self-normalized block sampling for the mean of a stationary series.

The full-sample statistic is

    T_n = (S_{1,n} - n*mu) / D_n,
    D_n = sqrt( n^-1 * sum_k (S_{1,k} - (k/n) S_{1,n})^2 ),

and its sampling distribution is approximated by the empirical distribution
of the same statistic computed on every overlapping block of length ``b``,
centered by the full-sample mean.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from typing import Optional, Sequence, Union

import numpy as np

from . import kernels
from .errors import AllBlocksDegenerateError, DegenerateNormalizerError, SNBSError

__all__ = [
    "TimeSeries",
    "PrefixSums",
    "BlockStatistics",
    "EmpiricalCdf",
    "Side",
    "ConfidenceInterval",
    "as_array",
    "prefix_sums",
    "block_normalizer",
    "full_normalizer",
    "full_statistic",
    "block_statistics",
    "empirical_cdf",
    "quantile",
    "confidence_interval",
    "one_sided_bounds",
]

ArrayLike = Union[Sequence[float], np.ndarray]


@dataclass(frozen=True)
class TimeSeries:
    """Observations plus optional provenance."""

    values: np.ndarray
    model: Optional[str] = None
    seed: Optional[int] = None

    def __post_init__(self):
        arr = _validated(self.values)
        arr.flags.writeable = False
        object.__setattr__(self, "values", arr)

    def __len__(self):
        return self.values.shape[0]

    def __array__(self, dtype=None, copy=None):
        return self.values if dtype is None else self.values.astype(dtype)


def _validated(values) -> np.ndarray:
    arr = np.array(values, dtype=np.float64).reshape(-1)
    if arr.shape[0] < 2:
        raise SNBSError(f"series needs at least 2 observations, got {arr.shape[0]}")
    if not np.all(np.isfinite(arr)):
        bad = int(np.flatnonzero(~np.isfinite(arr))[0])
        raise SNBSError(f"non-finite observation at position {bad}")
    return arr


def as_array(series: Union[TimeSeries, ArrayLike]) -> np.ndarray:
    """Validated float64 copy of ``series``."""
    if isinstance(series, TimeSeries):
        return series.values
    return _validated(series)


def _mean(x: np.ndarray) -> float:
    return math.fsum(x.tolist()) / x.shape[0]


def _mean_residual(x: np.ndarray, xbar: float) -> float:
    """Exact mean minus ``xbar``, rounded once."""
    n = x.shape[0]
    return math.fsum(x.tolist() + [-xbar] * n) / n


@dataclass(frozen=True)
class PrefixSums:
    """Double-double prefix scans of ``x - shift``.

    ``p[k]`` is the k-th partial sum (``p[0] = 0``); ``q``, ``r`` and ``s``
    are the running sums of ``p[k]``, ``p[k]**2`` and ``k*p[k]`` for
    ``k >= 1``. Each ``*_err`` array holds the low-order part, so
    ``p[k] + p_err[k]`` carries about twice working precision.
    """

    p: np.ndarray
    q: np.ndarray
    r: np.ndarray
    s: np.ndarray
    p_err: np.ndarray
    q_err: np.ndarray
    r_err: np.ndarray
    s_err: np.ndarray
    shift: float = 0.0

    @property
    def n(self) -> int:
        return self.p.shape[0] - 1

    def partial(self, k: int) -> float:
        return float(self.p[k] + self.p_err[k])

    def segment_sum(self, start: int, stop: int) -> float:
        """Sum of ``x[start:stop] - shift`` (0-based, half-open)."""
        return float((self.p[stop] - self.p[start]) + (self.p_err[stop] - self.p_err[start]))

    def scans(self):
        return (self.p, self.p_err, self.q, self.q_err, self.r, self.r_err, self.s, self.s_err)


def prefix_sums(series, shift: float = 0.0) -> PrefixSums:
    x = as_array(series)
    ph, pl, qh, ql, rh, rl, sh, sl = kernels.prefix_scans(x, float(shift))
    return PrefixSums(ph, qh, rh, sh, pl, ql, rl, sl, float(shift))


def _check_window(n: int, start: int, b: int):
    if b < 2:
        raise SNBSError(f"block size must be >= 2, got {b}")
    if start < 0 or start + b > n:
        raise SNBSError(f"block [{start}, {start + b}) out of range for n={n}")


def block_normalizer(prefix: PrefixSums, start: int, b: int, method: str = "sliding") -> float:
    """Normalizer ``D`` of the block ``x[start:start+b]`` (0-based ``start``).

    ``method="sliding"`` evaluates in O(1) from the ``q``, ``r``, ``s`` scans;
    ``method="direct"`` sums the ``b`` squared bridge terms explicitly, in
    exact arithmetic (O(b), for reference and testing).
    """
    n = prefix.n
    _check_window(n, start, b)
    if method == "sliding":
        d = kernels.sliding_normalizers(*prefix.scans(), b, start, start + 1)
        return float(d[0])
    if method == "direct":
        # exact rational arithmetic on the double-double partial sums
        def part(k):
            return Fraction(float(prefix.p[k])) + Fraction(float(prefix.p_err[k]))
        base = part(start)
        total = part(start + b) - base
        acc = sum(((part(start + j) - base) - Fraction(j, b) * total) ** 2
                  for j in range(1, b + 1))
        return math.sqrt(acc / b)
    raise ValueError(f"unknown method {method!r}")


def _constant_windows(x: np.ndarray, b: int) -> np.ndarray:
    """Boolean mask over windows: True where all ``b`` entries are equal."""
    changes = np.concatenate(([0], np.cumsum(x[1:] != x[:-1])))
    return changes[b - 1:] == changes[: x.shape[0] - b + 1]


# windows with D below this fraction of max |p| are recomputed exactly
_ILL_CONDITIONED = 1e-8


def _exact_block_normalizer(block: np.ndarray) -> float:
    v = [Fraction(float(t)) for t in block]
    b = len(v)
    total = sum(v)
    acc, run = Fraction(0), Fraction(0)
    for j, t in enumerate(v, start=1):
        run += t
        acc += (run - Fraction(j, b) * total) ** 2
    return math.sqrt(acc / b)


def _normalizers(x: np.ndarray, b: int, center: float):
    pre = prefix_sums(x, shift=center)
    d = kernels.sliding_normalizers(*pre.scans(), b)
    const = _constant_windows(x, b)
    d[const] = 0.0
    # the O(1) formula cancels against the partial-sum scale; a block whose
    # own spread is far below that scale gets the shift-free direct sum
    scale = float(np.max(np.abs(pre.p)))
    for i in np.flatnonzero((d <= _ILL_CONDITIONED * scale) & ~const):
        d[i] = _exact_block_normalizer(x[i:i + b])
    return d, pre


def full_normalizer(series) -> float:
    """``D_n`` of the whole series."""
    x = as_array(series)
    d, _ = _normalizers(x, x.shape[0], _mean(x))
    return float(d[0])


def full_statistic(series, mu: float) -> float:
    """Self-normalized statistic ``(S_{1,n} - n*mu) / D_n``."""
    x = as_array(series)
    stats = block_statistics(x, x.shape[0], mu=mu)
    if stats.degenerate_count:
        raise DegenerateNormalizerError("D_n = 0: the series is constant")
    return float(stats.t[0])


@dataclass(frozen=True)
class BlockStatistics:
    """Statistics of all ``n - b + 1`` overlapping blocks.

    ``t[i]`` is NaN where the block normalizer ``d[i]`` is zero.
    ``mu`` is None for sample-mean centering.
    """

    t: np.ndarray
    d: np.ndarray
    b: int
    mu: Optional[float]
    center: float

    @property
    def valid(self) -> np.ndarray:
        return self.d > 0.0

    @property
    def degenerate_count(self) -> int:
        return int(np.count_nonzero(~self.valid))

    @property
    def defined(self) -> np.ndarray:
        return self.t[self.valid]


def block_statistics(series, b: int, mu: Optional[float] = None) -> BlockStatistics:
    """Self-normalized statistic on every block of length ``b``.

    With ``mu=None`` every block is centered by ``b`` times the FULL-sample
    mean; otherwise by ``b * mu``. Runs in O(n).
    """
    x = as_array(series)
    n = x.shape[0]
    b = int(b)
    if not 2 <= b <= n:
        raise SNBSError(f"block size must satisfy 2 <= b <= n={n}, got {b}")
    xbar = _mean(x)
    d, pre = _normalizers(x, b, xbar)
    m = n - b + 1
    num = (pre.p[b:b + m] - pre.p[:m]) + (pre.p_err[b:b + m] - pre.p_err[:m])
    if mu is None:
        # the float mean is off the exact mean by a residual; remove it too
        num = num - b * _mean_residual(x, xbar)
    else:
        num = num + b * (xbar - float(mu))
    t = np.full(m, np.nan)
    ok = d > 0.0
    t[ok] = num[ok] / d[ok]
    return BlockStatistics(t=t, d=d, b=b, mu=None if mu is None else float(mu), center=xbar)


@dataclass(frozen=True)
class EmpiricalCdf:
    """Right-continuous step function over ``sorted_values``."""

    sorted_values: np.ndarray

    @property
    def m(self) -> int:
        return self.sorted_values.shape[0]

    def __call__(self, x):
        return self.eval(x)

    def eval(self, x):
        counts = np.searchsorted(self.sorted_values, x, side="right")
        return counts / self.m

    def quantile(self, p):
        return quantile(self, p)


def empirical_cdf(values: ArrayLike) -> EmpiricalCdf:
    v = np.array(values, dtype=np.float64).reshape(-1)
    if v.shape[0] == 0:
        raise SNBSError("empirical CDF of an empty sample")
    if np.isnan(v).any():
        raise SNBSError("undefined block statistics must be excluded before building the ECDF")
    v.sort(kind="stable")
    v.flags.writeable = False
    return EmpiricalCdf(v)


def _rank(p: float, m: int) -> int:
    # ceil(p*m), ignoring representation noise in p (e.g. 0.1*100)
    r = math.ceil(p * m - 1e-9)
    return min(max(r, 1), m)


def quantile(cdf: EmpiricalCdf, p: float) -> float:
    """Smallest sample value ``x`` with ``cdf(x) >= p``.

    This is the order statistic of rank ``ceil(p*m)``.
    """
    if not 0.0 < p <= 1.0:
        raise SNBSError(f"quantile level must lie in (0, 1], got {p}")
    return float(cdf.sorted_values[_rank(p, cdf.m) - 1])


class Side(str, Enum):
    LOWER = "lower"
    UPPER = "upper"
    TWO = "two"


@dataclass(frozen=True)
class ConfidenceInterval:
    """Interval for the mean.

    ``LOWER`` is the lower one-sided interval ``(-inf, hi]``; ``UPPER`` is
    ``[lo, +inf)``.
    """

    side: Side
    lo: float
    hi: float
    level: float
    n: int = 0
    b: int = 0
    mean: float = float("nan")
    d_n: float = float("nan")
    quantiles: dict = field(default_factory=dict)
    degenerate_blocks: int = 0

    def contains(self, mu: float) -> bool:
        return self.lo <= mu <= self.hi


def _prepared(x: np.ndarray, b: int, level: float):
    if not 0.0 < level < 1.0:
        raise SNBSError(f"level must lie in (0, 1), got {level}")
    stats = block_statistics(x, b)
    d_n = full_normalizer(x)
    if d_n == 0.0:
        raise DegenerateNormalizerError("D_n = 0: the series is constant")
    if stats.degenerate_count == stats.t.shape[0]:
        raise AllBlocksDegenerateError("every block normalizer is zero")
    return stats, empirical_cdf(stats.defined), d_n


def confidence_interval(series, b: int, level: float = 0.9, side="lower") -> ConfidenceInterval:
    """Block-sampling confidence interval for the mean at ``level``."""
    side = Side(side)
    x = as_array(series)
    n = x.shape[0]
    stats, cdf, d_n = _prepared(x, b, level)
    xbar = stats.center
    scale = d_n / n
    alpha = 1.0 - level
    lo, hi = -math.inf, math.inf
    qs = {}
    if side is Side.LOWER:
        qs[alpha] = quantile(cdf, alpha)
        hi = xbar - qs[alpha] * scale
    elif side is Side.UPPER:
        qs[level] = quantile(cdf, level)
        lo = xbar - qs[level] * scale
    else:
        a2 = alpha / 2.0
        qs[a2] = quantile(cdf, a2)
        qs[1.0 - a2] = quantile(cdf, 1.0 - a2)
        lo = xbar - qs[1.0 - a2] * scale
        hi = xbar - qs[a2] * scale
    return ConfidenceInterval(side=side, lo=lo, hi=hi, level=level, n=n, b=int(b),
                              mean=xbar, d_n=d_n, quantiles=qs,
                              degenerate_blocks=stats.degenerate_count)


def one_sided_bounds(series, b: int, level: float = 0.9):
    """``(upper end of the lower interval, lower end of the upper interval, degenerate blocks)``.

    Same values as two ``confidence_interval`` calls, from one pass.
    """
    x = as_array(series)
    stats, cdf, d_n = _prepared(x, b, level)
    scale = d_n / x.shape[0]
    xbar = stats.center
    return (xbar - quantile(cdf, 1.0 - level) * scale,
            xbar - quantile(cdf, level) * scale,
            stats.degenerate_count)
