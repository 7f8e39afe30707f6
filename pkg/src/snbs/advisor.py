"""Block-size diagnostics for Gaussian-subordinated series (scalar case).

For two blocks of length ``m`` whose starts are ``k`` apart, the canonical
correlation is bounded by ``min(m * M_gamma(k - m) / lambda_m, 1)`` where
``M_gamma(k) = max_{h > k} |gamma(h)|`` and ``lambda_m`` is the smallest
eigenvalue of the ``m x m`` Toeplitz covariance matrix.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import Optional

import numpy as np
from scipy import linalg
from scipy.sparse.linalg import LinearOperator, eigsh

from .errors import NonPositiveDefiniteError, SNBSError
from .generators import CoefficientVector

__all__ = [
    "AutocovarianceSequence",
    "CanonicalBoundReport",
    "Regime",
    "acf_from_coefficients",
    "m_gamma",
    "min_eigenvalue",
    "rho_bound",
    "a3_diagnostic",
    "recommend_block",
]

_FULL_SOLVE_MAX = 512
_EIG_RTOL = 1e-8


@dataclass(frozen=True)
class AutocovarianceSequence:
    """``gamma[0..maxlag]`` of a stationary process.

    Lags beyond ``maxlag`` are treated as unknown and extrapolated with a
    power-law envelope fitted to the last decade of available lags.
    """

    gamma: np.ndarray

    def __post_init__(self):
        g = np.array(self.gamma, dtype=np.float64).reshape(-1)
        if g.shape[0] == 0 or not np.all(np.isfinite(g)):
            raise SNBSError("autocovariances must be a non-empty finite sequence")
        if not g[0] > 0:
            raise SNBSError(f"gamma[0] must be positive, got {g[0]}")
        if np.any(np.abs(g) > g[0] * (1.0 + 1e-12)):
            raise SNBSError("|gamma[h]| exceeds gamma[0]")
        g.flags.writeable = False
        object.__setattr__(self, "gamma", g)
        # suffix maxima of |gamma|: tail_max[h] = max_{h' >= h} |gamma[h']|
        tail = np.maximum.accumulate(np.abs(g)[::-1])[::-1]
        object.__setattr__(self, "_tail_max", tail)
        object.__setattr__(self, "_envelope", _fit_envelope(g))

    @property
    def maxlag(self) -> int:
        return self.gamma.shape[0] - 1

    def envelope(self, h):
        """Extrapolated ``|gamma(h)|`` for lags past ``maxlag`` (0 if no fit)."""
        env = self._envelope
        h = np.asarray(h, dtype=np.float64)
        if env is None:
            return np.zeros_like(h)
        logc, slope = env
        return np.minimum(np.exp(logc + slope * np.log(h)), self.gamma[0])

    @property
    def extrapolates(self) -> bool:
        return self._envelope is not None

    def extended(self, length: int) -> np.ndarray:
        """``gamma[0..length-1]``, using the envelope past ``maxlag``.

        Extrapolated lags keep the sign of the last available lag.
        """
        if length <= self.gamma.shape[0]:
            return self.gamma[:length].copy()
        extra = np.arange(self.gamma.shape[0], length)
        tail = self.envelope(extra)
        if self.gamma[-1] < 0:
            tail = -tail
        return np.concatenate([self.gamma, tail])


def _fit_envelope(g: np.ndarray):
    # log-log least squares on the last decade of lags, nonzero values only
    maxlag = g.shape[0] - 1
    if maxlag < 2:
        return None
    lo = max(1, maxlag // 10)
    h = np.arange(lo, maxlag + 1)
    v = np.abs(g[lo:])
    keep = v > 0
    if np.count_nonzero(keep) < 2 or not keep[-1]:
        return None
    lh, lv = np.log(h[keep]), np.log(v[keep])
    slope, logc = np.polyfit(lh, lv, 1)
    if slope >= 0:
        # flat or rising tail: hold the last value
        return float(lv[-1]), 0.0
    # never report an envelope below the last observed value at maxlag
    logc = max(logc, float(lv[-1] - slope * lh[-1]))
    return float(logc), float(slope)


@dataclass(frozen=True)
class CanonicalBoundReport:
    k: int
    m: int
    m_gamma: float
    lambda_m: float
    bound: float
    extrapolated: bool = False


def acf_from_coefficients(coeffs: CoefficientVector, maxlag: int) -> AutocovarianceSequence:
    """``gamma[h] = sum_j a_j a_{j+h}`` of the truncated linear process.

    Lags at or beyond the truncation ``M`` are exactly zero.
    """
    a = coeffs.a
    M = a.shape[0]
    if maxlag < 0:
        raise SNBSError("maxlag must be >= 0")
    nlag = min(maxlag, M - 1) + 1
    if nlag * M <= 20_000_000:
        g = np.array([np.dot(a[: M - h], a[h:]) for h in range(nlag)])
    else:
        size = 1 << (2 * M - 1).bit_length()
        f = np.fft.rfft(a, size)
        g = np.fft.irfft(f * np.conj(f), size)[:nlag]
    if maxlag >= M:
        g = np.concatenate([g, np.zeros(maxlag + 1 - M)])
    return AutocovarianceSequence(g)


def _m_gamma(acf: AutocovarianceSequence, k: int):
    if k + 1 <= acf.maxlag:
        return float(acf._tail_max[k + 1]), False
    # entirely past the data: decreasing envelope, sup attained at k + 1
    if not acf.extrapolates:
        return 0.0, False
    return float(acf.envelope(k + 1)), True


def _m_gamma_many(acf: AutocovarianceSequence, ks: np.ndarray) -> np.ndarray:
    out = np.empty(ks.shape[0])
    inside = ks + 1 <= acf.maxlag
    out[inside] = acf._tail_max[ks[inside] + 1]
    out[~inside] = acf.envelope(ks[~inside] + 1)
    return out


def m_gamma(acf: AutocovarianceSequence, k: int) -> float:
    """``max_{h > k} |gamma(h)|``.

    Within the available lags the maximum is taken over ``k < h <= maxlag``;
    past ``maxlag`` the fitted power-law envelope stands in for the tail.
    """
    if k < 0:
        raise SNBSError("k must be >= 0")
    return _m_gamma(acf, int(k))[0]


def toeplitz_matrix(acf: AutocovarianceSequence, m: int) -> np.ndarray:
    return linalg.toeplitz(acf.extended(m))


def min_eigenvalue(acf: AutocovarianceSequence, m: int) -> float:
    """Smallest eigenvalue of the ``m x m`` covariance matrix.

    Dense symmetric solve up to ``m = 512``; above that, shift-invert Lanczos
    around zero on a Cholesky factorization.
    """
    if m < 1:
        raise SNBSError("m must be >= 1")
    mat = toeplitz_matrix(acf, m)
    # eigenvalue error floor of a backward-stable solver
    floor = 64 * m * np.finfo(float).eps * float(np.abs(mat[0]).sum() * 2)
    if m <= _FULL_SOLVE_MAX:
        lam = float(linalg.eigvalsh(mat, subset_by_index=[0, 0])[0])
    else:
        try:
            cho = linalg.cho_factor(mat, lower=True, check_finite=False)
        except linalg.LinAlgError as exc:
            raise NonPositiveDefiniteError(f"Sigma_{m} is not positive definite") from exc
        op = LinearOperator((m, m), matvec=lambda v: linalg.cho_solve(cho, v), dtype=np.float64)
        mu = eigsh(op, k=1, which="LA", tol=_EIG_RTOL * 1e-4, return_eigenvectors=False)
        lam = float(1.0 / mu[0])
    if lam <= floor:
        raise NonPositiveDefiniteError(
            f"Sigma_{m} is not positive definite (lambda_min = {lam:.3e})")
    return lam


def rho_bound(acf: AutocovarianceSequence, k: int, m: int,
              lambda_m: Optional[float] = None) -> CanonicalBoundReport:
    """Bound on the canonical correlation of blocks of length ``m`` at lag ``k``.

    Overlapping blocks (``k < m``) get the trivial bound 1.
    """
    lam = min_eigenvalue(acf, m) if lambda_m is None else float(lambda_m)
    if k < m:
        mg, ext = float(acf.gamma[0]), False
        bound = 1.0
    else:
        mg, ext = _m_gamma(acf, k - m)
        bound = min(m * mg / lam, 1.0)
    return CanonicalBoundReport(k=int(k), m=int(m), m_gamma=mg, lambda_m=lam,
                                bound=float(bound), extrapolated=ext)


def a3_diagnostic(acf: AutocovarianceSequence, n: int, b: int, l: int = 0) -> float:
    """Normalized sum of canonical-correlation bounds over lags ``0..n``.

    Terms with ``k <= b + l`` are capped at 1; the rest are
    ``min(b * M_gamma(k - b - l) / lambda_{b+l}, 1)``. Small values mean the
    block size keeps between-block dependence under control at this ``n``.
    """
    if b < 1 or l < 0 or b + l > n:
        raise SNBSError(f"need b >= 1, l >= 0 and b + l <= n (b={b}, l={l}, n={n})")
    m = b + l
    lam = min_eigenvalue(acf, m)
    gaps = np.arange(1, n - m + 1)
    return (float(m + 1) + float(np.minimum(b * _m_gamma_many(acf, gaps) / lam, 1.0).sum())) / n


class Regime(str, Enum):
    SRD = "srd"
    LRD = "lrd"
    ANTI_PERSISTENT = "anti"
    ZERO_SPECTRUM = "zero"


def recommend_block(regime, n: int, c: float = 1.0, *, hurst: Optional[float] = None,
                    beta: Optional[float] = None, nu: Optional[float] = None) -> int:
    """``floor(c * n**e)`` with the exponent set by the dependence regime.

    The exponents are the admissible rates with 0.05 taken off to stay on the
    little-o side at finite ``n`` (a heuristic margin). Never below 2.
    """
    regime = Regime(regime)
    if n < 2 or not c > 0:
        raise SNBSError("need n >= 2 and c > 0")
    if regime is Regime.SRD:
        e = 0.5
    elif regime is Regime.LRD:
        if hurst is None or not 0.5 < hurst < 1.0:
            raise SNBSError("LRD regime needs a Hurst index in (1/2, 1)")
        e = min(0.5, 2.0 - 2.0 * hurst - 0.05)
    elif regime is Regime.ANTI_PERSISTENT:
        e = 0.95
    else:
        if beta is None or nu is None or not beta > 0 or not nu > 0:
            raise SNBSError("zero-spectrum regime needs beta > 0 and nu > 0")
        e = min(0.5, beta / (1.0 + nu) - 0.05)
    if e <= 0:
        return 2
    return max(2, int(math.floor(c * n ** e + 1e-9)))
