"""Seedable simulators for the benchmark processes.

Gaussian subordinated linear processes

    X_i = K(Z_i),  Z_i = sum_{j<M} a_j eps_{i-j},

with ``a_j = (1+j)^(d-1)`` (plain) or ``(1+j)^(d-1) log(1+j)`` (log-weighted)
and ``K`` the identity, the square, or the normal-to-t(df) marginal map; the
threshold autoregression ``X_i = rho |X_{i-1}| + eps_i``; a long-memory
stochastic duration model ``X_i = xi_i exp(Z_i)``; and an MA(1) with
symmetric stable innovations.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from enum import Enum
from functools import lru_cache
from typing import Callable, Optional

import numpy as np
from scipy import special as _sp

from . import kernels
from .core import TimeSeries
from .errors import SNBSError
from .special import t_from_normal

__all__ = [
    "Kind",
    "Family",
    "Transform",
    "GeneratorConfig",
    "CoefficientVector",
    "MODEL_LABELS",
    "model_config",
    "rng_stream",
    "standard_normals",
    "coefficients",
    "fft_convolve",
    "stable_variates",
    "make_simulator",
    "generate",
]


class Kind(str, Enum):
    GAUSS_LINEAR = "gauss_linear"
    TAR = "tar"
    LMSD = "lmsd"
    MA1_STABLE = "ma1_stable"


class Family(str, Enum):
    PLAIN = "plain"
    LOG = "log"


class Transform(str, Enum):
    IDENTITY = "identity"
    SQUARE = "square"
    T_INVERSE = "t_inverse"


def default_cutoff(n: int) -> int:
    """``floor(n**1.5)``, computed exactly."""
    return math.isqrt(n ** 3)


@dataclass(frozen=True)
class GeneratorConfig:
    """Full description of one simulation model.

    ``alpha`` is the tail index of the Pareto factor (LMSD) or of the stable
    innovations (MA(1)). ``stream`` selects an independent random stream
    under ``seed``. ``cutoff`` defaults to ``floor(n**1.5)``.
    """

    kind: Kind
    n: int
    d: float = 0.0
    family: Family = Family.PLAIN
    transform: Transform = Transform.IDENTITY
    df: float = 1.5
    rho: float = 0.5
    burn_in: int = 1000
    alpha: float = 1.5
    a: float = 0.0
    seed: int = 0
    stream: int = 0
    cutoff: Optional[int] = None
    label: Optional[str] = None

    def __post_init__(self):
        object.__setattr__(self, "kind", Kind(self.kind))
        object.__setattr__(self, "family", Family(self.family))
        object.__setattr__(self, "transform", Transform(self.transform))
        if self.n < 2:
            raise SNBSError(f"n must be >= 2, got {self.n}")
        if self.seed < 0 or self.stream < 0:
            raise SNBSError("seed and stream must be non-negative")
        if self.kind in (Kind.GAUSS_LINEAR, Kind.LMSD):
            if not self.d < 0.5:
                raise SNBSError(f"d must be < 1/2 for square-summable coefficients, got {self.d}")
            cutoff = default_cutoff(self.n) if self.cutoff is None else int(self.cutoff)
            if cutoff < self.n:
                raise SNBSError(f"cutoff {cutoff} must be >= n={self.n}")
            object.__setattr__(self, "cutoff", cutoff)
        if self.kind is Kind.GAUSS_LINEAR and self.transform is Transform.T_INVERSE and not self.df > 0:
            raise SNBSError("df must be positive")
        if self.kind is Kind.TAR:
            if not 0.0 <= self.rho < 1.0:
                raise SNBSError(f"rho must lie in [0, 1), got {self.rho}")
            if self.burn_in < 0:
                raise SNBSError("burn_in must be non-negative")
        if self.kind in (Kind.LMSD, Kind.MA1_STABLE) and not 1.0 < self.alpha < 2.0:
            raise SNBSError(f"alpha must lie in (1, 2), got {self.alpha}")
        if self.kind is Kind.MA1_STABLE and self.a < 0:
            raise SNBSError("MA(1) coefficient must be >= 0")

    def with_stream(self, seed: int, stream: int) -> "GeneratorConfig":
        return replace(self, seed=seed, stream=stream)


MODEL_LABELS = ("a", "b", "c", "a*", "b*", "c*", "tar", "lmsd", "ma1stable")


def model_config(label: str, n: int, d: float = 0.25, **kw) -> GeneratorConfig:
    """Config for a named benchmark model.

    ``a``/``b``/``c`` use the plain coefficient family with identity, square
    and t(1.5)-marginal transforms; the starred labels use the log-weighted
    family.
    """
    label = label.lower()
    if label in ("a", "b", "c", "a*", "b*", "c*"):
        family = Family.LOG if label.endswith("*") else Family.PLAIN
        transform = {"a": Transform.IDENTITY, "b": Transform.SQUARE,
                     "c": Transform.T_INVERSE}[label[0]]
        return GeneratorConfig(Kind.GAUSS_LINEAR, n=n, d=d, family=family,
                               transform=transform, label=label, **kw)
    if label == "tar":
        return GeneratorConfig(Kind.TAR, n=n, label=label, **kw)
    if label == "lmsd":
        return GeneratorConfig(Kind.LMSD, n=n, d=d, label=label, **kw)
    if label in ("ma1stable", "ma1_stable"):
        return GeneratorConfig(Kind.MA1_STABLE, n=n, label="ma1stable", **kw)
    raise SNBSError(f"unknown model {label!r}; expected one of {', '.join(MODEL_LABELS)}")


# -- random streams ------------------------------------------------------------


def rng_stream(seed: int, stream: int = 0, namespace: int = 0) -> np.random.Generator:
    """PCG64 generator keyed by ``(seed, namespace, stream)``.

    Distinct ``stream`` values give independent streams (SeedSequence
    spawn keys), and the output is platform independent.
    """
    ss = np.random.SeedSequence(int(seed), spawn_key=(int(namespace), int(stream)))
    return np.random.Generator(np.random.PCG64(ss))


def _open_uniforms(rng: np.random.Generator, size: int) -> np.ndarray:
    # k * 2^-53 shifted by half a step: strictly inside (0, 1)
    return rng.random(size) + 2.0 ** -54


def standard_normals(rng: np.random.Generator, size: int) -> np.ndarray:
    """Standard normals by inversion of one uniform each."""
    return _sp.ndtri(_open_uniforms(rng, size))


# -- linear filter ---------------------------------------------------------------


@dataclass(frozen=True)
class CoefficientVector:
    a: np.ndarray
    sum_sq: float

    @property
    def M(self) -> int:
        return self.a.shape[0]

    @classmethod
    def from_values(cls, values) -> "CoefficientVector":
        a = np.array(values, dtype=np.float64).reshape(-1)
        if a.shape[0] == 0:
            raise SNBSError("empty coefficient vector")
        a.flags.writeable = False
        return cls(a, math.fsum((a * a).tolist()))


@lru_cache(maxsize=32)
def coefficients(family, d: float, M: int) -> CoefficientVector:
    family = Family(family)
    if not d < 0.5:
        raise SNBSError(f"d must be < 1/2, got {d}")
    if M < 1:
        raise SNBSError(f"cutoff must be >= 1, got {M}")
    j1 = np.arange(1, M + 1, dtype=np.float64)
    a = j1 ** (d - 1.0)
    if family is Family.LOG:
        a = a * np.log(j1)
    return CoefficientVector.from_values(a)


def _fft_size(length: int) -> int:
    return 1 << max(0, (length - 1).bit_length())


def fft_convolve(coeffs: CoefficientVector, innovations, n: int, method: str = "fft") -> np.ndarray:
    """``Z_i = sum_j a_j eps_{i-j}`` for ``i = 1..n``.

    ``innovations[t]`` holds ``eps_{t+2-M}``, so the first ``n + M - 1``
    entries are consumed. ``method="direct"`` is the O(nM) reference.
    """
    e = np.asarray(innovations, dtype=np.float64)
    M = coeffs.M
    need = n + M - 1
    if n < 1 or e.shape[0] < need:
        raise SNBSError(f"need at least n + M - 1 = {need} innovations, got {e.shape[0]}")
    e = e[:need]
    if method == "direct":
        a = coeffs.a
        return np.array([np.dot(a, e[i + M - 1::-1][:M]) for i in range(n)])
    if method != "fft":
        raise ValueError(f"unknown method {method!r}")
    size = _fft_size(need)
    spec = np.fft.rfft(coeffs.a, size) * np.fft.rfft(e, size)
    return np.fft.irfft(spec, size)[M - 1:M - 1 + n]


class _LinearFilter:
    """Gaussian linear process with the coefficient spectrum cached."""

    def __init__(self, coeffs: CoefficientVector, n: int):
        self.coeffs = coeffs
        self.n = n
        self.need = n + coeffs.M - 1
        self.size = _fft_size(self.need)
        self._spec = np.fft.rfft(coeffs.a, self.size)

    def __call__(self, rng) -> np.ndarray:
        e = standard_normals(rng, self.need)
        z = np.fft.irfft(self._spec * np.fft.rfft(e, self.size), self.size)
        M = self.coeffs.M
        return z[M - 1:M - 1 + self.n]


def stable_variates(rng: np.random.Generator, alpha: float, size: int) -> np.ndarray:
    """Symmetric alpha-stable draws (Chambers-Mallows-Stuck, unit scale)."""
    v = math.pi * (_open_uniforms(rng, size) - 0.5)
    w = -np.log(_open_uniforms(rng, size))
    return (np.sin(alpha * v) / np.cos(v) ** (1.0 / alpha)
            * (np.cos((1.0 - alpha) * v) / w) ** ((1.0 - alpha) / alpha))


def make_simulator(config: GeneratorConfig) -> Callable[[np.random.Generator], np.ndarray]:
    """Return ``rng -> ndarray`` drawing one path; precomputation is shared."""
    n = config.n
    kind = config.kind
    if kind is Kind.GAUSS_LINEAR:
        coeffs = coefficients(config.family, config.d, config.cutoff)
        lin = _LinearFilter(coeffs, n)
        if config.transform is Transform.IDENTITY:
            return lin
        if config.transform is Transform.SQUARE:
            return lambda rng: np.square(lin(rng))
        scale = 1.0 / math.sqrt(coeffs.sum_sq)
        df = config.df
        return lambda rng: t_from_normal(lin(rng) * scale, df)
    if kind is Kind.TAR:
        rho, burn = config.rho, config.burn_in

        def tar(rng):
            eps = standard_normals(rng, burn + n)
            return kernels.tar_recursion(eps, rho, 0.0)[burn:]
        return tar
    if kind is Kind.LMSD:
        lin = _LinearFilter(coefficients(config.family, config.d, config.cutoff), n)
        alpha = config.alpha

        def lmsd(rng):
            z = lin(rng)
            xi = (1.0 - rng.random(n)) ** (-1.0 / alpha)
            return xi * np.exp(z)
        return lmsd
    if kind is Kind.MA1_STABLE:
        alpha, a = config.alpha, config.a

        def ma1(rng):
            eps = stable_variates(rng, alpha, n + 1)
            return eps[1:] + a * eps[:-1]
        return ma1
    raise SNBSError(f"unsupported kind {kind}")  # pragma: no cover


def generate(config: GeneratorConfig) -> TimeSeries:
    """Draw one path using the stream ``(config.seed, config.stream)``."""
    values = make_simulator(config)(rng_stream(config.seed, config.stream))
    return TimeSeries(values, model=config.label or config.kind.value, seed=config.seed)
