"""Self-normalized block sampling confidence intervals for the mean of a time series."""

from .core import (
    BlockStatistics,
    ConfidenceInterval,
    EmpiricalCdf,
    Side,
    TimeSeries,
    block_statistics,
    confidence_interval,
    empirical_cdf,
    full_normalizer,
    full_statistic,
    one_sided_bounds,
    quantile,
)
from .errors import (
    AllBlocksDegenerateError,
    DegenerateNormalizerError,
    NonPositiveDefiniteError,
    SNBSError,
)
from .kernels import BACKEND

__version__ = "0.1.0"

__all__ = [
    "BACKEND",
    "BlockStatistics",
    "ConfidenceInterval",
    "EmpiricalCdf",
    "Side",
    "TimeSeries",
    "block_statistics",
    "confidence_interval",
    "empirical_cdf",
    "full_normalizer",
    "full_statistic",
    "one_sided_bounds",
    "quantile",
    "AllBlocksDegenerateError",
    "DegenerateNormalizerError",
    "NonPositiveDefiniteError",
    "SNBSError",
]
