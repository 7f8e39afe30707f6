"""Exception hierarchy."""


class SNBSError(ValueError):
    """Base class for invalid input or an undefined statistic."""


class DegenerateNormalizerError(SNBSError):
    """The full-sample normalizer is zero (the series is constant)."""


class AllBlocksDegenerateError(SNBSError):
    """Every block normalizer is zero, so the block distribution is empty."""


class NonPositiveDefiniteError(SNBSError):
    """A Toeplitz covariance matrix is not positive definite."""
