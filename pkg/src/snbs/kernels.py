"""Backend selection for the hot loops.

The compiled extension ``snbs._ckernels`` is used when importable; otherwise
the pure-Python module ``snbs._pykernels`` is used. Setting the environment
variable ``SNBS_PURE_PYTHON=1`` forces the fallback.
"""

import os

from . import _pykernels

if os.environ.get("SNBS_PURE_PYTHON", "") not in ("", "0"):
    _impl = _pykernels
    BACKEND = "python"
else:
    try:
        from . import _ckernels as _impl
        BACKEND = "cython"
    except ImportError:  # pragma: no cover - exercised when the build is skipped
        _impl = _pykernels
        BACKEND = "python"

prefix_scans = _impl.prefix_scans
sliding_normalizers = _impl.sliding_normalizers
tar_recursion = _impl.tar_recursion
ibeta = _impl.ibeta
t_cdf = _impl.t_cdf
t_quantile = _impl.t_quantile
t_cdf_array = _impl.t_cdf_array
t_quantile_array = _impl.t_quantile_array
t_from_normal = _impl.t_from_normal


def backends():
    """Return ``{name: module}`` for every importable backend."""
    out = {"python": _pykernels}
    try:
        from . import _ckernels
    except ImportError:  # pragma: no cover
        pass
    else:
        out["cython"] = _ckernels
    return out
