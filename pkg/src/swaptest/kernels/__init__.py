"""Hot comparison kernels with a compiled core and a numpy fallback.

The compiled module is picked at import time. Set ``SWAPTEST_PURE_PYTHON=1``
to force the fallback. ``BACKEND`` names the implementation in use.

Score kinds for :func:`linear_family_counts`: 0 absolute residual,
1 squared residual, 2 classification margin.
"""
import os

from . import _pykernels

if os.environ.get("SWAPTEST_PURE_PYTHON", "") == "1":
    _impl = _pykernels
else:
    try:
        from . import _ckernels as _impl
    except ImportError:
        _impl = _pykernels

BACKEND = "cython" if _impl is not _pykernels else "python"

count_wins_batch = _impl.count_wins_batch
linear_family_counts = _impl.linear_family_counts

KIND_ABS_RESIDUAL = 0
KIND_SQUARED_RESIDUAL = 1
KIND_MARGIN = 2

__all__ = [
    "BACKEND",
    "count_wins_batch",
    "linear_family_counts",
    "KIND_ABS_RESIDUAL",
    "KIND_SQUARED_RESIDUAL",
    "KIND_MARGIN",
]
