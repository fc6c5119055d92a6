"""Kernel backend selection.

The compiled Cython kernels are used when the extension built; otherwise the
numpy fallback takes over. ORIQ_BACKEND=cython|numpy forces the choice
(forcing cython raises if the extension is missing).
"""

import os

from . import numpy_backend

_requested = os.environ.get("ORIQ_BACKEND", "auto").strip().lower()

if _requested in ("auto", "", "cython", "cy"):
    try:
        from . import _cykernels as _impl
    except ImportError:
        if _requested in ("cython", "cy"):
            raise ImportError(
                "ORIQ_BACKEND=cython requested but the compiled kernels are "
                "not available; reinstall with a working C toolchain"
            ) from None
        _impl = numpy_backend
elif _requested in ("numpy", "py", "python"):
    _impl = numpy_backend
else:
    raise ImportError(f"unknown ORIQ_BACKEND value: {_requested!r}")

BACKEND = _impl.NAME

sse_u8 = _impl.sse_u8
row_sse_u8 = _impl.row_sse_u8
sqdiff_sum_u8 = _impl.sqdiff_sum_u8
bicubic_points = _impl.bicubic_points
resample_h = _impl.resample_h
resample_v = _impl.resample_v


def get_backend(name):
    """Return a backend module by name ('cython' or 'numpy'); None if absent."""
    if name == "numpy":
        return numpy_backend
    if name == "cython":
        try:
            from . import _cykernels
            return _cykernels
        except ImportError:
            return None
    raise ValueError(f"unknown backend: {name!r}")
