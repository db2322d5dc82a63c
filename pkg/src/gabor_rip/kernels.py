"""Kernel dispatch: compiled extension when built, numpy fallback otherwise.

Set ``GABOR_RIP_PURE=1`` to force the fallback.  ``BACKEND`` records which
implementation was selected at import.
"""
import os

import numpy as np

from . import _fallback

_ext = None
if os.environ.get("GABOR_RIP_PURE", "") not in ("1", "true", "yes"):
    try:
        from . import _kernels as _ext
    except ImportError:  # extension not compiled
        _ext = None

BACKEND = "cython" if _ext is not None else "numpy"
_impl = _ext if _ext is not None else _fallback


def _c(a, dtype):
    return np.ascontiguousarray(a, dtype=dtype)


def gram_batch(table, omega, ks, ls, impl=None):
    """Stacked Gram matrices, shape ``(m, s, s)``, of atom subsets ``(ks, ls)``."""
    mod = _resolve(impl)
    return mod.gram_batch(_c(table, np.complex128), _c(omega, np.complex128),
                          _c(ks, np.int64), _c(ls, np.int64))


def sparse_synthesis(window, omega, ks, ls, values, impl=None):
    mod = _resolve(impl)
    return mod.sparse_synthesis(_c(window, np.complex128), _c(omega, np.complex128),
                                _c(ks, np.int64), _c(ls, np.int64), _c(values, np.complex128))


def _resolve(impl):
    if impl is None:
        return _impl
    if impl == "numpy":
        return _fallback
    if impl == "cython":
        if _ext is None:
            raise ImportError("compiled kernels are not available")
        return _ext
    raise ValueError(f"unknown kernel implementation {impl!r}")


def available():
    return ("cython", "numpy") if _ext is not None else ("numpy",)
