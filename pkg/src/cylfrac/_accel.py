"""Numba switch for the scalar kernels.

Set ``CYLFRAC_DISABLE_NUMBA=1`` (before import) to run every kernel through
its pure-numpy path instead.  The flag is read once at import time.
"""
import os

_FLAG = "CYLFRAC_DISABLE_NUMBA"

try:
    from numba import njit as _numba_njit
except ImportError:  # pragma: no cover - numba is a declared dependency
    _numba_njit = None

USE_NUMBA = _numba_njit is not None and os.environ.get(_FLAG, "0").lower() not in ("1", "true", "yes")


def njit(*args, **kwargs):
    """``numba.njit`` when acceleration is on, identity otherwise."""
    if not USE_NUMBA:
        if len(args) == 1 and callable(args[0]) and not kwargs:
            return args[0]
        return lambda f: f
    kwargs.setdefault("cache", True)
    return _numba_njit(*args, **kwargs)


def backend():
    return "numba" if USE_NUMBA else "numpy"
