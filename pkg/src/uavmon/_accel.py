"""Numba switch for the numeric kernels.

Set ``UAVMON_DISABLE_NUMBA=1`` to force the pure-numpy code paths (useful for
debugging and for checking that both paths agree).
"""

from __future__ import annotations

import functools
import os

_DISABLED = os.environ.get("UAVMON_DISABLE_NUMBA", "").strip().lower() in {"1", "true", "yes", "on"}

try:
    import numba

    NUMBA_AVAILABLE = True
except ImportError:  # pragma: no cover - numba is a declared dependency
    numba = None
    NUMBA_AVAILABLE = False

USE_NUMBA = NUMBA_AVAILABLE and not _DISABLED


def njit(*args, **kwargs):
    """``numba.njit`` when numba is importable, otherwise an identity decorator.

    Kernels decorated here are always compiled if numba exists; whether they are
    *dispatched to* is decided by :data:`USE_NUMBA` in :mod:`uavmon.kernels`.
    """
    if NUMBA_AVAILABLE:
        return numba.njit(*args, cache=True, **kwargs)

    if len(args) == 1 and callable(args[0]) and not kwargs:
        return args[0]

    def deco(f):
        @functools.wraps(f)
        def wrapper(*a, **kw):
            return f(*a, **kw)

        return wrapper

    return deco


__all__ = ["njit", "USE_NUMBA", "NUMBA_AVAILABLE"]
