"""Kernel backend selection.

Set ``GMIC_DISABLE_NUMBA=1`` to force the pure-numpy kernels even when numba
is installed.
"""

import os

try:
    import numba
    NUMBA_AVAILABLE = True
except ImportError:  # pragma: no cover
    numba = None
    NUMBA_AVAILABLE = False

_flag = os.environ.get("GMIC_DISABLE_NUMBA", "").strip().lower()
USE_NUMBA = NUMBA_AVAILABLE and _flag not in ("1", "true", "yes", "on")


def njit(func):
    """Compile with numba when available, otherwise hand back ``func`` untouched."""
    if NUMBA_AVAILABLE:
        return numba.njit(cache=True, nogil=True)(func)
    return func


def backend_name():
    return "numba" if USE_NUMBA else "numpy"
