"""Numba switch.

Kernels are written once as plain Python loops; when numba is importable and
``CAUSTICS_DISABLE_JIT`` is unset they are compiled with ``@njit``.  Set
``CAUSTICS_DISABLE_JIT=1`` to force the pure-numpy fallback path.
"""
import os

_disabled = os.environ.get("CAUSTICS_DISABLE_JIT", "").strip().lower() in ("1", "true", "yes", "on")

try:
    if _disabled:
        raise ImportError
    from numba import njit as _njit

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - exercised with the env flag
    _njit = None
    HAVE_NUMBA = False


def jit_enabled():
    return HAVE_NUMBA


def maybe_njit(func):
    """Compile ``func`` with numba if available, else return it untouched."""
    if _njit is None:
        return func
    # numpy error model: division by zero gives inf/nan as in the fallback path
    return _njit(cache=True, fastmath=False, error_model="numpy")(func)
