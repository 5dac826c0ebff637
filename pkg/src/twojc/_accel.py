"""Optional numba acceleration.

Hot kernels are written twice: a numba @njit version and a pure
numpy/scipy version.  The environment variable TWOJC_NUMBA selects the
path ("0"/"off"/"false" forces the numpy fallback); the fallback is also
used automatically when numba is not importable.  TWOJC_THREADS caps the
numba thread count.
"""

import os

__all__ = ["USE_NUMBA", "maybe_njit", "prange"]


def _env_flag(name, default=True):
    val = os.environ.get(name)
    if val is None:
        return default
    return val.strip().lower() not in ("0", "off", "false", "no")


_WANT_NUMBA = _env_flag("TWOJC_NUMBA", default=True)

try:
    import numba

    _HAVE_NUMBA = True
except ImportError:  # pragma: no cover - exercised via TWOJC_NUMBA=0 instead
    numba = None
    _HAVE_NUMBA = False

USE_NUMBA = _WANT_NUMBA and _HAVE_NUMBA

if USE_NUMBA:
    threads = os.environ.get("TWOJC_THREADS")
    if threads:
        numba.set_num_threads(max(1, int(threads)))
    prange = numba.prange

    def maybe_njit(*args, **kwargs):
        kwargs.setdefault("cache", True)
        return numba.njit(*args, **kwargs)

else:
    prange = range

    def maybe_njit(*args, **kwargs):
        def deco(func):
            func.py_func = func
            return func

        if args and callable(args[0]):
            return deco(args[0])
        return deco
