"""Backend selection for the hot numeric kernels.

The inner loops in :mod:`obstaflow.kernels` are compiled with numba's
``@njit`` by default.  Setting the environment variable
``OBSTAFLOW_DISABLE_NUMBA=1`` (or running without numba installed) selects
the pure-Python/numpy fallback, which computes the same thing, only slower.
The flag is read once at import time.
"""

import os

_DISABLED = os.environ.get("OBSTAFLOW_DISABLE_NUMBA", "0") not in ("0", "", "false")

if not _DISABLED:
    try:
        from numba import njit as _njit

        NUMBA_ENABLED = True
    except ImportError:  # pragma: no cover - numba is a hard dep, but be safe
        NUMBA_ENABLED = False
else:
    NUMBA_ENABLED = False

if NUMBA_ENABLED:

    def maybe_njit(func=None, **kwargs):
        kwargs.setdefault("cache", True)
        if func is None:
            return _njit(**kwargs)
        return _njit(**kwargs)(func)

else:

    def maybe_njit(func=None, **kwargs):
        if func is None:
            return lambda f: f
        return func


def backend_name() -> str:
    return "numba" if NUMBA_ENABLED else "numpy"
