"""Backend selection for the compiled kernels.

Set ``FIHKIT_DISABLE_NUMBA=1`` to force the pure-numpy implementations.
"""

import os

_FLAG = "FIHKIT_DISABLE_NUMBA"


def numba_requested():
    return os.environ.get(_FLAG, "").strip().lower() not in ("1", "true", "yes", "on")


def numba_available():
    try:
        import numba  # noqa: F401
    except ImportError:
        return False
    return True


USE_NUMBA = numba_requested() and numba_available()
