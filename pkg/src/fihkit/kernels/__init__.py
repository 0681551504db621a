"""Hot loops behind the miner, the support counters and the hiding trackers.

The numba implementations are used when numba imports and
``FIHKIT_DISABLE_NUMBA`` is unset; otherwise the numpy twins are.
Both backends are importable directly for benchmarking and parity tests.
"""

from . import _numpy as numpy_backend
from ._switch import USE_NUMBA

if USE_NUMBA:
    from . import _numba as active
else:
    active = numpy_backend

BACKEND = "numba" if USE_NUMBA else "numpy"

popcount_rows = active.popcount_rows
bitset_pair_count = active.bitset_pair_count
bitset_pair_and = active.bitset_pair_and
tidlist_pair_count = active.tidlist_pair_count
tidlist_pair_and = active.tidlist_pair_and
join_level = active.join_level
bitset_supports = active.bitset_supports
tidlist_supports = active.tidlist_supports
bitset_covers = active.bitset_covers
tidlist_covers = active.tidlist_covers
bitset_cover_hist = active.bitset_cover_hist
tidlist_cover_hist = active.tidlist_cover_hist
tracker_break = active.tracker_break
tracker_costs = active.tracker_costs


def load_backend(name):
    """Return the kernel module for ``"numba"`` or ``"numpy"``."""
    if name == "numpy":
        return numpy_backend
    if name == "numba":
        from . import _numba

        return _numba
    raise ValueError(f"unknown kernel backend {name!r}")


__all__ = [
    "BACKEND",
    "USE_NUMBA",
    "load_backend",
    "numpy_backend",
    "popcount_rows",
    "bitset_pair_count",
    "bitset_pair_and",
    "tidlist_pair_count",
    "tidlist_pair_and",
    "join_level",
    "bitset_supports",
    "tidlist_supports",
    "bitset_covers",
    "tidlist_covers",
    "bitset_cover_hist",
    "tidlist_cover_hist",
    "tracker_break",
    "tracker_costs",
]
