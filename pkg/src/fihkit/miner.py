"""Support counting and level-wise Apriori mining over vertical covers."""

from __future__ import annotations

import math
from fractions import Fraction
from collections.abc import Mapping
from typing import Iterable, Iterator, Sequence

import numpy as np
import scipy.sparse as sp

from . import kernels
from .dataset import TransactionDatabase, VerticalIndex, encode_itemsets


def canonical(itemset: Iterable[int]) -> tuple:
    """Sorted, duplicate-free tuple form used everywhere as the itemset key."""
    return tuple(sorted({int(i) for i in itemset}))


def itemset_order(x: tuple):
    """Length-ascending, then lexicographic."""
    return (len(x), x)


class FrequentSet(Mapping):
    """Itemset -> support count, all at or above ``sigma_min``.

    Iteration order is length-ascending then lexicographic, which is also
    the order the miner produces.
    """

    def __init__(self, entries: Mapping | Iterable = (), sigma_min: int = 1, *, _sorted=False):
        data = dict(entries)
        if not _sorted:
            data = {k: data[k] for k in sorted(data, key=itemset_order)}
        self._data = data
        self.sigma_min = int(sigma_min)

    def __getitem__(self, key):
        return self._data[tuple(key)]

    def __contains__(self, key):
        try:
            return tuple(key) in self._data
        except TypeError:
            return False

    def __iter__(self) -> Iterator[tuple]:
        return iter(self._data)

    def __len__(self) -> int:
        return len(self._data)

    def __eq__(self, other):
        if isinstance(other, FrequentSet):
            return self._data == other._data
        if isinstance(other, Mapping):
            return self._data == dict(other)
        return NotImplemented

    def __repr__(self):
        return f"FrequentSet(n={len(self)}, sigma_min={self.sigma_min})"

    def items_by_length(self, k: int) -> list[tuple]:
        return [x for x in self._data if len(x) == k]

    @property
    def max_length(self) -> int:
        return max((len(x) for x in self._data), default=0)

    def to_dict(self) -> dict:
        return dict(self._data)


def resolve_sigma(min_support, n_transactions: int) -> int:
    """Absolute threshold from a count or a fraction in (0, 1].

    Strings containing a ``.`` and floats not above 1 are fractions of the
    database size, rounded up so that "support >= threshold" keeps its
    meaning. Everything else is an absolute count.
    """
    if isinstance(min_support, str):
        text = min_support.strip()
        frac = Fraction(text) if "." in text or "e" in text.lower() else None
        if frac is None:
            return resolve_sigma(int(text), n_transactions)
    elif isinstance(min_support, float) and min_support <= 1:
        frac = Fraction(repr(min_support))
    elif isinstance(min_support, Fraction):
        frac = min_support
    else:
        if min_support != int(min_support) or int(min_support) < 1:
            raise ValueError(f"min support must be a count >= 1 or a fraction in (0, 1], got {min_support}")
        return int(min_support)
    if not 0 < frac <= 1:
        raise ValueError(f"fractional min support must be in (0, 1], got {min_support}")
    return max(1, math.ceil(frac * n_transactions))


def support(db: TransactionDatabase, itemset: Sequence[int]) -> int:
    """Number of transactions of ``db`` containing every item of ``itemset``."""
    x = canonical(itemset)
    if not x:
        return db.n_transactions
    iptr, icodes = encode_itemsets(db, [x])
    if icodes.shape[0] != len(x):
        return 0
    return int(db.vertical.supports(iptr, icodes)[0])


def support_map(db: TransactionDatabase, itemsets: Iterable[Sequence[int]]) -> dict:
    keys = list(dict.fromkeys(canonical(x) for x in itemsets))
    if not keys:
        return {}
    iptr, icodes = encode_itemsets(db, keys)
    counts = db.vertical.supports(iptr, icodes)
    return {k: int(c) for k, c in zip(keys, counts)}


def covers(db: TransactionDatabase, itemsets: Sequence[Sequence[int]]):
    """CSR of 0-based row numbers supporting each itemset (ascending)."""
    iptr, icodes = encode_itemsets(db, [canonical(x) for x in itemsets])
    return db.vertical.covers(iptr, icodes)


def _pair_level(db: TransactionDatabase, frequent_codes: np.ndarray, sigma_min: int):
    # co-occurrence counts of frequent items through one sparse product
    n_f = frequent_codes.shape[0]
    rank = np.full(db.item_universe.shape[0], -1, dtype=np.int64)
    rank[frequent_codes] = np.arange(n_f)
    r = rank[db.codes]
    keep = r >= 0
    rows = np.repeat(np.arange(db.n_transactions), np.diff(db.indptr))[keep]
    x = sp.csr_matrix(
        (np.ones(rows.shape[0], dtype=np.int32), (rows, r[keep])), shape=(db.n_transactions, n_f)
    )
    co = sp.triu(sp.csr_matrix(x.T @ x), k=1).tocoo()
    sel = co.data >= sigma_min
    a = co.row[sel].astype(np.int64)
    b = co.col[sel].astype(np.int64)
    order = np.lexsort((b, a))
    return a[order], b[order], co.data[sel][order].astype(np.int64)


def mine_frequent(db: TransactionDatabase, sigma_min: int, max_length: int | None = None) -> FrequentSet:
    """All itemsets with support >= ``sigma_min`` (Apriori, level by level).

    Candidates of length k+1 come from joining length-k itemsets that share
    their first k-1 items and are pruned unless every k-subset is frequent.
    Supports are counted by intersecting the covers of the two joined parents.
    """
    if sigma_min < 1:
        raise ValueError(f"sigma_min must be >= 1, got {sigma_min}")
    universe = db.item_universe
    item_sup = db.item_supports
    f1 = np.flatnonzero(item_sup >= sigma_min).astype(np.int64)
    entries: dict = {}
    for c in f1:
        entries[(int(universe[c]),)] = int(item_sup[c])
    if f1.shape[0] < 2 or max_length == 1:
        return FrequentSet(entries, sigma_min, _sorted=True)

    ptr_all, rows_all = db._item_major
    sub_ptr = np.zeros(f1.shape[0] + 1, dtype=np.int64)
    np.cumsum(item_sup[f1], out=sub_ptr[1:])
    sub_rows = np.concatenate([rows_all[ptr_all[c] : ptr_all[c + 1]] for c in f1])
    item_index = VerticalIndex.from_tidlists(sub_ptr, sub_rows, db.n_transactions)

    a, b, counts = _pair_level(db, f1, sigma_min)
    level = np.stack((a, b), axis=1).astype(np.int32)
    cover = _materialize(item_index, a, b)
    labels = universe[f1]
    _record(entries, labels, level, counts)

    k = 2
    while level.shape[0] > 1 and (max_length is None or k < max_length):
        cands, pa, pb = kernels.join_level(level)
        if cands.shape[0] == 0:
            break
        counts = _count(cover, pa, pb)
        keep = np.flatnonzero(counts >= sigma_min)
        level = cands[keep]
        if level.shape[0] == 0:
            break
        cover = _materialize(cover, pa[keep], pb[keep])
        _record(entries, labels, level, counts[keep])
        k += 1
    return FrequentSet(entries, sigma_min, _sorted=True)


def _count(cover: VerticalIndex, pa, pb) -> np.ndarray:
    if cover.mode == "bitset":
        return kernels.bitset_pair_count(cover.bits, pa, pb)
    return kernels.tidlist_pair_count(cover.ptr, cover.rows, pa, pb)


def _materialize(cover: VerticalIndex, pa, pb) -> VerticalIndex:
    pa = np.ascontiguousarray(pa, dtype=np.int64)
    pb = np.ascontiguousarray(pb, dtype=np.int64)
    if cover.mode == "bitset":
        return VerticalIndex("bitset", cover.n_rows, bits=kernels.bitset_pair_and(cover.bits, pa, pb))
    ptr, rows = kernels.tidlist_pair_and(cover.ptr, cover.rows, pa, pb)
    return VerticalIndex("tidlist", cover.n_rows, ptr=ptr, rows=rows)


def _record(entries: dict, labels: np.ndarray, level: np.ndarray, counts: np.ndarray) -> None:
    items = labels[level].tolist()
    for row, c in zip(items, counts.tolist()):
        entries[tuple(row)] = c
