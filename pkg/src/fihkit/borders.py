"""Sensitive closure, revised frequent set and its positive/negative borders."""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from . import kernels
from .miner import FrequentSet, canonical

log = logging.getLogger(__name__)


def border_order(x: tuple):
    """Length-descending, then lexicographic."""
    return (-len(x), x)


@dataclass
class SensitiveSet:
    itemsets: list = field(default_factory=list)

    def __post_init__(self):
        self.itemsets = list(dict.fromkeys(canonical(x) for x in self.itemsets))
        if any(len(x) == 0 for x in self.itemsets):
            raise ValueError("sensitive itemsets must be non-empty")

    @property
    def item_pool(self) -> tuple:
        return tuple(sorted({i for x in self.itemsets for i in x}))

    def __iter__(self):
        return iter(self.itemsets)

    def __len__(self):
        return len(self.itemsets)

    def infrequent_members(self, frequent: FrequentSet) -> list:
        """Members already below the threshold; logged as warnings."""
        out = [x for x in self.itemsets if x not in frequent]
        for x in out:
            log.warning("sensitive itemset %s is not frequent at sigma_min=%d", x, frequent.sigma_min)
        return out


def as_sensitive(s) -> SensitiveSet:
    return s if isinstance(s, SensitiveSet) else SensitiveSet(list(s))


def expand_sensitive(frequent: FrequentSet, sensitive: Iterable[Sequence[int]]) -> list:
    """Frequent itemsets that contain at least one sensitive itemset."""
    sens = [canonical(x) for x in as_sensitive(sensitive)]
    if not sens:
        return []
    by_item: dict = {}
    for idx, x in enumerate(frequent):
        for i in x:
            by_item.setdefault(i, []).append(idx)
    hit: set = set()
    for s in sens:
        lists = [by_item.get(i) for i in s]
        if any(lst is None for lst in lists):
            continue
        lists.sort(key=len)
        acc = set(lists[0])
        for lst in lists[1:]:
            acc.intersection_update(lst)
        hit |= acc
    keys = list(frequent)
    return [keys[i] for i in sorted(hit)]


def revised_frequent(frequent: FrequentSet, closure: Iterable[Sequence[int]]) -> FrequentSet:
    drop = {canonical(x) for x in closure}
    missing = [x for x in drop if x not in frequent]
    if missing:
        raise ValueError(f"itemsets not in the frequent set: {sorted(missing)[:5]}")
    return FrequentSet(
        {x: c for x, c in frequent.items() if x not in drop}, frequent.sigma_min, _sorted=True
    )


def positive_border(revised: FrequentSet | Iterable[Sequence[int]]) -> list:
    """Maximal members under set inclusion, ordered length-desc then lexicographic."""
    members = [canonical(x) for x in revised]
    covered: set = set()
    for x in members:
        if len(x) > 1:
            for p in range(len(x)):
                covered.add(x[:p] + x[p + 1 :])
    return sorted((x for x in members if x not in covered), key=border_order)


def _level_arrays(members: Iterable[tuple], universe: np.ndarray) -> dict:
    by_len: dict = {}
    for x in members:
        by_len.setdefault(len(x), []).append(x)
    out = {}
    for k, xs in by_len.items():
        codes = np.searchsorted(universe, np.asarray(sorted(xs), dtype=np.int64))
        out[k] = codes.astype(np.int32).reshape(len(xs), k)
    return out


def _row_keys(arr):
    arr = np.ascontiguousarray(arr.astype(">i4"))
    return arr.view(f"V{4 * arr.shape[1]}").ravel()


def negative_border(revised: FrequentSet | Iterable[Sequence[int]], universe: Iterable[int]) -> list:
    """Minimal itemsets outside ``revised`` whose proper subsets are all inside.

    Built level-wise: singletons of the universe not in ``revised``, then the
    Apriori join of each level of ``revised`` minus the next level.
    """
    members = {canonical(x) for x in revised}
    items = sorted({int(i) for i in universe} | {i for x in members for i in x})
    uni = np.asarray(items, dtype=np.int64)
    out = [(i,) for i in items if (i,) not in members]
    levels = _level_arrays(members, uni)
    for k in sorted(levels):
        cands, _, _ = kernels.join_level(levels[k])
        if cands.shape[0] == 0:
            continue
        if k + 1 in levels:
            inside = np.isin(_row_keys(cands), _row_keys(levels[k + 1]))
            cands = cands[~inside]
        out.extend(tuple(r) for r in uni[cands].tolist())
    return sorted(out, key=border_order)


@dataclass
class BorderSet:
    positive: list
    negative: list

    def __post_init__(self):
        self.positive = [canonical(x) for x in self.positive]
        self.negative = [canonical(x) for x in self.negative]


def compute_borders(revised: FrequentSet | Iterable[Sequence[int]], universe: Iterable[int]) -> BorderSet:
    members = list(revised)
    return BorderSet(positive_border(members), negative_border(members, universe))
