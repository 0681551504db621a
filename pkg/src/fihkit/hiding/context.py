"""Lazily derived inputs shared by the algorithms, plus live cover tracking."""

from __future__ import annotations

from functools import cached_property

import numpy as np

from .. import kernels
from ..borders import SensitiveSet, expand_sensitive, positive_border, revised_frequent
from ..dataset import TransactionDatabase
from ..miner import FrequentSet, covers, mine_frequent, support_map


class HidingContext:
    """One hiding problem: database, sensitive itemsets and threshold.

    Mining, the sensitive closure and the border are computed on first use,
    so an algorithm only pays for what it needs. A frequent set mined
    beforehand can be shared across runs.
    """

    def __init__(self, db: TransactionDatabase, sensitive, sigma_min: int, frequent: FrequentSet | None = None):
        self.db = db
        self.sensitive = sensitive if isinstance(sensitive, SensitiveSet) else SensitiveSet(list(sensitive))
        self.sigma_min = int(sigma_min)
        if frequent is not None:
            if frequent.sigma_min != self.sigma_min:
                raise ValueError("shared frequent set was mined at a different threshold")
            self.__dict__["frequent"] = frequent

    @cached_property
    def sensitive_supports(self) -> dict:
        return support_map(self.db, self.sensitive.itemsets)

    @cached_property
    def targets(self) -> list:
        """Sensitive itemsets still frequent, in hiding order (support asc, then lexicographic)."""
        sup = self.sensitive_supports
        live = [s for s in self.sensitive if sup[s] >= self.sigma_min]
        return sorted(live, key=lambda s: (sup[s], s))

    @cached_property
    def already_hidden(self) -> list:
        sup = self.sensitive_supports
        return [s for s in self.sensitive if sup[s] < self.sigma_min]

    @cached_property
    def frequent(self) -> FrequentSet:
        return mine_frequent(self.db, self.sigma_min)

    @cached_property
    def closure(self) -> list:
        return expand_sensitive(self.frequent, self.sensitive)

    @cached_property
    def revised(self) -> FrequentSet:
        return revised_frequent(self.frequent, self.closure)

    @cached_property
    def border(self) -> list:
        return positive_border(self.revised)

    @cached_property
    def sensitive_items(self) -> tuple:
        return tuple(sorted({i for s in self.targets for i in s}))


class CoverTracker:
    """Current covers of a family of itemsets under item deletions.

    Entries are (row, itemset) incidences grouped by row. Deleting item
    ``i`` from a row breaks the intact entries whose itemset contains ``i``.
    Only items in ``columns`` may be deleted.
    """

    def __init__(self, db: TransactionDatabase, itemsets, columns):
        self.itemsets = list(itemsets)
        self.columns = tuple(columns)
        self.col_of = {i: k for k, i in enumerate(self.columns)}
        n_sets = len(self.itemsets)
        self.member = np.zeros((n_sets, max(1, len(self.columns))), dtype=np.uint8)
        for k, x in enumerate(self.itemsets):
            for i in x:
                c = self.col_of.get(i)
                if c is not None:
                    self.member[k, c] = 1
        if n_sets:
            ptr, rows = covers(db, self.itemsets)
            rows = rows.astype(np.int64)
            owner = np.repeat(np.arange(n_sets, dtype=np.int64), np.diff(ptr))
        else:
            rows = np.empty(0, dtype=np.int64)
            owner = np.empty(0, dtype=np.int64)
        self.support = np.bincount(owner, minlength=n_sets).astype(np.int64)
        order = np.lexsort((owner, rows))
        self.entry_row = rows[order]
        self.eids = owner[order]
        self.eptr = np.zeros(db.n_transactions + 1, dtype=np.int64)
        np.cumsum(np.bincount(self.entry_row, minlength=db.n_transactions), out=self.eptr[1:])
        self.intact = np.ones(self.eids.shape[0], dtype=bool)
        # entries of each itemset, ascending row
        by_set = np.lexsort((self.entry_row, self.eids))
        self.set_ptr = np.zeros(n_sets + 1, dtype=np.int64)
        np.cumsum(self.support, out=self.set_ptr[1:])
        self.set_entries = by_set

    def delete(self, row: int, item: int) -> np.ndarray:
        """Record deletion of ``item`` from 0-based ``row``; returns ids of newly broken itemsets."""
        c = self.col_of.get(item)
        if c is None or not len(self.itemsets):
            return np.empty(0, dtype=np.int64)
        return kernels.tracker_break(row, c, self.eptr, self.eids, self.intact, self.member, self.support)

    def supporters(self, k: int) -> np.ndarray:
        """Ascending 0-based rows where itemset ``k`` is still intact."""
        ent = self.set_entries[self.set_ptr[k] : self.set_ptr[k + 1]]
        return self.entry_row[ent[self.intact[ent]]]

    def row_weights(self, row: int, weights: np.ndarray) -> np.ndarray:
        """Per column, summed ``weights`` of itemsets intact in ``row`` that contain the column's item."""
        if not len(self.itemsets):
            return np.zeros(max(1, len(self.columns)))
        return kernels.tracker_costs(row, self.eptr, self.eids, self.intact, self.member, weights)

    def intact_in(self, row: int) -> np.ndarray:
        s, e = self.eptr[row], self.eptr[row + 1]
        return self.eids[s:e][self.intact[s:e]]
