"""Applying plans, greedy transaction sanitization and the plan file format."""

from __future__ import annotations

import re
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from ..dataset import TransactionDatabase, _atomic_write
from ..miner import canonical
from .types import PlanError, SanitizationPlan


def plan_positions(db: TransactionDatabase, deletions: Sequence[tuple]) -> np.ndarray:
    """Positions in ``db.items`` of each (tid, item); raises PlanError on bad pairs."""
    if not deletions:
        return np.empty(0, dtype=np.int64)
    arr = np.asarray(deletions, dtype=np.int64).reshape(-1, 2)
    tids, items = arr[:, 0], arr[:, 1]
    bad_tid = (tids < 1) | (tids > db.n_transactions)
    if bad_tid.any():
        k = int(np.flatnonzero(bad_tid)[0])
        raise PlanError(f"plan pair ({tids[k]}, {items[k]}): no such transaction")
    stride = int(max(int(db.items.max(initial=0)), int(items.max(initial=0)))) + 1
    keys = np.repeat(np.arange(db.n_transactions, dtype=np.int64), np.diff(db.indptr)) * stride + db.items
    want = (tids - 1) * stride + items
    uniq, first, counts = np.unique(want, return_index=True, return_counts=True)
    if np.any(counts > 1):
        k = int(first[np.flatnonzero(counts > 1)[0]])
        raise PlanError(f"plan pair ({tids[k]}, {items[k]}) listed twice")
    pos = np.searchsorted(keys, want)
    ok = (pos < keys.shape[0]) & (keys[np.minimum(pos, keys.shape[0] - 1)] == want) if keys.size else np.zeros(want.shape, bool)
    if not ok.all():
        k = int(np.flatnonzero(~ok)[0])
        raise PlanError(f"plan pair ({tids[k]}, {items[k]}): item not in transaction")
    return pos


def apply_plan(db: TransactionDatabase, plan) -> TransactionDatabase:
    """New database with the plan's items removed; ``db`` is untouched."""
    deletions = plan.deletions if isinstance(plan, SanitizationPlan) else list(plan)
    pos = plan_positions(db, deletions)
    if pos.size == 0:
        return db
    keep = np.ones(db.items.shape[0], dtype=bool)
    keep[pos] = False
    row_of = np.repeat(np.arange(db.n_transactions), np.diff(db.indptr))
    lengths = np.bincount(row_of[keep], minlength=db.n_transactions)
    indptr = np.zeros(db.n_transactions + 1, dtype=np.int64)
    np.cumsum(lengths, out=indptr[1:])
    return TransactionDatabase(indptr, db.items[keep], source=db.source)


def greedy_victims(row: Iterable[int], sensitive: Sequence[tuple]) -> list:
    """Greedy hitting set: items to delete so ``row`` contains no sensitive itemset."""
    items = set(int(i) for i in row)
    alive = [s for s in sensitive if items.issuperset(s)]
    out = []
    while alive:
        counts: dict = {}
        for s in alive:
            for i in s:
                counts[i] = counts.get(i, 0) + 1
        best = min(counts, key=lambda i: (-counts[i], i))
        out.append(best)
        alive = [s for s in alive if best not in s]
    return out


def sanitize_transactions(db: TransactionDatabase, tids: Iterable[int], sensitive, sigma_min: int = 1) -> SanitizationPlan:
    """Strip every sensitive itemset from each listed transaction, greedily."""
    sens = [canonical(s) for s in sensitive]
    deletions = []
    for tid in sorted(set(int(t) for t in tids)):
        deletions.extend((tid, i) for i in greedy_victims(db.row(tid), sens))
    return SanitizationPlan(deletions)


_PAIR = re.compile(r"^\s*(\d+)\s+(\d+)\s*$")


def read_plan(path) -> list:
    pairs = []
    for lineno, line in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), 1):
        if not line.strip():
            continue
        m = _PAIR.match(line)
        if m is None:
            raise PlanError(f"{path}:{lineno}: expected 'tid item', got {line!r}")
        pairs.append((int(m.group(1)), int(m.group(2))))
    return pairs


def write_plan(plan, path) -> None:
    deletions = plan.deletions if isinstance(plan, SanitizationPlan) else plan
    _atomic_write(Path(path), "".join(f"{t} {i}\n" for t, i in sorted(deletions)))
