"""Border-based greedy algorithms: Max-Min 1, Max-Min 2 and WBA."""

from __future__ import annotations

import heapq
import math

import numpy as np

from .context import CoverTracker, HidingContext
from .types import SanitizationPlan


def _border_tracker(ctx: HidingContext) -> CoverTracker:
    items = set(ctx.sensitive_items)
    relevant = [x for x in ctx.border if items.intersection(x)]
    return CoverTracker(ctx.db, relevant, ctx.sensitive_items)


def _maxmin(ctx: HidingContext, spare_border: bool) -> tuple[SanitizationPlan, list]:
    targets = ctx.targets
    sens = CoverTracker(ctx.db, targets, ctx.sensitive_items)
    border = _border_tracker(ctx)
    # border itemsets containing each sensitive item column
    holders = [np.flatnonzero(border.member[:, c]) if border.itemsets else np.empty(0, np.int64)
               for c in range(len(ctx.sensitive_items))]
    sigma = ctx.sigma_min
    deletions = []
    for k, s in enumerate(targets):
        while sens.support[k] >= sigma:
            best_item, best_m = None, -1.0
            for i in s:
                h = holders[border.col_of[i]]
                m = float(border.support[h].min()) if h.size else math.inf
                if m > best_m:
                    best_item, best_m = i, m
            rows = sens.supporters(k)
            victim = int(rows[0])
            if spare_border and math.isfinite(best_m):
                h = holders[border.col_of[best_item]]
                tight = h[border.support[h] == best_m]
                bad = np.zeros(ctx.db.n_transactions, dtype=bool)
                for x in tight.tolist():
                    bad[border.supporters(x)] = True
                spare = rows[~bad[rows]]
                if spare.size:
                    victim = int(spare[0])
            deletions.append((victim + 1, best_item))
            sens.delete(victim, best_item)
            border.delete(victim, best_item)
    return SanitizationPlan(deletions), []


def maxmin1(ctx: HidingContext, **_):
    """Delete the item whose weakest border itemset is strongest, from the lowest supporting tid."""
    return _maxmin(ctx, spare_border=False)


def maxmin2(ctx: HidingContext, **_):
    """As Max-Min 1, but prefer a victim outside the weakest border itemsets' covers."""
    return _maxmin(ctx, spare_border=True)


def wba(ctx: HidingContext, **_):
    """Greedy cell deletion weighted by border support.

    A candidate (t, i) costs the summed support of border itemsets X with
    i in X, X still inside t. The cheapest candidate is deleted; ties go
    to the candidate breaking more unhidden sensitive itemsets, then to the
    smallest tid and item.
    """
    targets = ctx.targets
    cols = ctx.sensitive_items
    sens = CoverTracker(ctx.db, targets, cols)
    border = _border_tracker(ctx)
    weights = np.array([ctx.frequent[x] for x in border.itemsets], dtype=np.float64)
    sigma = ctx.sigma_min
    unhidden = (sens.support >= sigma).astype(np.float64)
    version = {}
    heap: list = []

    def push_row(row):
        v = version.get(row, 0) + 1
        version[row] = v
        cost = border.row_weights(row, weights)
        gain = sens.row_weights(row, unhidden)
        for c in np.flatnonzero(gain > 0).tolist():
            heapq.heappush(heap, (float(cost[c]), -float(gain[c]), row + 1, cols[c], v))

    rows0 = np.unique(np.concatenate([sens.supporters(k) for k in range(len(targets))])) if targets else []
    for r in rows0:
        push_row(int(r))

    deletions = []
    remaining = int(unhidden.sum())
    while remaining and heap:
        cost, neg_gain, tid, item, v = heapq.heappop(heap)
        row = tid - 1
        if version[row] != v:
            continue
        c = sens.col_of[item]
        gain = float(sens.row_weights(row, unhidden)[c])
        if gain <= 0:
            continue
        if gain != -neg_gain:
            heapq.heappush(heap, (cost, -gain, tid, item, v))
            continue
        deletions.append((tid, item))
        for k in sens.delete(row, item).tolist():
            if unhidden[k] and sens.support[k] < sigma:
                unhidden[k] = 0.0
                remaining -= 1
        border.delete(row, item)
        push_row(row)
    return SanitizationPlan(deletions), []
