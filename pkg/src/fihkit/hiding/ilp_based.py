"""Algorithms driven by integer programs: the Max-Accuracy family and Inline."""

from __future__ import annotations

import numpy as np

from ..dataset import encode_itemsets
from ..miner import covers
from ..ilp import (
    build_cell_model,
    build_transaction_model,
    default_budget,
    solve_cell_model,
    solve_ilp,
)
from .context import HidingContext
from .plan import greedy_victims, sanitize_transactions
from .types import HidingError, SanitizationPlan


def _select(ctx: HidingContext, costs, budget, algorithm: str):
    model = build_transaction_model(ctx.db, ctx.targets, ctx.sigma_min, costs)
    sol = solve_ilp(model, budget=budget)
    if not sol.ok:
        raise HidingError(f"{algorithm}: transaction program {sol.status}")
    chosen = [model.var_tags[j] for j in np.flatnonzero(sol.values > 0.5)]
    plan = sanitize_transactions(ctx.db, chosen, ctx.targets, ctx.sigma_min)
    notes = list(sol.notes)
    if sol.status != "optimal":
        notes.append(f"{algorithm}: solver stopped with {sol.status}")
    return plan, notes


def max_accuracy(ctx: HidingContext, budget=None, **_):
    """Fewest transactions to sanitize, then greedy item removal inside them."""
    return _select(ctx, None, budget, "max-accuracy")


def information_weights(ctx: HidingContext) -> np.ndarray:
    """1 + number of non-sensitive frequent itemsets each transaction supports (by row)."""
    revised = list(ctx.revised)
    if not revised:
        return np.ones(ctx.db.n_transactions)
    iptr, icodes = encode_itemsets(ctx.db, revised)
    return 1.0 + ctx.db.vertical.cover_hist(iptr, icodes).astype(np.float64)


def coeff_max_accuracy(ctx: HidingContext, budget=None, **_):
    """Max-Accuracy weighted toward transactions carrying little frequent information."""
    return _select(ctx, information_weights(ctx), budget, "coeff-max-accuracy")


def victim_counts(ctx: HidingContext) -> dict:
    """Greedy deletions needed to sanitize each candidate transaction, by tid."""
    out = {}
    targets = ctx.targets
    ptr, rows = covers(ctx.db, targets)
    for r in np.unique(rows).tolist():
        out[r + 1] = len(greedy_victims(ctx.db.row(r + 1), targets))
    return out


def heuristic_coeff(ctx: HidingContext, budget=None, **_):
    """Max-Accuracy with each transaction costed by its greedy deletion count."""
    return _select(ctx, victim_counts(ctx), budget, "heuristic-coeff")


def inline(ctx: HidingContext, budget=None, exact_border=False, **_):
    """Cell-level program protecting the positive border, relaxed when infeasible."""
    budget = default_budget() if budget is None else float(budget)
    cm = build_cell_model(ctx.db, ctx.targets, ctx.border, ctx.sigma_min, exact_border=exact_border)
    sol, relaxed = solve_cell_model(cm, budget=budget)
    notes = list(sol.notes)
    if not sol.ok:
        raise HidingError(f"inline: cell program {sol.status}")
    for x in relaxed:
        notes.append(f"relaxed border row {x}")
    if sol.status != "optimal":
        notes.append(f"inline: solver stopped with {sol.status}")
    n_cells = len(cm.cells)
    chosen = np.flatnonzero(sol.values[:n_cells] > 0.5)
    return SanitizationPlan([cm.cells[j] for j in chosen.tolist()]), notes
