"""Depth-first branch and bound over the LP relaxation."""

from __future__ import annotations

import math
import os
import time

import numpy as np

from .model import FEAS_TOL, INFEASIBLE, INT_TOL, OPTIMAL, TIMEOUT, LinearModel, LPTimeout, Solution
from .simplex import solve_lp

DEFAULT_BUDGET = 60.0
BUDGET_ENV = "FIHKIT_SOLVER_BUDGET"
NO_INCUMBENT = "timeout-no-incumbent"


def default_budget() -> float:
    raw = os.environ.get(BUDGET_ENV)
    if raw:
        value = float(raw)
        if value <= 0:
            raise ValueError(f"{BUDGET_ENV} must be positive, got {raw}")
        return value
    return DEFAULT_BUDGET


def round_up(model: LinearModel, x) -> np.ndarray:
    """Ceil every integer variable; feasible for covering rows with non-negative coefficients."""
    _, lo, hi, integ = model.arrays()
    y = np.array(x, dtype=np.float64)
    y[integ] = np.ceil(y[integ] - INT_TOL)
    return np.clip(y, lo, hi)


def _most_fractional(x, integ) -> int:
    frac = np.abs(x - np.round(x))
    frac[~integ] = 0.0
    frac[frac <= INT_TOL] = 0.0
    if not frac.any():
        return -1
    return int(np.argmax(frac))  # first index among the most fractional


def solve_ilp(
    model: LinearModel, budget: float | None = None, lp_method: str = "auto", strict: bool = False
) -> Solution:
    """Exact 0/1 optimum, or the best incumbent if ``budget`` seconds run out.

    The root relaxation is always solved unless ``strict``, in which case
    every LP, the root included, is cut off at the deadline.

    Branching picks the most fractional integer variable (lowest index on
    ties) and explores the up branch first. With an integral objective a
    node is pruned once ``ceil(bound) >= incumbent``. The returned trace
    lists ``(node, parent, bound)`` per solved node, ``bound`` being None
    for infeasible nodes.
    """
    budget = default_budget() if budget is None else float(budget)
    deadline = time.monotonic() + budget
    _, lo0, hi0, integ = model.arrays()
    integral = model.integral_objective()
    notes: list = []
    trace: list = []

    best_x = None
    best_obj = math.inf
    root_x = None
    stack = [(lo0.copy(), hi0.copy(), 0, -1)]
    next_id = 1
    nodes = 0
    timed_out = False

    while stack:
        if nodes and time.monotonic() > deadline:  # the root is always solved
            timed_out = True
            break
        lo, hi, node, parent = stack.pop()
        limit = deadline - time.monotonic() if (nodes or strict) else None
        try:
            relax = solve_lp(model, lo, hi, method=lp_method, time_limit=limit)
        except LPTimeout:
            timed_out = True
            break
        nodes += 1
        if relax.status == INFEASIBLE:
            trace.append((node, parent, None))
            continue
        bound = relax.objective_value
        trace.append((node, parent, bound))
        x = relax.values
        if root_x is None:
            root_x = x
            can_round = model.rounding is not None or _covering(model)
        if can_round and _most_fractional(x, integ) >= 0:
            # primal heuristic at every node; only ever adds incumbents
            cand = model.rounding(model, x) if model.rounding else round_up(model, x)
            if model.is_feasible(cand):
                obj = model.objective_value(cand)
                if obj < best_obj - FEAS_TOL:
                    best_x, best_obj = cand, obj
        cutoff = math.ceil(bound - FEAS_TOL) if integral else bound + FEAS_TOL
        if cutoff >= best_obj - (0 if integral else FEAS_TOL):
            continue
        j = _most_fractional(x, integ)
        if j < 0:
            xi = x.copy()
            xi[integ] = np.round(xi[integ])
            if model.is_feasible(xi):
                best_x, best_obj = xi, model.objective_value(xi)
                continue
            notes.append(f"node {node}: rounded vertex violates rows, dropped")
            continue
        v = x[j]
        down_hi = hi.copy()
        down_hi[j] = math.floor(v)
        up_lo = lo.copy()
        up_lo[j] = down_hi[j] + 1
        if down_hi[j] >= lo[j]:
            stack.append((lo, down_hi, next_id, node))
            next_id += 1
        if up_lo[j] <= hi[j]:
            stack.append((up_lo, hi, next_id, node))
            next_id += 1

    if timed_out:
        notes.append(f"solver budget of {budget:g}s expired after {nodes} nodes")
        if best_x is None and root_x is not None:
            cand = model.rounding(model, root_x) if model.rounding else round_up(model, root_x)
            if model.is_feasible(cand):
                best_x, best_obj = cand, model.objective_value(cand)
                notes.append("returning rounded relaxation")
        if best_x is None:
            return Solution(NO_INCUMBENT, np.full(model.n_vars, np.nan), math.nan, nodes, trace, notes)
        return Solution(TIMEOUT, best_x, best_obj, nodes, trace, notes)
    if best_x is None:
        return Solution(INFEASIBLE, np.full(model.n_vars, np.nan), math.nan, nodes, trace, notes)
    return Solution(OPTIMAL, best_x, best_obj, nodes, trace, notes)


def _covering(model: LinearModel) -> bool:
    return all(r.sense == ">=" and np.all(r.coefs >= 0) for r in model.constraints)
