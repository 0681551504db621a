"""Integer programs for hiding: transaction selection and cell deletion."""

from __future__ import annotations

import logging
import time
from dataclasses import dataclass, field

import numpy as np

from ..borders import as_sensitive
from ..dataset import TransactionDatabase
from ..miner import canonical, covers, support_map
from .branch_bound import default_budget, solve_ilp
from .model import FEAS_TOL, INFEASIBLE, TIMEOUT, LinearModel, Solution

log = logging.getLogger(__name__)


MIN_SLICE = 0.5  # seconds granted to a stage once the budget is spent


class NothingToHide(ValueError):
    """No sensitive itemset is frequent, so there is no model to build."""


def hideable(db: TransactionDatabase, sensitive, sigma_min: int):
    """Split ``sensitive`` into (frequent members, their supports, already-hidden members)."""
    sens = list(as_sensitive(sensitive))
    sup = support_map(db, sens)
    kept = [s for s in sens if sup[s] >= sigma_min]
    dropped = [s for s in sens if sup[s] < sigma_min]
    for s in dropped:
        log.warning("sensitive itemset %s already below sigma_min=%d (support %d)", s, sigma_min, sup[s])
    return kept, sup, dropped


def _prepare(db, sensitive, sigma_min):
    kept, sup, dropped = hideable(db, sensitive, sigma_min)
    if not kept:
        raise NothingToHide("no sensitive itemset reaches sigma_min; nothing to hide")
    notes = [f"already hidden: {s}" for s in dropped]
    return kept, sup, notes


def build_transaction_model(db: TransactionDatabase, sensitive, sigma_min: int, costs=None) -> LinearModel:
    """One binary per supporting transaction; each row forces support <= sigma_min - 1.

    ``costs`` may be a mapping tid -> cost, a callable of the tid, or an
    array indexed by ``tid - 1``; the default is unit cost.
    """
    kept, sup, notes = _prepare(db, sensitive, sigma_min)
    ptr, rows = covers(db, kept)
    cand = np.unique(rows).astype(np.int64)
    model = LinearModel(notes=notes)
    for r in cand.tolist():
        tid = r + 1
        model.add_var(tid, _cost(costs, tid), 0.0, 1.0, True)
    for k, s in enumerate(kept):
        idx = np.searchsorted(cand, rows[ptr[k] : ptr[k + 1]])
        model.add_constraint(idx, np.ones(idx.shape[0]), ">=", sup[s] - sigma_min + 1, ("hide", s))
    return model


def _cost(costs, tid) -> float:
    if costs is None:
        return 1.0
    if callable(costs):
        return float(costs(tid))
    if isinstance(costs, dict):
        return float(costs[tid])
    return float(costs[tid - 1])


@dataclass
class CellModel:
    model: LinearModel
    cells: list  # (tid, item) per u variable, in variable order
    border_rows: list = field(default_factory=list)  # (row index, border itemset)


def build_cell_model(
    db: TransactionDatabase, sensitive, border_pos, sigma_min: int, exact_border: bool = False
) -> CellModel:
    """Cell-deletion program with border protection.

    u_{t,i} deletes item i from t. z_{t,s} is forced to 1 while s is intact
    in t, and at most ``sigma_min - 1`` supporters of s may stay intact.
    Each positive-border itemset X bounds the deletions touching it by its
    slack ``support(X) - sigma_min``; with ``exact_border`` the bound counts
    damaged transactions instead of deleted cells.
    """
    kept, sup, notes = _prepare(db, sensitive, sigma_min)
    ptr, rows = covers(db, kept)
    cell_key: dict = {}
    cells: list = []
    per_s: list = []
    for k, s in enumerate(kept):
        tids = (rows[ptr[k] : ptr[k + 1]].astype(np.int64) + 1).tolist()
        per_s.append(tids)
        for t in tids:
            for i in s:
                if (t, i) not in cell_key:
                    cell_key[(t, i)] = None
    cells = sorted(cell_key)
    model = LinearModel(notes=notes)
    for j, c in enumerate(cells):
        cell_key[c] = j
        model.add_var(c, 1.0, 0.0, 1.0, True)

    for s, tids in zip(kept, per_s):
        z_idx = []
        for t in tids:
            z = model.add_var(("z", t, s), 0.0, 0.0, 1.0, True)
            z_idx.append(z)
            idx = [cell_key[(t, i)] for i in s] + [z]
            model.add_constraint(idx, np.ones(len(idx)), ">=", 1.0, ("intact", t, s))
        model.add_constraint(z_idx, np.ones(len(z_idx)), "<=", sigma_min - 1, ("hide", s))

    border = [canonical(x) for x in border_pos]
    bsup = support_map(db, border) if border else {}
    border_rows = []
    if border:
        bptr, brows = covers(db, border)
        for k, x in enumerate(border):
            slack = bsup[x] - sigma_min
            tids = (brows[bptr[k] : bptr[k + 1]].astype(np.int64) + 1).tolist()
            touched = {t: [cell_key[(t, i)] for i in x if (t, i) in cell_key] for t in tids}
            touched = {t: v for t, v in touched.items() if v}
            if not touched:
                continue
            if exact_border:
                w_idx = []
                for t in sorted(touched):
                    w = model.add_var(("w", t, x), 0.0, 0.0, 1.0, True)
                    w_idx.append(w)
                    for u in touched[t]:
                        model.add_constraint([u, w], [1.0, -1.0], "<=", 0.0, ("damage", t, x))
                row = model.add_constraint(w_idx, np.ones(len(w_idx)), "<=", slack, ("border", x))
            else:
                idx = [u for t in sorted(touched) for u in touched[t]]
                row = model.add_constraint(idx, np.ones(len(idx)), "<=", slack, ("border", x))
            border_rows.append((row, x))
    model.rounding = _cell_rounding
    return CellModel(model, cells, border_rows)


def _cell_rounding(model: LinearModel, x) -> np.ndarray:
    """Keep whole deletions, then add just enough to hide each itemset.

    Per sensitive itemset, intact supporters are cut in order of the LP's
    largest deletion value among their cells (ties by tid), deleting that
    cell (ties by item). Intact and damage flags are then recomputed.
    """
    x = np.asarray(x, dtype=np.float64)
    y = np.zeros_like(x)
    tags = model.var_tags
    u_of: dict = {}
    z_of: dict = {}
    for j, t in enumerate(tags):
        if isinstance(t, tuple) and t and t[0] == "z":
            z_of.setdefault(t[2], []).append(t[1])
        elif not (isinstance(t, tuple) and t and t[0] == "w"):
            u_of[t] = j
            y[j] = 1.0 if x[j] >= 1.0 - 1e-6 else 0.0
    allowed = {r.tag[1]: r.rhs for r in model.constraints if isinstance(r.tag, tuple) and r.tag[0] == "hide"}
    for s, tids in z_of.items():
        intact = [t for t in tids if all(y[u_of[(t, i)]] == 0 for i in s)]
        excess = len(intact) - int(allowed.get(s, len(tids)))
        if excess <= 0:
            continue
        ranked = sorted(intact, key=lambda t: (-max(x[u_of[(t, i)]] for i in s), t))
        for t in ranked[:excess]:
            best = min(s, key=lambda i: (-x[u_of[(t, i)]], i))
            y[u_of[(t, best)]] = 1.0
    for j, t in enumerate(tags):
        if isinstance(t, tuple) and t and t[0] == "z":
            _, tid, its = t
            y[j] = 1.0 if all(y[u_of[(tid, i)]] == 0 for i in its) else 0.0
        elif isinstance(t, tuple) and t and t[0] == "w":
            _, tid, its = t
            y[j] = 1.0 if any(y[u_of[(tid, i)]] > 0 for i in its if (tid, i) in u_of) else 0.0
    return y


def _probe(model: LinearModel, budget):
    """Feasibility of ``model``: (True, values), (False, None) or (None, None) if undecided in time."""
    probe = LinearModel(
        [0.0] * model.n_vars, model.constraints, model.lo, model.hi, model.integrality, model.var_tags,
        rounding=model.rounding,
    )
    sol = solve_ilp(probe, budget=budget, strict=True)
    if sol.status == INFEASIBLE:
        return False, None
    return (True, sol.values) if sol.ok else (None, None)


def solve_cell_model(cm: CellModel, budget: float | None = None) -> tuple[Solution, list]:
    """Solve, relaxing border rows in deficit order until the program is feasible.

    Rows are ranked by how far the border-free optimum overshoots them
    (largest first, ties by itemset). Feasibility only improves as rows are
    dropped, so the shortest feasible prefix is found by bisection, starting
    from the overshot rows (dropping those is feasible by construction).
    The budget covers all stages; once it is spent the shortest prefix
    proven feasible so far is used. Returns the solution and the relaxed
    border itemsets.
    """
    budget = default_budget() if budget is None else float(budget)
    deadline = time.monotonic() + budget

    def left():
        return max(MIN_SLICE, deadline - time.monotonic())

    model = cm.model
    sol = solve_ilp(model, budget=left())
    if sol.ok or not cm.border_rows:
        return sol, []
    all_rows = [r for r, _ in cm.border_rows]
    free = solve_ilp(model.without_rows(all_rows), budget=left())
    if not free.ok:
        return free, [x for _, x in cm.border_rows]
    cons = model.constraints

    def deficit(rx):
        c = cons[rx[0]]
        return float(c.coefs @ free.values[c.indices]) - c.rhs

    ranked = sorted(cm.border_rows, key=lambda rx: (-deficit(rx), rx[1]))
    over = sum(1 for rx in ranked if deficit(rx) > FEAS_TOL)
    known = {over: free.values}  # prefix length -> a feasible point once those rows are dropped
    lo, hi = 1, over
    while lo < hi:
        if time.monotonic() >= deadline:
            free.notes.append(f"relaxation search stopped by the budget at {hi} rows")
            break
        mid = (lo + hi) // 2
        ok, x = _probe(model.without_rows([r for r, _ in ranked[:mid]]), deadline - time.monotonic())
        if ok is False:
            lo = mid + 1
        elif ok:
            hi = mid
            known[mid] = x
        else:
            free.notes.append(f"relaxation search stopped by the budget at {hi} rows")
            break
    relaxed = ranked[:hi]
    reduced = model.without_rows([r for r, _ in relaxed])
    final = solve_ilp(reduced, budget=left(), strict=True)
    if not final.ok:
        x = known[hi]
        final = Solution(TIMEOUT, x, reduced.objective_value(x), final.nodes, final.trace, final.notes)
        final.notes.append("no solve finished within the budget; using the relaxation search point")
    final.notes[:0] = free.notes
    return final, [x for _, x in relaxed]
