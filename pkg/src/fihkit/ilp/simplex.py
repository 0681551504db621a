"""LP relaxations: a dense bounded-variable primal simplex with Bland's rule.

Large sparse relaxations (the cell models on dense data) are handed to
HiGHS through scipy instead; ``method="auto"`` picks by tableau size.
"""

from __future__ import annotations

import numpy as np

from .model import INFEASIBLE, OPTIMAL, LinearModel, LPTimeout, ModelError, Solution, UnboundedError

PIVOT_TOL = 1e-9
COST_TOL = 1e-9
PHASE1_TOL = 1e-7
DENSE_LIMIT = 4_000_000  # tableau cells above which "auto" switches to HiGHS


def solve_lp(
    model: LinearModel, lo=None, hi=None, method: str = "auto", time_limit: float | None = None
) -> Solution:
    """Optimal basic solution of the relaxation (integrality ignored).

    ``lo``/``hi`` override the model's bounds (branch-and-bound nodes use
    this). Raises :class:`UnboundedError` if the objective is unbounded.
    ``time_limit`` (seconds) applies to HiGHS only; the dense simplex is
    small enough to run to completion. :class:`LPTimeout` signals expiry.
    """
    c, mlo, mhi, _ = model.arrays()
    lo = mlo if lo is None else np.asarray(lo, dtype=np.float64)
    hi = mhi if hi is None else np.asarray(hi, dtype=np.float64)
    if np.any(~np.isfinite(lo)):
        raise ModelError("variables need finite lower bounds")
    if np.any(lo > hi + 1e-12):
        return Solution(INFEASIBLE, np.full(model.n_vars, np.nan), float("nan"))
    if method == "auto":
        cells = model.n_rows * (model.n_vars + 2 * model.n_rows)
        method = "simplex" if cells <= DENSE_LIMIT else "highs"
    if method == "simplex":
        status, x = dense_simplex(model.matrix().toarray(), model.senses(), model.rhs(), c, lo, hi)
    elif method == "highs":
        status, x = _highs_lp(model, c, lo, hi, time_limit)
    else:
        raise ValueError(f"unknown LP method {method!r}")
    if status == INFEASIBLE:
        return Solution(INFEASIBLE, np.full(model.n_vars, np.nan), float("nan"))
    return Solution(OPTIMAL, x, float(c @ x))


def dense_simplex(A, senses, b, c, lo, hi, max_iter=None):
    """Two-phase bounded primal simplex on a dense tableau.

    Entering variable: lowest index with an improving reduced cost.
    Leaving variable: minimum ratio, ties to the lowest variable index.
    A nonbasic variable moving to its own opposite bound is a bound flip and
    needs no pivot. Returns ``(status, x)``.
    """
    A = np.asarray(A, dtype=np.float64)
    m, n = A.shape
    b = np.asarray(b, dtype=np.float64)
    ub_struct = hi - lo
    rhs = b - A @ lo if n else b.copy()

    ineq = [i for i in range(m) if senses[i] != "="]
    slack_col = {}
    for k, i in enumerate(ineq):
        slack_col[i] = n + k
    n_s = len(ineq)
    sign = np.where(rhs < 0, -1.0, 1.0)
    need_art = []
    for i in range(m):
        s = senses[i]
        slack_coef = (1.0 if s == "<=" else -1.0) * sign[i] if s != "=" else 0.0
        if slack_coef <= 0:
            need_art.append(i)
    n_a = len(need_art)
    N = n + n_s + n_a
    T = np.zeros((m, N))
    T[:, :n] = A
    for i in ineq:
        T[i, slack_col[i]] = 1.0 if senses[i] == "<=" else -1.0
    T *= sign[:, None]
    beta = rhs * sign
    basis = np.empty(m, dtype=np.int64)
    art_cols = np.arange(n + n_s, N)
    for k, i in enumerate(need_art):
        T[i, n + n_s + k] = 1.0
        basis[i] = n + n_s + k
    for i in range(m):
        if i not in need_art:
            basis[i] = slack_col[i]

    ub = np.concatenate((ub_struct, np.full(n_s + n_a, np.inf)))
    at_upper = np.zeros(N, dtype=bool)
    barred = np.zeros(N, dtype=bool)
    limit = max_iter or 100 * (N + m) + 10_000

    if n_a:
        cost1 = np.zeros(N)
        cost1[art_cols] = 1.0
        d = cost1 - cost1[basis] @ T
        _iterate(T, beta, d, basis, at_upper, ub, barred, limit)
        infeas = float(beta[np.isin(basis, art_cols)].sum())
        if infeas > PHASE1_TOL * max(1.0, float(np.abs(rhs).max(initial=0.0))):
            return INFEASIBLE, None
        ub[art_cols] = 0.0
        barred[art_cols] = True

    cost2 = np.zeros(N)
    cost2[:n] = c
    d = cost2 - cost2[basis] @ T
    if not _iterate(T, beta, d, basis, at_upper, ub, barred, limit):
        raise UnboundedError("LP relaxation is unbounded")

    y = np.where(at_upper, ub, 0.0)
    y[basis] = beta
    x = lo + y[:n]
    return OPTIMAL, np.clip(x, lo, hi)


def _iterate(T, beta, d, basis, at_upper, ub, barred, limit) -> bool:
    """Run primal iterations to optimality; False if unbounded."""
    m, N = T.shape
    is_basic = np.zeros(N, dtype=bool)
    is_basic[basis] = True
    movable = ~barred & (ub > 0)
    for _ in range(limit):
        elig = movable & ~is_basic & np.where(at_upper, d > COST_TOL, d < -COST_TOL)
        cand = np.flatnonzero(elig)
        if cand.size == 0:
            return True
        j = int(cand[0])
        direction = -1.0 if at_upper[j] else 1.0
        da = direction * T[:, j]

        step = ub[j]
        row = -1
        hits_upper = False
        if m:
            ratios = np.full(m, np.inf)
            dec = da > PIVOT_TOL
            ratios[dec] = np.maximum(beta[dec], 0.0) / da[dec]
            inc = da < -PIVOT_TOL
            ubb = ub[basis]
            up = inc & np.isfinite(ubb)
            ratios[up] = np.maximum(ubb[up] - beta[up], 0.0) / -da[up]
            best = ratios.min()
            if best < step:
                ties = np.flatnonzero(ratios <= best + 1e-12)
                row = int(ties[np.argmin(basis[ties])])
                step = best
                hits_upper = bool(da[row] < 0)
        if not np.isfinite(step):
            return False
        if step:
            beta -= da * step
        if row < 0:
            at_upper[j] = not at_upper[j]
            continue
        entering_value = (ub[j] if at_upper[j] else 0.0) + direction * step
        leaving = basis[row]
        at_upper[leaving] = hits_upper
        is_basic[leaving] = False
        piv = T[row, j]
        T[row] /= piv
        col = T[:, j].copy()
        col[row] = 0.0
        T -= np.outer(col, T[row])
        d -= d[j] * T[row]
        beta[row] = entering_value
        basis[row] = j
        at_upper[j] = False
        is_basic[j] = True
    raise RuntimeError("simplex iteration limit reached")


def _highs_lp(model: LinearModel, c, lo, hi, time_limit=None):
    from scipy.optimize import linprog

    A = model.matrix()
    senses = model.senses()
    b = model.rhs()
    le = senses == "<="
    ge = senses == ">="
    eq = senses == "="
    import scipy.sparse as sp

    A_ub = sp.vstack([A[le], -A[ge]]) if (le.any() or ge.any()) else None
    b_ub = np.concatenate([b[le], -b[ge]]) if A_ub is not None else None
    A_eq = A[eq] if eq.any() else None
    b_eq = b[eq] if eq.any() else None
    bounds = np.column_stack((lo, np.where(np.isinf(hi), np.inf, hi)))
    options = {} if time_limit is None else {"time_limit": max(float(time_limit), 1e-3)}
    res = linprog(c, A_ub=A_ub, b_ub=b_ub, A_eq=A_eq, b_eq=b_eq, bounds=bounds, method="highs-ds", options=options)
    if res.status == 1 and time_limit is not None:
        raise LPTimeout(res.message)
    if res.status == 2:
        return INFEASIBLE, None
    if res.status == 3:
        raise UnboundedError("LP relaxation is unbounded")
    if res.status != 0:
        raise RuntimeError(f"HiGHS failed: {res.message}")
    return OPTIMAL, np.clip(np.asarray(res.x, dtype=np.float64), lo, hi)
