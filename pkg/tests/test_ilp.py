import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import A, B, C, small_rows
from fihkit import TransactionDatabase, support
from fihkit.ilp import (
    INFEASIBLE,
    NO_INCUMBENT,
    OPTIMAL,
    TIMEOUT,
    LinearModel,
    LPTimeout,
    NothingToHide,
    UnboundedError,
    build_cell_model,
    build_transaction_model,
    default_budget,
    solve_cell_model,
    solve_ilp,
    solve_lp,
)
from fihkit.ilp.simplex import dense_simplex
from oracles import apply_pairs, brute_ilp, brute_min_cells, brute_support, model_rows


def _chosen(model, sol):
    return sorted(model.var_tags[j] for j in np.flatnonzero(sol.values > 0.5))


# ---------------------------------------------------------------- builders


def test_transaction_model_toy(toy):
    m = build_transaction_model(toy, [(A, B)], 3)
    assert m.var_tags == [1, 2, 5]
    assert m.objective == [1.0, 1.0, 1.0]
    (row,) = m.constraints
    assert row.indices.tolist() == [0, 1, 2] and row.sense == ">=" and row.rhs == 1
    assert brute_ilp(m.objective, model_rows(m))[0] == 1


def test_transaction_model_two_itemsets(toy):
    m = build_transaction_model(toy, [(A, B), (A, C)], 3)
    assert m.var_tags == [1, 2, 3, 5]
    assert [(r.sense, r.rhs) for r in m.constraints] == [(">=", 1), (">=", 1)]


def test_rhs_counts_excess_support(toy):
    m = build_transaction_model(toy, [(C,)], 2)
    assert m.constraints[0].rhs == 5 - 2 + 1


@pytest.mark.parametrize("costs", [{1: 3, 2: 1, 5: 2}, lambda t: {1: 3, 2: 1, 5: 2}[t], [3, 1, 0, 0, 2, 0]])
def test_transaction_costs_forms(toy, costs):
    m = build_transaction_model(toy, [(A, B)], 3, costs=costs)
    assert m.objective == [3.0, 1.0, 2.0]
    assert _chosen(m, solve_ilp(m)) == [2]


def test_nothing_to_hide(toy):
    with pytest.raises(NothingToHide):
        build_transaction_model(toy, [], 3)
    with pytest.raises(NothingToHide):
        build_cell_model(toy, [(A, B, C)], [], 3)


def test_already_hidden_member_noted(toy, caplog):
    m = build_transaction_model(toy, [(A, B), (A, B, C)], 3)
    assert len(m.constraints) == 1
    assert any("already hidden" in n for n in m.notes)


def test_cell_model_toy_with_border(toy):
    cm = build_cell_model(toy, [(A, B)], [(A, C), (B, C)], 3)
    assert cm.cells == [(1, A), (1, B), (2, A), (2, B), (5, A), (5, B)]
    sol, relaxed = solve_cell_model(cm)
    assert sol.status == OPTIMAL and relaxed == []
    picked = [cm.cells[j] for j in range(len(cm.cells)) if sol.values[j] > 0.5]
    assert picked in ([(2, A)], [(2, B)])
    # exhaustive: the only single cells keeping ac and bc at support 3
    keep = lambda rows: brute_support(rows, (A, C)) < 3 or brute_support(rows, (B, C)) < 3  # noqa: E731
    k, found = brute_min_cells([set(t.items) for t in toy], [(A, B)], 3, forbid=keep)
    assert k == 1 and sorted(found) == [((2, A),), ((2, B),)]


def test_cell_model_without_border(toy):
    cm = build_cell_model(toy, [(A, B)], [], 3)
    assert cm.border_rows == []
    sol, _ = solve_cell_model(cm)
    assert sol.objective_value == 1


def test_exact_border_flag(toy):
    cm = build_cell_model(toy, [(A, B)], [(A, C), (B, C)], 3, exact_border=True)
    assert any(isinstance(t, tuple) and t[0] == "w" for t in cm.model.var_tags)
    sol, relaxed = solve_cell_model(cm)
    assert sol.objective_value == 1 and relaxed == []


def test_tight_border_is_relaxed():
    # every supporter of ab also supports ac and bc, both with zero slack
    rows = [{A, B, C}, {A, B, C}, {A, B, C}, {C}]
    db = TransactionDatabase.from_transactions(rows)
    cm = build_cell_model(db, [(A, B)], [(A, C), (B, C)], 3)
    sol, relaxed = solve_cell_model(cm, budget=10)
    assert sol.ok and relaxed
    picked = [cm.cells[j] for j in range(len(cm.cells)) if sol.values[j] > 0.5]
    assert support(db.__class__.from_transactions(apply_pairs(rows, picked)), (A, B)) < 3
    assert sol.objective_value == brute_min_cells(rows, [(A, B)], 3)[0]


# ---------------------------------------------------------------- LP


def test_lp_toy_relaxation(toy):
    sol = solve_lp(build_transaction_model(toy, [(A, B)], 3))
    assert sol.status == OPTIMAL and sol.objective_value == pytest.approx(1.0)


def test_lp_contradiction():
    m = LinearModel()
    m.add_var("x", 1.0, 0.0, 1.0, False)
    m.add_constraint([0], [1.0], ">=", 1)
    m.add_constraint([0], [1.0], "<=", 0)
    assert solve_lp(m).status == INFEASIBLE
    assert solve_ilp(m).status == INFEASIBLE


def test_lp_empty_model():
    sol = solve_lp(LinearModel())
    assert sol.status == OPTIMAL and sol.objective_value == 0
    assert solve_ilp(LinearModel()).objective_value == 0


def test_lp_unbounded_detected():
    m = LinearModel()
    m.add_var("x", -1.0, 0.0, math.inf, False)
    m.add_constraint([0], [1.0], ">=", 1)
    with pytest.raises(UnboundedError):
        solve_lp(m, method="simplex")


def test_dense_and_highs_agree():
    rng = np.random.default_rng(3)
    for _ in range(40):
        m = _random_cover(rng, 8, 4)
        a = solve_lp(m, method="simplex")
        b = solve_lp(m, method="highs")
        assert a.status == b.status
        if a.status == OPTIMAL:
            assert a.objective_value == pytest.approx(b.objective_value, abs=1e-7)


def test_dense_simplex_equality_rows():
    a = np.array([[1.0, 1.0], [1.0, -1.0]])
    status, x = dense_simplex(a, np.array(["=", ">="]), np.array([1.0, 0.0]), np.array([1.0, 2.0]),
                              np.zeros(2), np.ones(2))
    assert status == OPTIMAL and x.tolist() == pytest.approx([1.0, 0.0])


# ---------------------------------------------------------------- ILP


def _random_cover(rng, n_vars, n_rows):
    m = LinearModel()
    for j in range(n_vars):
        m.add_var(j + 1, float(rng.integers(1, 6)), 0.0, 1.0, True)
    for _ in range(n_rows):
        k = int(rng.integers(1, n_vars + 1))
        idx = np.sort(rng.choice(n_vars, size=k, replace=False))
        m.add_constraint(idx, np.ones(k), ">=", int(rng.integers(1, k + 1)))
    return m


def _check_trace(sol):
    bounds = {node: bound for node, _, bound in sol.trace}
    for node, parent, bound in sol.trace:
        if parent is not None and bound is not None and bounds.get(parent) is not None:
            assert bound >= bounds[parent] - 1e-7


def test_toy_ilp(toy):
    m = build_transaction_model(toy, [(A, B)], 3)
    sol = solve_ilp(m)
    assert sol.status == OPTIMAL and sol.objective_value == 1
    assert int(round(sol.values.sum())) == 1


def test_integral_relaxation_needs_no_branching(toy):
    m = build_transaction_model(toy, [(A, B), (A, C)], 3)
    lp, ilp = solve_lp(m), solve_ilp(m)
    if np.allclose(lp.values, np.round(lp.values)):
        assert ilp.nodes == 1 and np.array_equal(np.round(lp.values), ilp.values)


def test_fifteen_candidates_against_exhaustive():
    rng = np.random.default_rng(15)
    rows = [set(rng.choice(6, size=rng.integers(1, 5), replace=False).tolist()) for _ in range(15)]
    db = TransactionDatabase.from_transactions(rows)
    sens = [(0, 1), (2, 3), (1, 4)]
    sigma = max(1, min(brute_support(rows, s) for s in sens) - 1)
    m = build_transaction_model(db, [s for s in sens if brute_support(rows, s) >= sigma], sigma)
    best, _ = brute_ilp(m.objective, model_rows(m))
    assert solve_ilp(m).objective_value == best


@pytest.mark.parametrize("seed", range(30))
def test_random_covers_match_brute(seed):
    rng = np.random.default_rng(1000 + seed)
    m = _random_cover(rng, int(rng.integers(1, 13)), int(rng.integers(1, 6)))
    best, _ = brute_ilp(m.objective, model_rows(m))
    sol = solve_ilp(m)
    lp = solve_lp(m)
    if best is None:
        assert sol.status == INFEASIBLE
    else:
        assert sol.status == OPTIMAL and sol.objective_value == pytest.approx(best)
        assert m.is_feasible(sol.values)
        assert sol.objective_value >= lp.objective_value - 1e-7
    _check_trace(sol)


def test_general_rows_match_brute():
    rng = np.random.default_rng(77)
    for _ in range(25):
        n = int(rng.integers(2, 9))
        m = LinearModel()
        for j in range(n):
            m.add_var(j, float(rng.integers(-3, 6)), 0.0, 1.0, True)
        for _ in range(int(rng.integers(1, 5))):
            idx = np.arange(n)
            coefs = rng.integers(-2, 3, n).astype(float)
            m.add_constraint(idx, coefs, str(rng.choice(["<=", ">=", "="])), float(rng.integers(-1, 3)))
        best, _ = brute_ilp(m.objective, model_rows(m))
        sol = solve_ilp(m)
        if best is None:
            assert sol.status == INFEASIBLE
        else:
            assert sol.objective_value == pytest.approx(best)


@settings(max_examples=40)
@given(small_rows(max_items=5, max_rows=12, min_rows=1), st.integers(1, 3), st.data())
def test_transaction_model_hides(rows, sigma, data):
    db = TransactionDatabase.from_transactions(rows)
    pool = [x for k in (1, 2) for x in itertools.combinations(range(1, 6), k) if brute_support(rows, x) >= sigma]
    if not pool:
        return
    sens = data.draw(st.lists(st.sampled_from(pool), min_size=1, max_size=3, unique=True))
    m = build_transaction_model(db, sens, sigma)
    sol = solve_ilp(m)
    assert sol.status == OPTIMAL
    chosen = set(_chosen(m, sol))
    after = [set() if t + 1 in chosen else r for t, r in enumerate(rows)]
    assert all(brute_support(after, s) < sigma for s in sens)


def test_deterministic_solves():
    rng = np.random.default_rng(5)
    m = _random_cover(rng, 14, 6)
    a, b = solve_ilp(m), solve_ilp(m)
    assert np.array_equal(a.values, b.values) and a.trace == b.trace


def test_budget_env(monkeypatch):
    monkeypatch.setenv("FIHKIT_SOLVER_BUDGET", "2.5")
    assert default_budget() == 2.5
    monkeypatch.delenv("FIHKIT_SOLVER_BUDGET")
    assert default_budget() == 60


def test_timeout_returns_rounded_incumbent():
    rng = np.random.default_rng(9)
    m = _random_cover(rng, 40, 30)
    sol = solve_ilp(m, budget=0.0)
    assert sol.status in (TIMEOUT, OPTIMAL)
    assert m.is_feasible(sol.values)


def test_timeout_without_incumbent():
    m = LinearModel()
    for j in range(6):
        m.add_var(j, 1.0, 0.0, 1.0, True)
    m.add_constraint(list(range(6)), [2.0] * 6, "=", 5)  # odd rhs, no integral point
    sol = solve_ilp(m, budget=0.0)
    assert sol.status in (NO_INCUMBENT, INFEASIBLE)
    assert not sol.ok


def test_highs_time_limit():
    m = _random_cover(np.random.default_rng(3), 3000, 1500)
    with pytest.raises(LPTimeout):
        solve_lp(m, method="highs", time_limit=1e-4)
    assert solve_ilp(m, budget=0.0, lp_method="highs", strict=True).status == NO_INCUMBENT
    assert solve_ilp(m, budget=0.0, lp_method="highs").ok  # root always solved


def test_lp_export(toy, tmp_path):
    m = build_transaction_model(toy, [(A, B)], 3)
    text = m.to_lp_text()
    assert text.startswith("\\ fihkit model\nMinimize")
    assert "c0_hide_1-2: 1 x0_1 + 1 x1_2 + 1 x2_5 >= 1" in text
    assert "Binaries" in text and text.endswith("End\n")
    p = tmp_path / "m.lp"
    m.write_lp(p)
    assert p.read_text() == text


def test_duplicate_rows_removed(toy):
    m = build_transaction_model(toy, [(A, B)], 3)
    r = m.constraints[0]
    m.add_constraint(r.indices, r.coefs, r.sense, r.rhs)
    assert m.without_duplicate_rows().n_rows == 1
