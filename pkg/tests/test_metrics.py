from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import A, B, C, small_rows
from fihkit import TransactionDatabase, expand_sensitive, mine_frequent, revised_frequent
from fihkit.hiding import BUILTIN_IDS, HidingResult, SanitizationPlan, apply_plan, hide
from fihkit.metrics import IntegrityError, evaluate, information_loss, raw_changes, side_effects
from oracles import naive_information_loss, naive_side_effects


def _toy_eval(toy, pairs, sens=((A, B),), sigma=3, **kw):
    f = mine_frequent(toy, sigma)
    rev = revised_frequent(f, expand_sensitive(f, sens))
    plan = SanitizationPlan(pairs, "manual", 0.0123456)
    return evaluate(toy, HidingResult(plan, apply_plan(toy, plan)), f, rev, sigma, "toy", **kw)


def test_toy_information_loss(toy):
    r = _toy_eval(toy, [(2, A)])
    assert r.information_loss == Fraction(1, 19)
    assert r.side_effects == 0 and r.raw_changes == 1 and r.hidden_ok


def test_toy_side_effect(toy):
    r = _toy_eval(toy, [(1, A)])
    assert r.side_effects == 1
    assert r.information_loss == Fraction(2, 19)


def test_toy_items_only(toy):
    # revised singletons a=4 b=4 c=5; deleting a from t2 costs one of 13
    assert _toy_eval(toy, [(2, A)], items_only=True).information_loss == Fraction(1, 13)


def test_unhidden_run_is_flagged(toy):
    r = _toy_eval(toy, [])
    assert not r.hidden_ok and r.side_effects == 0 and r.information_loss == 0


def test_cpu_time_rounded(toy):
    assert _toy_eval(toy, [(2, A)]).cpu_time == 0.012


def test_as_row(toy):
    row = _toy_eval(toy, [(2, A)]).as_row()
    assert row["information_loss"] == pytest.approx(1 / 19) and row["algorithm_id"] == "manual"


def test_empty_revised_has_zero_loss(toy):
    assert information_loss({}, toy) == 0


def test_negative_side_effects_rejected():
    with pytest.raises(IntegrityError):
        side_effects([(1,)], [(1,), (2,)])


def test_raw_changes():
    assert raw_changes(SanitizationPlan([(1, 2), (3, 4)])) == 2


@settings(max_examples=30)
@given(small_rows(max_items=6, max_rows=16, min_rows=1), st.integers(1, 4), st.data())
def test_metrics_match_naive(rows, sigma, data):
    db = TransactionDatabase.from_transactions(rows)
    f = mine_frequent(db, sigma)
    pool = [x for x in f]
    if not pool:
        return
    sens = data.draw(st.lists(st.sampled_from(pool), min_size=1, max_size=3, unique=True))
    rev = revised_frequent(f, expand_sensitive(f, sens))
    for alg in BUILTIN_IDS:
        res = hide(alg, db, sens, sigma, frequent=f, budget=10)
        rep = evaluate(db, res, f, rev, sigma, "x")
        after = [set(t.items) for t in res.sanitized]
        assert rep.information_loss == naive_information_loss(rows, after, rev)
        assert rep.side_effects == naive_side_effects(rows, after, sens, sigma)
        assert rep.hidden_ok
        assert 0 <= rep.information_loss <= 1 and rep.side_effects >= 0
