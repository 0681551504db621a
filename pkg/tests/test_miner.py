from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import A, B, C, small_rows
from fihkit import TransactionDatabase, mine_frequent, resolve_sigma, support, support_map
from fihkit.miner import FrequentSet, canonical, covers
from oracles import brute_frequent, brute_support


def test_toy_frequent_at_three(toy):
    f = mine_frequent(toy, 3)
    assert f.to_dict() == {(A,): 4, (B,): 4, (C,): 5, (A, B): 3, (A, C): 3, (B, C): 3}
    assert list(f) == [(A,), (B,), (C,), (A, B), (A, C), (B, C)]
    assert f.max_length == 2 and f.items_by_length(2) == [(A, B), (A, C), (B, C)]


def test_toy_frequent_at_two_includes_triple(toy):
    f = mine_frequent(toy, 2)
    assert f[(A, B, C)] == 2


def test_threshold_above_everything(toy):
    assert len(mine_frequent(toy, 7)) == 0


def test_max_length(toy):
    assert mine_frequent(toy, 1, max_length=1).max_length == 1


def test_bad_sigma(toy):
    with pytest.raises(ValueError):
        mine_frequent(toy, 0)


def test_support_edges(toy):
    assert support(toy, ()) == 6
    assert support(toy, (A, 42)) == 0
    assert support(toy, [B, A]) == 3
    assert support_map(toy, [(A, B), (B, A), (C,)]) == {(A, B): 3, (C,): 5}


def test_covers_rows(toy):
    ptr, rows = covers(toy, [(A, B), (C,)])
    assert rows[ptr[0]:ptr[1]].tolist() == [0, 1, 4]
    assert rows[ptr[1]:ptr[2]].tolist() == [0, 2, 3, 4, 5]


@pytest.mark.parametrize(
    "given_, n, expect",
    [(3, 6, 3), ("3", 6, 3), ("0.5", 6, 3), (0.5, 7, 4), ("0.05", 8124, 407), (Fraction(1, 3), 6, 2), (1.0, 6, 6)],
)
def test_resolve_sigma(given_, n, expect):
    assert resolve_sigma(given_, n) == expect


@pytest.mark.parametrize("bad", [0, -2, "0.0", "1.5", 2.5])
def test_resolve_sigma_rejects(bad):
    with pytest.raises(ValueError):
        resolve_sigma(bad, 10)


def test_frequent_set_mapping():
    f = FrequentSet({(2, 3): 2, (1,): 5}, 2)
    assert list(f) == [(1,), (2, 3)]
    assert (2, 3) in f and [2, 3] in f and (9,) not in f and 5 not in f
    assert f == {(1,): 5, (2, 3): 2}


def test_canonical():
    assert canonical([3, 1, 3]) == (1, 3)


@settings(max_examples=150)
@given(small_rows(max_items=7, max_rows=30), st.integers(1, 6))
def test_mining_matches_powerset(rows, sigma):
    db = TransactionDatabase.from_transactions(rows)
    assert mine_frequent(db, sigma).to_dict() == brute_frequent(rows, sigma)


@given(small_rows(max_items=6, max_rows=20), st.lists(st.integers(1, 7), max_size=4))
def test_support_matches_count(rows, itemset):
    db = TransactionDatabase.from_transactions(rows)
    assert support(db, itemset) == brute_support(rows, set(itemset))


@given(small_rows(max_items=10, max_rows=40, min_rows=1), st.integers(1, 4))
def test_downward_closure(rows, sigma):
    f = mine_frequent(TransactionDatabase.from_transactions(rows), sigma)
    for x in f:
        for k in range(len(x)):
            sub = x[:k] + x[k + 1:]
            if sub:
                assert sub in f and f[sub] >= f[x]
