"""Both kernel backends must agree bit for bit."""

import itertools
import os
import subprocess
import sys

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fihkit import kernels
from fihkit.dataset import pack_bitsets

nb = pytest.importorskip("numba")
NUMBA = kernels.load_backend("numba")
NUMPY = kernels.load_backend("numpy")


def _random_tidlists(rng, n_items, n_rows, density):
    ptr = [0]
    rows = []
    for _ in range(n_items):
        r = np.flatnonzero(rng.random(n_rows) < density).astype(np.int32)
        rows.extend(r.tolist())
        ptr.append(len(rows))
    return np.array(ptr, dtype=np.int64), np.array(rows, dtype=np.int32)


def _random_queries(rng, n_items, n_q, max_len):
    iptr = [0]
    codes = []
    for _ in range(n_q):
        k = int(rng.integers(0, max_len + 1))
        codes.extend(sorted(rng.choice(n_items, size=min(k, n_items), replace=False).tolist()))
        iptr.append(len(codes))
    return np.array(iptr, dtype=np.int64), np.array(codes, dtype=np.int32)


@pytest.mark.parametrize("seed", range(5))
def test_support_kernels_agree(seed):
    rng = np.random.default_rng(seed)
    n_rows = int(rng.integers(1, 200))
    ptr, rows = _random_tidlists(rng, 12, n_rows, 0.4)
    bits = pack_bitsets(ptr, rows, n_rows)
    iptr, icodes = _random_queries(rng, 12, 40, 4)
    for name in ("supports", "covers"):
        a = getattr(NUMBA, f"bitset_{name}")(bits, iptr, icodes)
        b = getattr(NUMPY, f"bitset_{name}")(bits, iptr, icodes)
        c = getattr(NUMBA, f"tidlist_{name}")(ptr, rows, iptr, icodes)
        d = getattr(NUMPY, f"tidlist_{name}")(ptr, rows, iptr, icodes)
        for x in (b, c, d):
            if isinstance(a, tuple):
                assert all(np.array_equal(p, q) for p, q in zip(a, x))
            else:
                assert np.array_equal(a, x)
    h = [
        NUMBA.bitset_cover_hist(bits, iptr, icodes, n_rows),
        NUMPY.bitset_cover_hist(bits, iptr, icodes, n_rows),
        NUMBA.tidlist_cover_hist(ptr, rows, iptr, icodes, n_rows),
        NUMPY.tidlist_cover_hist(ptr, rows, iptr, icodes, n_rows),
    ]
    assert all(np.array_equal(h[0], x) for x in h[1:])


@pytest.mark.parametrize("seed", range(5))
def test_pair_kernels_agree(seed):
    rng = np.random.default_rng(100 + seed)
    n_rows = int(rng.integers(1, 300))
    ptr, rows = _random_tidlists(rng, 10, n_rows, 0.3)
    bits = pack_bitsets(ptr, rows, n_rows)
    pa = rng.integers(0, 10, 25).astype(np.int64)
    pb = rng.integers(0, 10, 25).astype(np.int64)
    counts = NUMBA.bitset_pair_count(bits, pa, pb)
    for other in (NUMPY.bitset_pair_count(bits, pa, pb), NUMBA.tidlist_pair_count(ptr, rows, pa, pb),
                  NUMPY.tidlist_pair_count(ptr, rows, pa, pb)):
        assert np.array_equal(counts, other)
    assert np.array_equal(NUMBA.bitset_pair_and(bits, pa, pb), NUMPY.bitset_pair_and(bits, pa, pb))
    p1, r1 = NUMBA.tidlist_pair_and(ptr, rows, pa, pb)
    p2, r2 = NUMPY.tidlist_pair_and(ptr, rows, pa, pb)
    assert np.array_equal(p1, p2) and np.array_equal(r1, r2)
    assert np.array_equal(NUMBA.popcount_rows(bits), np.diff(ptr))


def _brute_join(level):
    rows = [tuple(r) for r in level.tolist()]
    present = set(rows)
    out = []
    for i, j in itertools.combinations(range(len(rows)), 2):
        a, b = rows[i], rows[j]
        if a[:-1] == b[:-1]:
            cand = a + (b[-1],) if a[-1] < b[-1] else b + (a[-1],)
            if all(cand[:k] + cand[k + 1:] in present for k in range(len(cand))):
                out.append(cand)
    return sorted(out)


@settings(max_examples=60)
@given(st.integers(1, 4), st.sets(st.integers(0, 9), max_size=9).flatmap(
    lambda u: st.just(sorted(u))), st.randoms(use_true_random=False))
def test_join_level_matches_brute(k, universe, rnd):
    combos = list(itertools.combinations(universe, k))
    picked = sorted(c for c in combos if rnd.random() < 0.6)
    level = np.array(picked, dtype=np.int32).reshape(len(picked), k)
    expect = _brute_join(level)
    for backend in (NUMBA, NUMPY):
        cands, pa, pb = backend.join_level(level)
        got = [tuple(r) for r in cands.tolist()]
        assert got == expect
        for r, a, b in zip(cands.tolist(), pa.tolist(), pb.tolist()):
            assert sorted(set(level[a].tolist()) | set(level[b].tolist())) == r


def test_tracker_kernels_agree():
    rng = np.random.default_rng(7)
    n_rows, n_sets, n_cols = 30, 12, 5
    member = (rng.random((n_sets, n_cols)) < 0.5).astype(np.uint8)
    per = [np.sort(rng.choice(n_sets, size=rng.integers(0, 6), replace=False)) for _ in range(n_rows)]
    eids = np.concatenate(per).astype(np.int64)
    eptr = np.zeros(n_rows + 1, dtype=np.int64)
    eptr[1:] = np.cumsum([len(p) for p in per])
    weights = rng.random(n_sets)
    moves = list(zip(rng.integers(0, n_rows, 40).tolist(), rng.integers(0, n_cols, 40).tolist()))
    state = {}
    for name, be in (("numba", NUMBA), ("numpy", NUMPY)):
        intact = np.ones(eids.shape[0], dtype=bool)
        support = np.bincount(eids, minlength=n_sets).astype(np.int64)
        log = []
        for row, col in moves:
            costs = be.tracker_costs(row, eptr, eids, intact, member, weights)
            broken = be.tracker_break(row, col, eptr, eids, intact, member, support)
            log.append((costs.round(12).tolist(), sorted(broken.tolist())))
        state[name] = (log, intact, support)
    a, b = state["numba"], state["numpy"]
    assert a[0] == b[0]
    assert np.array_equal(a[1], b[1]) and np.array_equal(a[2], b[2])
    assert np.array_equal(a[2], np.bincount(eids[a[1]], minlength=n_sets))


def test_env_flag_selects_numpy():
    code = "from fihkit import kernels; print(kernels.BACKEND)"
    env = dict(os.environ, FIHKIT_DISABLE_NUMBA="1")
    out = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True, check=True)
    assert out.stdout.strip() == "numpy"
    env.pop("FIHKIT_DISABLE_NUMBA")
    out = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True, check=True)
    assert out.stdout.strip() == "numba"
