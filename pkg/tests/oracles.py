"""Brute-force reference implementations used only by the tests.

Everything here enumerates: all subsets of the item universe, all 0/1
assignments, all cell subsets. Keep inputs small.
"""

from __future__ import annotations

import itertools

import numpy as np
from fractions import Fraction


def powerset(items, min_len=1):
    items = sorted(items)
    for k in range(min_len, len(items) + 1):
        yield from itertools.combinations(items, k)


def brute_support(rows, itemset) -> int:
    s = set(itemset)
    return sum(1 for r in rows if s.issubset(r))


def brute_frequent(rows, sigma) -> dict:
    universe = sorted({i for r in rows for i in r})
    out = {}
    for x in powerset(universe):
        c = brute_support(rows, x)
        if c >= sigma:
            out[x] = c
    return out


def brute_closure(frequent, sensitive) -> set:
    return {x for x in frequent if any(set(s).issubset(x) for s in sensitive)}


def brute_positive_border(family) -> set:
    fam = [set(x) for x in family]
    return {tuple(sorted(x)) for x in fam if not any(x < y for y in fam)}


def brute_negative_border(family, universe) -> set:
    fam = {tuple(sorted(x)) for x in family}
    out = set()
    for x in powerset(universe):
        if x in fam:
            continue
        subs = [tuple(y) for y in itertools.combinations(x, len(x) - 1) if y]
        if all(y in fam for y in subs):
            out.add(x)
    return out


def downward_closure(family) -> set:
    out = set()
    for x in family:
        out.update(powerset(x))
    return out


def brute_ilp(c, rows, lo=None, hi=None):
    """Exhaustive minimum of c @ x over 0/1 vectors meeting ``rows``.

    ``rows`` holds (coef dict, sense, rhs). Returns (value, x) or (None, None).
    """
    n = len(c)
    best, arg = None, None
    for bits in itertools.product((0, 1), repeat=n):
        ok = True
        for coefs, sense, rhs in rows:
            lhs = sum(v * bits[j] for j, v in coefs.items())
            if (sense == ">=" and lhs < rhs) or (sense == "<=" and lhs > rhs) or (sense == "=" and lhs != rhs):
                ok = False
                break
        if ok:
            val = sum(ci * b for ci, b in zip(c, bits))
            if best is None or val < best:
                best, arg = val, bits
    return best, arg


def model_rows(model):
    return [({int(j): float(v) for j, v in zip(r.indices, r.coefs)}, r.sense, r.rhs) for r in model.constraints]


def apply_pairs(rows, pairs):
    out = [set(r) for r in rows]
    for t, i in pairs:
        out[t - 1].discard(i)
    return out


def naive_information_loss(rows, sanitized_rows, revised) -> Fraction:
    total = sum(brute_support(rows, x) for x in revised)
    if total == 0:
        return Fraction(0)
    err = sum(abs(brute_support(rows, x) - brute_support(sanitized_rows, x)) for x in revised)
    return Fraction(err, total)


def naive_side_effects(rows, sanitized_rows, sensitive, sigma, miner=None) -> int:
    miner = miner or brute_frequent
    before = miner(rows, sigma)
    revised = set(before) - brute_closure(before, sensitive)
    after = miner(sanitized_rows, sigma)
    return len(revised) - len(after)


def brute_hitting_set(row, sensitive) -> int:
    """Size of a minimum set of items of ``row`` meeting every contained sensitive itemset."""
    inside = [set(s) for s in sensitive if set(s).issubset(row)]
    if not inside:
        return 0
    pool = sorted(set().union(*inside))
    for k in range(1, len(pool) + 1):
        for pick in itertools.combinations(pool, k):
            if all(s.intersection(pick) for s in inside):
                return k
    return len(pool)


def brute_min_cells(rows, sensitive, sigma, forbid=()):
    """Fewest (tid, item) deletions hiding every sensitive itemset.

    Candidate cells are the sensitive items of supporting transactions;
    ``forbid`` is a predicate on the sanitized rows rejecting a plan.
    """
    cells = sorted({(t + 1, i) for t, r in enumerate(rows) for s in sensitive if set(s) <= r for i in s})
    for k in range(0, len(cells) + 1):
        found = []
        for pick in itertools.combinations(cells, k):
            after = apply_pairs(rows, pick)
            if all(brute_support(after, s) < sigma for s in sensitive) and not (forbid and forbid(after)):
                found.append(pick)
        if found:
            return k, found
    return None, []


# ---------------------------------------------------------------- vectorized enumeration
# Same definitions as above, enumerating with numpy so 12-item / 20-variable cases stay fast.


def _masks(rows, universe):
    bit = {i: 1 << k for k, i in enumerate(universe)}
    return np.array([sum(bit[i] for i in r) for r in rows], dtype=np.int64)


def enumerate_frequent(rows, sigma) -> dict:
    """Powerset support counting over bitmasks."""
    universe = sorted({i for r in rows for i in r})
    if not universe or not rows:
        return {}
    masks = _masks(rows, universe)
    cand = np.arange(1, 1 << len(universe), dtype=np.int64)
    sup = ((masks[:, None] & cand[None, :]) == cand[None, :]).sum(axis=0)
    out = {}
    for m, c in zip(cand[sup >= sigma].tolist(), sup[sup >= sigma].tolist()):
        out[tuple(i for k, i in enumerate(universe) if m >> k & 1)] = c
    return out


def enumerate_ilp(c, a, senses, b):
    """Exhaustive 0/1 minimum of c @ x subject to dense rows ``a x (sense) b``."""
    c = np.asarray(c, dtype=np.float64)
    n = c.shape[0]
    best, arg = None, None
    chunk = 1 << min(n, 16)
    for start in range(0, 1 << n, chunk):
        codes = np.arange(start, min(start + chunk, 1 << n), dtype=np.int64)
        x = ((codes[:, None] >> np.arange(n)) & 1).astype(np.float64)
        lhs = x @ np.asarray(a, dtype=np.float64).T if len(b) else np.zeros((x.shape[0], 0))
        ok = np.ones(x.shape[0], dtype=bool)
        for k, s in enumerate(senses):
            if s == ">=":
                ok &= lhs[:, k] >= b[k] - 1e-9
            elif s == "<=":
                ok &= lhs[:, k] <= b[k] + 1e-9
            else:
                ok &= np.abs(lhs[:, k] - b[k]) <= 1e-9
        if ok.any():
            vals = x[ok] @ c
            j = int(np.argmin(vals))
            if best is None or vals[j] < best:
                best, arg = float(vals[j]), x[ok][j]
    return best, arg
