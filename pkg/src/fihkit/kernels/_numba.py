"""Compiled kernels (numba).

Every function here has a twin with the same signature in ``_numpy``.
Vertical covers come in two encodings: packed bitsets (``uint64[n, words]``,
bit ``r % 64`` of word ``r // 64`` marks row ``r``) and tid-lists stored as
CSR (``ptr`` int64, ``rows`` int32, ascending within each list).
Itemsets are passed as CSR too (``iptr`` int64, ``icodes`` int32).
"""

import numpy as np
from numba import njit

_M1 = np.uint64(0x5555555555555555)
_M2 = np.uint64(0x3333333333333333)
_M4 = np.uint64(0x0F0F0F0F0F0F0F0F)
_H01 = np.uint64(0x0101010101010101)


@njit(cache=True, inline="always")
def _popcount(x):
    x = x - ((x >> np.uint64(1)) & _M1)
    x = (x & _M2) + ((x >> np.uint64(2)) & _M2)
    x = (x + (x >> np.uint64(4))) & _M4
    return (x * _H01) >> np.uint64(56)


@njit(cache=True)
def popcount_rows(bits):
    n, w = bits.shape
    out = np.zeros(n, dtype=np.int64)
    for r in range(n):
        c = 0
        for k in range(w):
            c += _popcount(bits[r, k])
        out[r] = c
    return out


@njit(cache=True)
def bitset_pair_count(covers, pa, pb):
    m = pa.shape[0]
    w = covers.shape[1]
    out = np.zeros(m, dtype=np.int64)
    for j in range(m):
        a = pa[j]
        b = pb[j]
        c = 0
        for k in range(w):
            c += _popcount(covers[a, k] & covers[b, k])
        out[j] = c
    return out


@njit(cache=True)
def bitset_pair_and(covers, pa, pb):
    m = pa.shape[0]
    w = covers.shape[1]
    out = np.empty((m, w), dtype=np.uint64)
    for j in range(m):
        a = pa[j]
        b = pb[j]
        for k in range(w):
            out[j, k] = covers[a, k] & covers[b, k]
    return out


@njit(cache=True, inline="always")
def _merge_count(rows, i, ie, j, je):
    c = 0
    while i < ie and j < je:
        x = rows[i]
        y = rows[j]
        if x == y:
            c += 1
            i += 1
            j += 1
        elif x < y:
            i += 1
        else:
            j += 1
    return c


@njit(cache=True)
def tidlist_pair_count(ptr, rows, pa, pb):
    m = pa.shape[0]
    out = np.zeros(m, dtype=np.int64)
    for j in range(m):
        a = pa[j]
        b = pb[j]
        out[j] = _merge_count(rows, ptr[a], ptr[a + 1], ptr[b], ptr[b + 1])
    return out


@njit(cache=True)
def tidlist_pair_and(ptr, rows, pa, pb):
    counts = tidlist_pair_count(ptr, rows, pa, pb)
    m = pa.shape[0]
    newptr = np.zeros(m + 1, dtype=np.int64)
    for j in range(m):
        newptr[j + 1] = newptr[j] + counts[j]
    out = np.empty(newptr[m], dtype=np.int32)
    for j in range(m):
        a = pa[j]
        b = pb[j]
        i, ie = ptr[a], ptr[a + 1]
        k, ke = ptr[b], ptr[b + 1]
        p = newptr[j]
        while i < ie and k < ke:
            x = rows[i]
            y = rows[k]
            if x == y:
                out[p] = x
                p += 1
                i += 1
                k += 1
            elif x < y:
                i += 1
            else:
                k += 1
    return newptr, out


@njit(cache=True, inline="always")
def _key_cmp(level, r, key, width):
    for p in range(width):
        a = level[r, p]
        b = key[p]
        if a < b:
            return -1
        if a > b:
            return 1
    return 0


@njit(cache=True)
def _prefix_range(level, key, width):
    # rows whose first `width` columns equal key (level is lex sorted)
    lo = 0
    hi = level.shape[0]
    while lo < hi:
        mid = (lo + hi) // 2
        if _key_cmp(level, mid, key, width) < 0:
            lo = mid + 1
        else:
            hi = mid
    start = lo
    hi = level.shape[0]
    while lo < hi:
        mid = (lo + hi) // 2
        if _key_cmp(level, mid, key, width) <= 0:
            lo = mid + 1
        else:
            hi = mid
    return start, lo


@njit(cache=True)
def _prefix_equal(level, a, b, width):
    for p in range(width):
        if level[a, p] != level[b, p]:
            return False
    return True


@njit(cache=True)
def _join_scan(level, out, pa, pb, fill):
    # Each candidate joins rows a < b of a prefix group. A k-subset that drops
    # prefix position j lives in the rows sharing key (prefix - p_j + x_a);
    # those rows are contiguous, so one pointer per j sweeps them as x_b grows.
    n, k = level.shape
    key = np.empty(k, dtype=np.int32)
    ptrs = np.empty(k, dtype=np.int64)
    ends = np.empty(k, dtype=np.int64)
    m = 0
    start = 0
    while start < n:
        stop = start + 1
        while stop < n and _prefix_equal(level, start, stop, k - 1):
            stop += 1
        for a in range(start, stop - 1):
            empty = False
            for j in range(k - 1):
                q = 0
                for p in range(k - 1):
                    if p != j:
                        key[q] = level[a, p]
                        q += 1
                key[q] = level[a, k - 1]
                lo, hi = _prefix_range(level, key, k - 1)
                if lo == hi:
                    empty = True
                    break
                ptrs[j] = lo
                ends[j] = hi
            if empty:
                continue
            for b in range(a + 1, stop):
                xb = level[b, k - 1]
                ok = True
                for j in range(k - 1):
                    r = ptrs[j]
                    e = ends[j]
                    while r < e and level[r, k - 1] < xb:
                        r += 1
                    ptrs[j] = r
                    if r == e or level[r, k - 1] != xb:
                        ok = False
                if ok:
                    if fill:
                        for p in range(k):
                            out[m, p] = level[a, p]
                        out[m, k] = xb
                        pa[m] = a
                        pb[m] = b
                    m += 1
        start = stop
    return m


@njit(cache=True)
def join_level(level):
    """Apriori join of lexicographically sorted k-itemsets, with subset prune."""
    k = level.shape[1]
    out = np.empty((0, k + 1), dtype=np.int32)
    pa = np.empty(0, dtype=np.int64)
    pb = np.empty(0, dtype=np.int64)
    m = _join_scan(level, out, pa, pb, False)
    out = np.empty((m, k + 1), dtype=np.int32)
    pa = np.empty(m, dtype=np.int64)
    pb = np.empty(m, dtype=np.int64)
    _join_scan(level, out, pa, pb, True)
    return out, pa, pb


@njit(cache=True)
def bitset_supports(bits, iptr, icodes):
    m = iptr.shape[0] - 1
    w = bits.shape[1]
    out = np.zeros(m, dtype=np.int64)
    for j in range(m):
        s, e = iptr[j], iptr[j + 1]
        if e == s:
            continue
        c = 0
        for k in range(w):
            x = bits[icodes[s], k]
            for p in range(s + 1, e):
                x &= bits[icodes[p], k]
            c += _popcount(x)
        out[j] = c
    return out


@njit(cache=True)
def _chain(ptr, rows, icodes, s, e, buf, tmp):
    # intersect the tid-lists of icodes[s:e] into buf; returns length
    first = icodes[s]
    best = ptr[first + 1] - ptr[first]
    for p in range(s + 1, e):
        c = icodes[p]
        ln = ptr[c + 1] - ptr[c]
        if ln < best:
            best = ln
            first = c
    n = 0
    for q in range(ptr[first], ptr[first + 1]):
        buf[n] = rows[q]
        n += 1
    for p in range(s, e):
        c = icodes[p]
        if c == first:
            continue
        i = 0
        j = ptr[c]
        je = ptr[c + 1]
        t = 0
        while i < n and j < je:
            x = buf[i]
            y = rows[j]
            if x == y:
                tmp[t] = x
                t += 1
                i += 1
                j += 1
            elif x < y:
                i += 1
            else:
                j += 1
        for q in range(t):
            buf[q] = tmp[q]
        n = t
        if n == 0:
            break
    return n


@njit(cache=True)
def tidlist_supports(ptr, rows, iptr, icodes):
    m = iptr.shape[0] - 1
    out = np.zeros(m, dtype=np.int64)
    longest = 0
    for c in range(ptr.shape[0] - 1):
        longest = max(longest, ptr[c + 1] - ptr[c])
    buf = np.empty(longest, dtype=np.int32)
    tmp = np.empty(longest, dtype=np.int32)
    for j in range(m):
        s, e = iptr[j], iptr[j + 1]
        if e == s:
            continue
        out[j] = _chain(ptr, rows, icodes, s, e, buf, tmp)
    return out


@njit(cache=True)
def bitset_covers(bits, iptr, icodes):
    counts = bitset_supports(bits, iptr, icodes)
    m = counts.shape[0]
    w = bits.shape[1]
    optr = np.zeros(m + 1, dtype=np.int64)
    for j in range(m):
        optr[j + 1] = optr[j] + counts[j]
    out = np.empty(optr[m], dtype=np.int32)
    for j in range(m):
        s, e = iptr[j], iptr[j + 1]
        if e == s:
            continue
        p = optr[j]
        for k in range(w):
            x = bits[icodes[s], k]
            for q in range(s + 1, e):
                x &= bits[icodes[q], k]
            b = 0
            while x:
                if x & np.uint64(1):
                    out[p] = k * 64 + b
                    p += 1
                x >>= np.uint64(1)
                b += 1
    return optr, out


@njit(cache=True)
def tidlist_covers(ptr, rows, iptr, icodes):
    counts = tidlist_supports(ptr, rows, iptr, icodes)
    m = counts.shape[0]
    optr = np.zeros(m + 1, dtype=np.int64)
    for j in range(m):
        optr[j + 1] = optr[j] + counts[j]
    out = np.empty(optr[m], dtype=np.int32)
    longest = 0
    for c in range(ptr.shape[0] - 1):
        longest = max(longest, ptr[c + 1] - ptr[c])
    buf = np.empty(longest, dtype=np.int32)
    tmp = np.empty(longest, dtype=np.int32)
    for j in range(m):
        s, e = iptr[j], iptr[j + 1]
        if e == s:
            continue
        n = _chain(ptr, rows, icodes, s, e, buf, tmp)
        for q in range(n):
            out[optr[j] + q] = buf[q]
    return optr, out


@njit(cache=True)
def bitset_cover_hist(bits, iptr, icodes, n_rows):
    """How many of the given itemsets each row contains."""
    m = iptr.shape[0] - 1
    w = bits.shape[1]
    hist = np.zeros(n_rows, dtype=np.int64)
    for j in range(m):
        s, e = iptr[j], iptr[j + 1]
        if e == s:
            continue
        for k in range(w):
            x = bits[icodes[s], k]
            for q in range(s + 1, e):
                x &= bits[icodes[q], k]
            b = 0
            while x:
                if x & np.uint64(1):
                    hist[k * 64 + b] += 1
                x >>= np.uint64(1)
                b += 1
    return hist


@njit(cache=True)
def tidlist_cover_hist(ptr, rows, iptr, icodes, n_rows):
    m = iptr.shape[0] - 1
    hist = np.zeros(n_rows, dtype=np.int64)
    longest = 0
    for c in range(ptr.shape[0] - 1):
        longest = max(longest, ptr[c + 1] - ptr[c])
    buf = np.empty(longest, dtype=np.int32)
    tmp = np.empty(longest, dtype=np.int32)
    for j in range(m):
        s, e = iptr[j], iptr[j + 1]
        if e == s:
            continue
        n = _chain(ptr, rows, icodes, s, e, buf, tmp)
        for q in range(n):
            hist[buf[q]] += 1
    return hist


@njit(cache=True)
def tracker_break(row, col, eptr, eids, intact, member, support):
    """Mark entries of ``row`` whose itemset contains item column ``col`` as broken.

    Decrements ``support`` for each newly broken itemset and returns their ids.
    """
    s, e = eptr[row], eptr[row + 1]
    n = 0
    for q in range(s, e):
        if intact[q] and member[eids[q], col]:
            n += 1
    out = np.empty(n, dtype=np.int64)
    n = 0
    for q in range(s, e):
        x = eids[q]
        if intact[q] and member[x, col]:
            intact[q] = False
            support[x] -= 1
            out[n] = x
            n += 1
    return out


@njit(cache=True)
def tracker_costs(row, eptr, eids, intact, member, weights):
    """Summed weight of intact itemsets in ``row`` per item column."""
    ncols = member.shape[1]
    out = np.zeros(ncols, dtype=np.float64)
    for q in range(eptr[row], eptr[row + 1]):
        if intact[q]:
            x = eids[q]
            wx = weights[x]
            for c in range(ncols):
                if member[x, c]:
                    out[c] += wx
    return out
