"""Pure-numpy twins of the compiled kernels in ``_numba``.

Same signatures and return types; vectorized where numpy allows it, with
chunking to keep temporaries bounded.
"""

import numpy as np
import scipy.sparse as sp

_CHUNK = 1 << 14


def popcount_rows(bits):
    return np.bitwise_count(bits).sum(axis=1, dtype=np.int64)


def bitset_pair_count(covers, pa, pb):
    out = np.empty(pa.shape[0], dtype=np.int64)
    for s in range(0, pa.shape[0], _CHUNK):
        e = s + _CHUNK
        out[s:e] = np.bitwise_count(covers[pa[s:e]] & covers[pb[s:e]]).sum(axis=1, dtype=np.int64)
    return out


def bitset_pair_and(covers, pa, pb):
    return covers[pa] & covers[pb]


def _as_matrix(ptr, rows, n_cols=None):
    n = ptr.shape[0] - 1
    if n_cols is None:
        n_cols = int(rows.max()) + 1 if rows.size else 1
    data = np.ones(rows.shape[0], dtype=np.int32)
    return sp.csr_matrix((data, rows, ptr), shape=(n, n_cols))


def tidlist_pair_count(ptr, rows, pa, pb):
    mat = _as_matrix(ptr, rows)
    out = np.empty(pa.shape[0], dtype=np.int64)
    for s in range(0, pa.shape[0], _CHUNK):
        e = s + _CHUNK
        prod = mat[pa[s:e]].multiply(mat[pb[s:e]])
        out[s:e] = np.asarray(prod.sum(axis=1)).ravel()
    return out


def tidlist_pair_and(ptr, rows, pa, pb):
    if pa.shape[0] == 0:
        return np.zeros(1, dtype=np.int64), np.empty(0, dtype=np.int32)
    mat = _as_matrix(ptr, rows)
    prod = sp.csr_matrix(mat[pa].multiply(mat[pb]))
    prod.eliminate_zeros()
    prod.sort_indices()
    return prod.indptr.astype(np.int64), prod.indices.astype(np.int32)


def _row_keys(arr):
    arr = np.ascontiguousarray(arr.astype(">i4"))
    return arr.view(f"V{4 * arr.shape[1]}").ravel()


def join_level(level):
    """Apriori join of lexicographically sorted k-itemsets, with subset prune."""
    n, k = level.shape
    empty = (np.empty((0, k + 1), dtype=np.int32), np.empty(0, dtype=np.int64), np.empty(0, dtype=np.int64))
    if n < 2:
        return empty
    if k == 1:
        ia, ib = np.triu_indices(n, 1)
        pa, pb = ia.astype(np.int64), ib.astype(np.int64)
        return np.stack((level[pa, 0], level[pb, 0]), axis=1).astype(np.int32), pa, pb
    prefix_keys = _row_keys(level[:, : k - 1])
    change = prefix_keys[1:] != prefix_keys[:-1]
    bounds = np.concatenate(([0], np.flatnonzero(change) + 1, [n]))
    last = level[:, k - 1]
    pa_parts, pb_parts = [], []
    for s, e in zip(bounds[:-1], bounds[1:]):
        if e - s < 2:
            continue
        for a in range(s, e - 1):
            b = np.arange(a + 1, e)
            ok = np.ones(b.shape[0], dtype=bool)
            for j in range(k - 1):
                key = np.delete(level[a], j)
                q = _row_keys(key[None, :])
                lo = np.searchsorted(prefix_keys, q, "left")[0]
                hi = np.searchsorted(prefix_keys, q, "right")[0]
                seg = last[lo:hi]
                pos = np.searchsorted(seg, last[b])
                ok &= (pos < seg.shape[0]) & (seg[np.minimum(pos, max(seg.shape[0] - 1, 0))] == last[b]) if seg.size else False
                if not ok.any():
                    break
            if ok.any():
                pa_parts.append(np.full(int(ok.sum()), a, dtype=np.int64))
                pb_parts.append(b[ok].astype(np.int64))
    if not pa_parts:
        return empty
    pa = np.concatenate(pa_parts)
    pb = np.concatenate(pb_parts)
    cands = np.concatenate((level[pa], level[pb, k - 1 :]), axis=1).astype(np.int32)
    return cands, pa, pb


def _by_length(iptr):
    lengths = np.diff(iptr)
    for ln in np.unique(lengths):
        if ln == 0:
            continue
        yield int(ln), np.flatnonzero(lengths == ln)


def bitset_supports(bits, iptr, icodes):
    m = iptr.shape[0] - 1
    out = np.zeros(m, dtype=np.int64)
    for ln, idx in _by_length(iptr):
        codes = icodes[iptr[idx][:, None] + np.arange(ln)]
        for s in range(0, idx.shape[0], _CHUNK // 4):
            chunk = codes[s : s + _CHUNK // 4]
            acc = np.bitwise_and.reduce(bits[chunk], axis=1)
            out[idx[s : s + _CHUNK // 4]] = np.bitwise_count(acc).sum(axis=1, dtype=np.int64)
    return out


def _incidence(ptr, rows, n_rows):
    # item-major tid-lists -> row-major incidence (n_rows x n_items)
    items = np.repeat(np.arange(ptr.shape[0] - 1), np.diff(ptr))
    data = np.ones(rows.shape[0], dtype=np.int32)
    return sp.csr_matrix((data, (rows, items)), shape=(n_rows, ptr.shape[0] - 1))


def _query(iptr, icodes, idx, n_items):
    lengths = np.diff(iptr)[idx]
    cols = np.repeat(np.arange(idx.shape[0]), lengths)
    codes = np.concatenate([icodes[iptr[j] : iptr[j + 1]] for j in idx]) if idx.size else np.empty(0, np.int32)
    data = np.ones(codes.shape[0], dtype=np.int32)
    return sp.csc_matrix((data, (codes, cols)), shape=(n_items, idx.shape[0])), lengths


def _tidlist_hits(ptr, rows, iptr, icodes):
    # yields (itemset index, rows containing it) in chunks via incidence products
    n_rows = int(rows.max()) + 1 if rows.size else 0
    inc = _incidence(ptr, rows, n_rows)
    nonempty = np.flatnonzero(np.diff(iptr) > 0)
    step = 512
    for s in range(0, nonempty.shape[0], step):
        idx = nonempty[s : s + step]
        q, lengths = _query(iptr, icodes, idx, ptr.shape[0] - 1)
        prod = sp.csc_matrix(inc @ q)
        for c in range(idx.shape[0]):
            lo, hi = prod.indptr[c], prod.indptr[c + 1]
            hit = prod.indices[lo:hi][prod.data[lo:hi] == lengths[c]]
            yield idx[c], np.sort(hit)


def tidlist_supports(ptr, rows, iptr, icodes):
    out = np.zeros(iptr.shape[0] - 1, dtype=np.int64)
    for j, hit in _tidlist_hits(ptr, rows, iptr, icodes):
        out[j] = hit.shape[0]
    return out


def _bitset_rows(word_row):
    bits = np.unpackbits(word_row.view(np.uint8), bitorder="little")
    return np.flatnonzero(bits).astype(np.int32)


def bitset_covers(bits, iptr, icodes):
    m = iptr.shape[0] - 1
    parts = []
    optr = np.zeros(m + 1, dtype=np.int64)
    for j in range(m):
        s, e = iptr[j], iptr[j + 1]
        if e == s:
            parts.append(np.empty(0, dtype=np.int32))
        else:
            acc = np.bitwise_and.reduce(bits[icodes[s:e]], axis=0)
            parts.append(_bitset_rows(acc))
        optr[j + 1] = optr[j] + parts[-1].shape[0]
    out = np.concatenate(parts) if parts else np.empty(0, dtype=np.int32)
    return optr, out.astype(np.int32)


def tidlist_covers(ptr, rows, iptr, icodes):
    m = iptr.shape[0] - 1
    found = {j: hit for j, hit in _tidlist_hits(ptr, rows, iptr, icodes)}
    parts = [found.get(j, np.empty(0, dtype=np.int32)).astype(np.int32) for j in range(m)]
    optr = np.zeros(m + 1, dtype=np.int64)
    optr[1:] = np.cumsum([p.shape[0] for p in parts])
    out = np.concatenate(parts) if parts else np.empty(0, dtype=np.int32)
    return optr, out


def bitset_cover_hist(bits, iptr, icodes, n_rows):
    hist = np.zeros(n_rows, dtype=np.int64)
    for ln, idx in _by_length(iptr):
        codes = icodes[iptr[idx][:, None] + np.arange(ln)]
        for s in range(0, idx.shape[0], 1024):
            acc = np.bitwise_and.reduce(bits[codes[s : s + 1024]], axis=1)
            unpacked = np.unpackbits(acc.view(np.uint8), axis=1, bitorder="little")
            hist += unpacked.sum(axis=0, dtype=np.int64)[:n_rows]
    return hist


def tidlist_cover_hist(ptr, rows, iptr, icodes, n_rows):
    hist = np.zeros(n_rows, dtype=np.int64)
    for _, hit in _tidlist_hits(ptr, rows, iptr, icodes):
        hist[hit] += 1
    return hist


def tracker_break(row, col, eptr, eids, intact, member, support):
    """Mark entries of ``row`` whose itemset contains item column ``col`` as broken.

    Decrements ``support`` for each newly broken itemset and returns their ids.
    """
    s, e = eptr[row], eptr[row + 1]
    ids = eids[s:e]
    hit = intact[s:e] & member[ids, col].astype(bool)
    broken = ids[hit]
    intact[s:e][hit] = False
    np.subtract.at(support, broken, 1)
    return broken.astype(np.int64)


def tracker_costs(row, eptr, eids, intact, member, weights):
    """Summed weight of intact itemsets in ``row`` per item column."""
    s, e = eptr[row], eptr[row + 1]
    ids = eids[s:e][intact[s:e]]
    return (weights[ids].astype(np.float64) @ member[ids].astype(np.float64)).reshape(member.shape[1])
