"""Bit-packed GF(2) row reduction.

Rows are packed 64 columns per uint64 word, column c living in word c >> 6
at bit c & 63.  Elimination walks the columns one word at a time: pivots of
the current word are found on that word alone while recording, per row,
which pivots were added (a 64-bit mask), and the recorded combinations are
then applied to the rest of each row through 8-bit lookup tables of pivot
row sums (the "four Russians" trick).
"""

from __future__ import annotations

import numpy as np
from numba import njit

_ONE = np.uint64(1)


def pack(dense: np.ndarray) -> np.ndarray:
    """Pack a 0/1 matrix (r x c) into uint64 words (r x ceil(c/64))."""
    dense = np.ascontiguousarray(dense, dtype=np.uint8) & 1
    nrows, ncols = dense.shape
    nwords = max(1, (ncols + 63) // 64)
    padded = np.zeros((nrows, nwords * 64), dtype=np.uint8)
    padded[:, :ncols] = dense
    packed = np.packbits(padded, axis=1, bitorder="little")
    return packed.view("<u8").astype(np.uint64, copy=False).reshape(nrows, nwords).copy()


def unpack(words: np.ndarray, ncols: int) -> np.ndarray:
    nrows = words.shape[0]
    if nrows == 0:
        return np.zeros((0, ncols), dtype=np.uint8)
    as_bytes = np.ascontiguousarray(words.astype("<u8")).view(np.uint8).reshape(nrows, -1)
    bits = np.unpackbits(as_bytes, axis=1, bitorder="little")
    return bits[:, :ncols].astype(np.uint8)


@njit(cache=True)
def _swap_rows(A, comb, i, j):
    if i == j:
        return
    W = A.shape[1]
    for w in range(W):
        t = A[i, w]
        A[i, w] = A[j, w]
        A[j, w] = t
    t = comb[i]
    comb[i] = comb[j]
    comb[j] = t


@njit(cache=True)
def _xor_tail(A, dst, src, w0):
    for w in range(w0, A.shape[1]):
        A[dst, w] ^= A[src, w]


@njit(cache=True, inline="always")
def _xor_into(dst, src, w0):
    for w in range(w0, dst.shape[0]):
        dst[w] ^= src[w]


@njit(cache=True, inline="always")
def _xor_pair(dst, a, b, w0):
    for w in range(w0, dst.shape[0]):
        dst[w] = a[w] ^ b[w]


@njit(cache=True)
def echelon_inplace(A, ncols, reduced):
    """Row-reduce the packed matrix A in place.

    Returns the array of pivot columns; the first len(pivots) rows of A are
    the nonzero echelon rows in pivot order.  With ``reduced`` the result is
    the reduced row echelon form, otherwise only rows below each pivot are
    cleared.
    """
    nrows, W = A.shape
    maxrank = min(nrows, ncols)
    pivots = np.empty(maxrank, dtype=np.int64)
    rank = 0
    comb = np.zeros(nrows, dtype=np.uint64)
    tables = np.zeros((8, 256, W), dtype=np.uint64)
    pbits = np.empty(64, dtype=np.uint64)

    colw = np.empty(nrows, dtype=np.uint64)

    for w in range(W):
        if rank == nrows:
            break
        start = rank
        # the current word of the remaining rows, contiguous for the bit scans
        for i in range(start, nrows):
            comb[i] = 0
            colw[i] = A[i, w]
        p = 0
        for b in range(64):
            col = w * 64 + b
            if col >= ncols or rank == nrows:
                break
            bit = _ONE << np.uint64(b)
            found = -1
            for i in range(rank, nrows):
                if colw[i] & bit:
                    found = i
                    break
            if found < 0:
                continue
            if found != rank:
                _swap_rows(A, comb, found, rank)
                t = colw[found]
                colw[found] = colw[rank]
                colw[rank] = t
            pw = colw[rank]
            mark = _ONE << np.uint64(p)
            for i in range(rank + 1, nrows):
                if colw[i] & bit:
                    colw[i] ^= pw
                    comb[i] ^= mark
            pbits[p] = bit
            pivots[rank] = col
            rank += 1
            p += 1
        for i in range(start, nrows):
            A[i, w] = colw[i]
        if p == 0:
            continue

        # finalize the tails of this word's pivot rows, in pivot order
        for l in range(p):
            c = comb[start + l]
            l2 = 0
            while c:
                if c & _ONE:
                    _xor_tail(A, start + l, start + l2, w + 1)
                c >>= _ONE
                l2 += 1

        if reduced:
            # rows above: clear this word's pivot bits, recording combinations
            for i in range(start):
                c = np.uint64(0)
                for l in range(p):
                    if A[i, w] & pbits[l]:
                        A[i, w] ^= A[start + l, w]
                        c |= _ONE << np.uint64(l)
                comb[i] = c

        if w + 1 < W:
            ngroups = (p + 7) // 8
            for g in range(ngroups):
                cnt = min(8, p - 8 * g)
                for ww in range(w + 1, W):
                    tables[g, 0, ww] = 0
                for idx in range(1, 1 << cnt):
                    low = idx & (-idx)
                    li = 0
                    while (1 << li) != low:
                        li += 1
                    src = start + 8 * g + li
                    prev = idx ^ low
                    _xor_pair(tables[g, idx], tables[g, prev], A[src], w + 1)
            lo = 0 if reduced else start + p
            for i in range(lo, nrows):
                if start <= i < start + p:
                    continue
                c = comb[i]
                if c == 0:
                    continue
                row = A[i]
                for g in range(ngroups):
                    byte = (c >> np.uint64(8 * g)) & np.uint64(255)
                    if byte:
                        _xor_into(row, tables[g, np.int64(byte)], w + 1)

        if reduced:
            # back-substitute among this word's pivots
            for l in range(p - 1, -1, -1):
                for l2 in range(l + 1, p):
                    if A[start + l, w] & pbits[l2]:
                        A[start + l, w] ^= A[start + l2, w]
                        _xor_tail(A, start + l, start + l2, w + 1)

    return pivots[:rank]


@njit(cache=True)
def rank_inplace(A, ncols):
    return echelon_inplace(A, ncols, False).shape[0]


@njit(cache=True)
def set_bits(A, rows, cols):
    """A[rows[i], cols[i]] = 1 for all i (packed layout)."""
    for i in range(rows.shape[0]):
        c = cols[i]
        A[rows[i], c >> 6] |= _ONE << np.uint64(c & 63)


@njit(cache=True)
def row_support(A, i, ncols):
    """Column indices of the set bits of row i, ascending."""
    W = A.shape[1]
    cnt = 0
    for w in range(W):
        x = A[i, w]
        while x:
            x &= x - _ONE
            cnt += 1
    out = np.empty(cnt, dtype=np.int64)
    j = 0
    for w in range(W):
        x = A[i, w]
        b = 0
        while x:
            if x & _ONE:
                out[j] = w * 64 + b
                j += 1
            x >>= _ONE
            b += 1
    return out
