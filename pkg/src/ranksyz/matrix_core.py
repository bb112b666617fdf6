"""Dense exact linear algebra over F_q and F_{q^m}.

Matrices are numpy arrays of element codes (see ``field_core``): int64 for
base fields, object dtype for extension fields, whose codes can exceed 64
bits.  Over F_2 the work is delegated to the bit-packed kernels in
``_gf2``; other base fields use vectorised table lookups, and extension
fields fall back to plain Python loops (their matrices are tiny here).

Pivoting is deterministic everywhere: leftmost column, first nonzero row.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _gf2
from .field_core import BaseField, FieldTower, base_field


class MatrixError(ValueError):
    pass


@dataclass
class EchelonResult:
    rref: np.ndarray
    rank: int
    pivot_cols: list[int]


def _default(field):
    return base_field(2) if field is None else field


def _is_gf2(field) -> bool:
    return isinstance(field, BaseField) and field.q == 2


def as_matrix(M, field=None) -> np.ndarray:
    field = _default(field)
    if isinstance(field, BaseField):
        A = np.array(M, dtype=np.int64)
    else:
        A = np.array(M, dtype=object)
    if A.ndim != 2:
        A = A.reshape(len(M), -1) if len(M) else np.zeros((0, 0), dtype=A.dtype)
    return A


def zeros(nrows: int, ncols: int, field=None) -> np.ndarray:
    field = _default(field)
    if isinstance(field, BaseField):
        return np.zeros((nrows, ncols), dtype=np.int64)
    out = np.empty((nrows, ncols), dtype=object)
    out.fill(0)
    return out


def identity(n: int, field=None) -> np.ndarray:
    I = zeros(n, n, field)
    for i in range(n):
        I[i, i] = 1
    return I


# ---------------------------------------------------------------------------
# reduced row echelon form


def rref(M, field=None) -> EchelonResult:
    field = _default(field)
    A = as_matrix(M, field)
    nrows, ncols = A.shape
    if nrows == 0 or ncols == 0:
        return EchelonResult(A.copy(), 0, [])
    if _is_gf2(field):
        P = _gf2.pack(A)
        piv = _gf2.echelon_inplace(P, ncols, True)
        return EchelonResult(_gf2.unpack(P, ncols).astype(np.int64), len(piv), [int(c) for c in piv])
    if isinstance(field, BaseField):
        return _rref_tables(A.copy(), field)
    return _rref_generic(A.copy(), field)


def _rref_tables(A: np.ndarray, F: BaseField) -> EchelonResult:
    nrows, ncols = A.shape
    r = 0
    pivots = []
    for c in range(ncols):
        if r == nrows:
            break
        nz = np.nonzero(A[r:, c])[0]
        if nz.size == 0:
            continue
        i = r + nz[0]
        if i != r:
            A[[r, i]] = A[[i, r]]
        A[r] = F.mul_table[F.inv_table[A[r, c]], A[r]]
        others = np.nonzero(A[:, c])[0]
        others = others[others != r]
        if others.size:
            factors = A[others, c]
            A[others] = F.sub_table[A[others], F.mul_table[factors[:, None], A[r][None, :]]]
        pivots.append(c)
        r += 1
    return EchelonResult(A, r, pivots)


def _rref_generic(A: np.ndarray, F) -> EchelonResult:
    nrows, ncols = A.shape
    r = 0
    pivots = []
    for c in range(ncols):
        if r == nrows:
            break
        i = next((i for i in range(r, nrows) if A[i, c] != 0), None)
        if i is None:
            continue
        if i != r:
            A[[r, i]] = A[[i, r]]
        inv = F.inv(A[r, c])
        A[r] = [F.mul(inv, x) for x in A[r]]
        for j in range(nrows):
            if j != r and A[j, c] != 0:
                f = A[j, c]
                A[j] = [F.sub(x, F.mul(f, y)) for x, y in zip(A[j], A[r])]
        pivots.append(c)
        r += 1
    return EchelonResult(A, r, pivots)


def rank(M, field=None) -> int:
    field = _default(field)
    A = as_matrix(M, field)
    if A.size == 0:
        return 0
    if _is_gf2(field):
        return int(_gf2.rank_inplace(_gf2.pack(A), A.shape[1]))
    return rref(A, field).rank


def right_kernel(M, field=None) -> np.ndarray:
    """Basis of {x : M x = 0}, as the columns of an ncols x (ncols - rank) matrix."""
    field = _default(field)
    A = as_matrix(M, field)
    ncols = A.shape[1]
    res = rref(A, field)
    free = [c for c in range(ncols) if c not in set(res.pivot_cols)]
    K = zeros(ncols, len(free), field)
    for j, f in enumerate(free):
        K[f, j] = 1
        for i, pc in enumerate(res.pivot_cols):
            K[pc, j] = field.neg(res.rref[i, f])
    return K


def matmul(A, B, field=None) -> np.ndarray:
    field = _default(field)
    A = as_matrix(A, field)
    B = as_matrix(B, field)
    if A.shape[1] != B.shape[0]:
        raise MatrixError(f"shape mismatch {A.shape} x {B.shape}")
    if isinstance(field, BaseField):
        if field.e == 1:
            return (A @ B) % field.p
        out = np.zeros((A.shape[0], B.shape[1]), dtype=np.int64)
        for k in range(A.shape[1]):
            out = field.add_table[out, field.mul_table[A[:, k][:, None], B[k][None, :]]]
        return out
    out = zeros(A.shape[0], B.shape[1], field)
    for i in range(A.shape[0]):
        for j in range(B.shape[1]):
            acc = 0
            for k in range(A.shape[1]):
                a, b = A[i, k], B[k, j]
                if a and b:
                    acc = field.add(acc, field.mul(a, b))
            out[i, j] = acc
    return out


def is_zero(A) -> bool:
    return not any(bool(x) for x in np.asarray(A).ravel())


def det(M, field=None):
    """Determinant; cofactor expansion up to 4x4, elimination beyond."""
    field = _default(field)
    A = as_matrix(M, field)
    n = A.shape[0]
    if A.shape != (n, n):
        raise MatrixError("determinant of a non-square matrix")
    if n == 0:
        return 1
    if n <= 4:
        return _det_cofactor([list(row) for row in A], field)
    A = A.copy() if not isinstance(field, BaseField) else A.astype(object)
    result = 1
    for c in range(n):
        i = next((i for i in range(c, n) if A[i, c] != 0), None)
        if i is None:
            return 0
        if i != c:
            A[[c, i]] = A[[i, c]]
            result = field.neg(result)
        result = field.mul(result, A[c, c])
        inv = field.inv(A[c, c])
        for j in range(c + 1, n):
            if A[j, c] != 0:
                f = field.mul(A[j, c], inv)
                for k in range(c, n):
                    A[j, k] = field.sub(A[j, k], field.mul(f, A[c, k]))
    return result


def _det_cofactor(rows, F):
    n = len(rows)
    if n == 1:
        return rows[0][0]
    if n == 2:
        return F.sub(F.mul(rows[0][0], rows[1][1]), F.mul(rows[0][1], rows[1][0]))
    acc = 0
    for j, a in enumerate(rows[0]):
        if a == 0:
            continue
        minor = [row[:j] + row[j + 1:] for row in rows[1:]]
        term = F.mul(a, _det_cofactor(minor, F))
        acc = F.add(acc, term) if j % 2 == 0 else F.sub(acc, term)
    return acc


def systematic_form(G, field=None) -> tuple[list[int], np.ndarray]:
    """Column permutation and systematic generator (I_k | R) of G's row space.

    ``perm[i]`` is the original index of the column placed at position i.
    The permutation is the identity whenever the leading k x k block of G
    is invertible.
    """
    field = _default(field)
    A = as_matrix(G, field)
    k, n = A.shape
    res = rref(A, field)
    if res.rank < k:
        raise MatrixError(f"generator matrix has rank {res.rank} < {k} rows")
    pivots = res.pivot_cols
    rest = [c for c in range(n) if c not in set(pivots)]
    perm = list(pivots) + rest
    return perm, res.rref[:, perm]


def random_matrix(nrows: int, ncols: int, field, rng) -> np.ndarray:
    if isinstance(field, BaseField):
        return rng.integers(0, field.q, size=(nrows, ncols)).astype(np.int64)
    out = zeros(nrows, ncols, field)
    for i in range(nrows):
        for j in range(ncols):
            out[i, j] = field.random_element(rng)
    return out


def random_full_rank(nrows: int, ncols: int, field, rng) -> np.ndarray:
    """Uniform full-rank matrix by rejection sampling."""
    target = min(nrows, ncols)
    while True:
        A = random_matrix(nrows, ncols, field, rng)
        if rank(A, field) == target:
            return A
