"""Maximal minors of C H~^T and the low-degree equations they yield.

Write C2 - C1 R = C (-R; I).  By Cauchy-Binet each maximal minor is

    P_J = sum_T  det((-R; I)_{T,J}) det(C_{*,T}),

and det((-R; I)_{T,J}) vanishes unless T2 = T n {k+2..n} lies in J, in which
case it is a signed minor of R.  Treating x_T = det(C_{*,T}) as unknowns
turns the coordinates of all P_J into a linear system over F_q (the matrix
M); row reduction with the lower-degree unknowns (T meeting the pinned
columns of C) placed rightmost exposes equations of degree r-1 or less.

Positions are 1-based and refer to the (possibly permuted) coordinates of
the extended code; R has rows 1..k+1 and columns k+2..n.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations
from math import comb

import numpy as np

from . import matrix_core as mc
from .modelling import VarSpace, det_poly
from .polynomials import Polynomial
from .rank_codes import ExtendedCode

OVERDETERMINED = "Overdetermined"
INTERMEDIATE = "Intermediate"
UNDERDETERMINED = "Underdetermined"

DEFAULT_COLUMN_CAP = 2_000_000


class MinorsError(ValueError):
    pass


@dataclass(frozen=True)
class RegimeClass:
    name: str
    n_equations: int  # m * C(n-k-1, r)
    over_threshold: int  # C(n, r) - 1
    under_threshold: int  # C(n-1, r)

    def __str__(self):
        return self.name


def regime(m: int, n: int, k: int, r: int) -> RegimeClass:
    if r < 1 or r > n - k - 1:
        raise MinorsError(f"no maximal minors: need 1 <= r <= n-k-1, got r={r}, n-k-1={n - k - 1}")
    mu = m * comb(n - k - 1, r)
    over = comb(n, r) - 1
    under = comb(n - 1, r)
    if mu >= over:
        name = OVERDETERMINED
    elif mu <= under:
        name = UNDERDETERMINED
    else:
        name = INTERMEDIATE
    return RegimeClass(name, mu, over, under)


def expected_syzygy_count(m: int, n: int, k: int, r: int) -> tuple[int, int]:
    reg = regime(m, n, k, r)
    if reg.name == OVERDETERMINED:
        return r - 1, comb(n - 1, r - 1) - 1
    if reg.name == INTERMEDIATE:
        return r - 1, reg.n_equations - comb(n - 1, r)
    return r, reg.n_equations


# ---------------------------------------------------------------------------
# signs


def _positions(T2, J) -> list[int]:
    J = sorted(J)
    try:
        return [J.index(t) + 1 for t in T2]
    except ValueError:
        raise MinorsError(f"T2={sorted(T2)} is not contained in J={J}") from None


def sign_sigma(T2, J, k: int, r: int) -> int:
    """Exponent of -1 in det((-R; I)_{T1 u T2, J}) = (-1)^s det(R_{T1, J minus T2}).

    Laplace expansion along the identity rows (which sit in positions
    d+1..r of T) gives r(r+1)/2 - d(d+1)/2 + sum Pos(t,J); the -R block
    adds d.  Reduced mod 2 this is r(r+1)/2 + d(d-1)/2 + sum Pos(t,J).
    """
    pos = _positions(T2, J)
    d = len(J) - len(pos)
    return (r * (r + 1) // 2 + d * (d - 1) // 2 + sum(pos)) % 2


def sign_sigma_printed(T2, J, k: int, r: int) -> int:
    """d(k+r) + d(d-1)/2 + sum Pos(t,J): the closed form as usually quoted.

    It differs from ``sign_sigma`` by d(k+r) + r(r+1)/2 (mod 2), which only
    matters in odd characteristic.
    """
    pos = _positions(T2, J)
    d = len(J) - len(pos)
    return (d * (k + r) + d * (d - 1) // 2 + sum(pos)) % 2


# ---------------------------------------------------------------------------
# minor variables


def colex(subsets):
    return sorted(subsets, key=lambda s: tuple(reversed(s)))


@dataclass(frozen=True)
class MinorVar:
    T: tuple[int, ...]
    degree: int


def minor_vars(n: int, r: int, pinned=(1,)) -> tuple[list[MinorVar], int]:
    """Columns of M by decreasing degree r - |T n pinned|, colex inside a degree.

    With a single pinned column j0 this is the j0-free block (degree r)
    followed by the subsets containing j0 (degree r-1).  Returns the list and
    the size of the degree-r block.
    """
    if isinstance(pinned, int):
        pinned = (pinned,)
    pinned = set(pinned)
    all_T = colex(combinations(range(1, n + 1), r))
    cols = [MinorVar(T, r - len(pinned.intersection(T))) for T in all_T]
    cols.sort(key=lambda mv: -mv.degree)  # stable: colex kept within a degree
    return cols, sum(1 for mv in cols if mv.degree == r)


def minor_poly(vs: VarSpace, T) -> Polynomial:
    """det(C_{*,T}) over F_q in the coefficient variables."""
    rows = [[vs.c_entry(t, l) for l in T] for t in range(1, vs.r + 1)]
    return det_poly(rows, vs.ring)


class _RMinors:
    """Cached minors det(R_{T1, cols}) over F_{q^m}, labels as in the module docstring."""

    def __init__(self, ext: ExtendedCode):
        self.R = ext.R
        self.tower = ext.tower
        self.k = ext.k
        self.cache: dict[tuple, int] = {((), ()): 1}

    def __call__(self, T1: tuple[int, ...], cols: tuple[int, ...]) -> int:
        key = (T1, cols)
        v = self.cache.get(key)
        if v is not None:
            return v
        F = self.tower
        row = T1[0] - 1
        acc = 0
        for c, col in enumerate(cols):
            a = int(self.R[row, col - self.k - 2])
            if not a:
                continue
            term = F.mul(a, self(T1[1:], cols[:c] + cols[c + 1:]))
            acc = F.add(acc, term) if c % 2 == 0 else F.sub(acc, term)
        self.cache[key] = acc
        return acc


def _pj_coefficients(ext: ExtendedCode, J: tuple[int, ...], rmin: _RMinors):
    """Yield (T, coefficient in F_{q^m}) for the nonzero terms of P_J."""
    F = ext.tower
    k, r = ext.k, ext.r
    low = range(1, k + 2)
    for s in range(r + 1):
        for T2 in combinations(J, s):
            d = r - s
            rest = tuple(j for j in J if j not in T2)
            sgn = sign_sigma(T2, J, k, r)
            for T1 in combinations(low, d):
                v = rmin(T1, rest)
                if v:
                    yield T1 + T2, (F.neg(v) if sgn else v)


def build_Pj(ext: ExtendedCode, vs: VarSpace, J) -> Polynomial:
    """P_J = det((C2 - C1 R)_{*,J}) via Cauchy-Binet, coefficients in F_{q^m}."""
    J = tuple(sorted(J))
    k, n, r = ext.k, ext.n, ext.r
    if len(J) != r or any(not k + 2 <= j <= n for j in J):
        raise MinorsError(f"J must be an r-subset of {k + 2}..{n}, got {J}")
    ring = vs.ring.with_coeffs(ext.tower)
    acc = ring.zero()
    rmin = _RMinors(ext)
    for T, c in _pj_coefficients(ext, J, rmin):
        P = minor_poly(vs, T).change_ring(ring)
        acc = acc + P.scale(c)
    return acc


# ---------------------------------------------------------------------------
# the linearised matrix M


@dataclass
class MaxMinorsMatrix:
    M: np.ndarray
    rows: list[tuple[int, tuple[int, ...]]]
    cols: list[MinorVar]
    n_high: int
    pinned: tuple[int, ...]
    regime: RegimeClass
    m: int
    n: int
    k: int
    r: int

    @property
    def shape(self):
        return self.M.shape

    @property
    def j0(self) -> int:
        return self.pinned[0]


def build_matrix_M(ext: ExtendedCode, pinned=(1,), column_cap: int = DEFAULT_COLUMN_CAP) -> MaxMinorsMatrix:
    """The F_q-linear system in the x_T; ``pinned`` starts with j0 (an int means j0 alone)."""
    if isinstance(pinned, int):
        pinned = (pinned,)
    pinned = tuple(pinned)
    tower = ext.tower
    m, n, k, r = tower.m, ext.n, ext.k, ext.r
    reg = regime(m, n, k, r)
    if comb(n, r) > column_cap:
        raise MinorsError(f"M would have {comb(n, r)} columns (cap {column_cap}); use the estimator")
    Js = colex(combinations(range(k + 2, n + 1), r))
    cols, n_high = minor_vars(n, r, pinned)
    col_of = {mv.T: i for i, mv in enumerate(cols)}
    nJ = len(Js)
    M = np.zeros((m * nJ, len(cols)), dtype=np.int64)
    rmin = _RMinors(ext)
    for jj, J in enumerate(Js):
        for T, c in _pj_coefficients(ext, J, rmin):
            M[jj::nJ, col_of[tuple(sorted(T))]] = tower.to_coords(c)
    rows = [(i, J) for i in range(1, m + 1) for J in Js]
    return MaxMinorsMatrix(M, rows, cols, n_high, pinned, reg, m, n, k, r)


@dataclass
class Harvest:
    """Result of extracting low-degree equations from M."""

    polys: list[Polynomial]
    degree: int
    rank: int
    expected: tuple[int, int]
    regime: RegimeClass
    degree_r_extra: list[Polynomial] = field(default_factory=list)

    @property
    def count(self) -> int:
        return len(self.polys)

    @property
    def as_expected(self) -> bool:
        return (self.degree, self.count) == self.expected


def extract_J_equations(MM: MaxMinorsMatrix, vs: VarSpace, include_degree_r: bool = False) -> Harvest:
    """Row-reduce M and translate rows back into polynomials in the coefficient variables.

    Rows pivoting in the pinned-column blocks have degree at most r-1.  If
    there are none, every nonzero row (degree r) is returned instead.
    """
    if vs.spec is None or set(vs.spec.pinned) != set(MM.pinned) or vs.spec.j0 != MM.j0:
        raise MinorsError("varspace and M disagree on the pinned columns")
    F = vs.ring.base
    res = mc.rref(MM.M, F)
    r = vs.r
    cache: dict[tuple, Polynomial] = {}

    def row_poly(i: int) -> Polynomial:
        row = res.rref[i]
        acc: dict[int, int] = {}
        for c in np.nonzero(row)[0]:
            T = MM.cols[c].T
            if T not in cache:
                cache[T] = minor_poly(vs, T)
            coef = int(row[c])
            for mono, v in cache[T].terms.items():
                w = F.add(acc.get(mono, 0), F.mul(coef, v))
                if w:
                    acc[mono] = w
                else:
                    acc.pop(mono, None)
        return Polynomial(vs.ring, acc)

    low_rows = [i for i, p in enumerate(res.pivot_cols) if p >= MM.n_high]
    high_rows = [i for i, p in enumerate(res.pivot_cols) if p < MM.n_high]
    expected = expected_syzygy_count(MM.m, MM.n, MM.k, MM.r)
    if low_rows:
        polys = [row_poly(i) for i in low_rows]
        extra = [row_poly(i) for i in high_rows] if include_degree_r else []
        return Harvest(polys, r - 1, res.rank, expected, MM.regime, extra)
    polys = [row_poly(i) for i in high_rows]
    return Harvest(polys, r, res.rank, expected, MM.regime)


def pinned_columns(spec) -> tuple[int, ...]:
    return (spec.j0,) + tuple(spec.P)


def harvest(ext: ExtendedCode, vs: VarSpace, include_degree_r: bool = False) -> Harvest:
    MM = build_matrix_M(ext, pinned_columns(vs.spec))
    return extract_J_equations(MM, vs, include_degree_r)


def linearised_residuals(MM: MaxMinorsMatrix, vs: VarSpace, point) -> np.ndarray:
    """M times the vector of det(C_{*,T}) evaluated at an F_q point (should vanish)."""
    F = vs.ring.base
    x = np.array([minor_poly(vs, mv.T).evaluate(point) for mv in MM.cols], dtype=np.int64)
    return mc.matmul(MM.M, x[:, None], F)[:, 0]
