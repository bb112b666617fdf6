"""Algebraic modellings of rank decoding over F_q.

The core is the Ourivski-Johansson system: with C~ = C + <y> having parity
check H~ = (-R^T | I), find S (m x r) and C (r x n) over F_q such that

    (1 alpha ... alpha^{m-1}) S C H~^T = 0.

The default specialization follows Algorithm 1: S has first column e_1 and
first row e_1^T, the rows T (an (r-1)-subset of 2..m) of S restricted to
columns 2..r form the identity, and one column j0 of C is pinned to e_1.
With those choices S_1 = 1 and S_t = alpha^{T_{t-1} - 1} + sum_a s_{a,t}
alpha^{a-1} for t >= 2, a running over the free rows.

The column variant moves the normalization to C: besides j0, the columns
P = (p_2, .., p_r) of C are pinned to e_2, .., e_r, and S keeps only its
first column e_1 (all m rows of columns 2..r are free).  Then S_t =
lambda e_{p_t}, and the maximal minors of C involving pinned columns drop
in degree, which is what makes the underdetermined regime tractable.

Variables are numbered support first (row-major over free rows x columns
2..r), then coefficient variables (row-major over the unpinned columns of
C).  All row/column labels in names and public indices are 1-based.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from itertools import product

import numpy as np

from . import matrix_core as mc
from .field_core import FieldTower, base_field
from .polynomials import Polynomial, PolyRing
from .rank_codes import DecodingInstance, ExtendedCode, mat_of


class ModellingError(ValueError):
    pass


@dataclass(frozen=True)
class Specialization:
    j0: int
    T: tuple[int, ...] = ()
    P: tuple[int, ...] = ()

    @property
    def kind(self) -> str:
        return "columns" if self.P else "rows"

    @cached_property
    def pinned(self) -> dict[int, int]:
        """Pinned column of C -> index t of the unit vector e_t it carries."""
        out = {self.j0: 1}
        for t, p in enumerate(self.P, start=2):
            out[p] = t
        return out

    def validate(self, m: int, n: int, r: int) -> None:
        if not 1 <= self.j0 <= n:
            raise ModellingError(f"pinned column {self.j0} outside 1..{n}")
        if self.P:
            if self.T:
                raise ModellingError("give either support rows T or pinned columns P, not both")
            cols = (self.j0,) + tuple(self.P)
            if len(self.P) != r - 1 or len(set(cols)) != r or any(not 1 <= p <= n for p in self.P):
                raise ModellingError(f"P must be r-1 = {r - 1} distinct columns of 1..{n} other than {self.j0}")
            return
        if len(self.T) != r - 1:
            raise ModellingError(f"block T must have r-1 = {r - 1} rows, got {len(self.T)}")
        if len(set(self.T)) != len(self.T):
            raise ModellingError(f"block T has repeated rows: {self.T}")
        if any(not 2 <= t <= m for t in self.T):
            raise ModellingError(f"block T must lie in 2..{m}: {self.T}")


def default_specialization(r: int) -> Specialization:
    """Pinned first column, identity block on rows 2..r."""
    return Specialization(1, tuple(range(2, r + 1)))


def column_specialization(r: int) -> Specialization:
    """Columns 1..r of C pinned to the identity."""
    return Specialization(1, (), tuple(range(2, r + 1)))


@dataclass
class VarSpace:
    """Variable layout: support block first, coefficient block second."""

    ring: PolyRing
    n_S: int
    n_C: int
    m: int = 0
    n: int = 0
    r: int = 0
    spec: Specialization | None = None
    free_rows: tuple[int, ...] = ()
    free_cols: tuple[int, ...] = ()

    def __post_init__(self):
        self._row_pos = {a: i for i, a in enumerate(self.free_rows)}
        self._col_pos = {l: i for i, l in enumerate(self.free_cols)}

    @property
    def support_vars(self) -> range:
        return range(0, self.n_S)

    @property
    def coeff_vars(self) -> range:
        return range(self.n_S, self.n_S + self.n_C)

    @property
    def nvars(self) -> int:
        return self.n_S + self.n_C

    def s_index(self, a: int, t: int) -> int:
        """Index of s_{a,t}: a a free S row, t in 2..r."""
        return self._row_pos[a] * (self.r - 1) + (t - 2)

    def c_index(self, t: int, l: int) -> int:
        """Index of c_{t,l}: t in 1..r, l an unpinned column."""
        col = self._col_pos.get(l)
        if col is None:
            raise ModellingError(f"column {l} is pinned")
        return self.n_S + (t - 1) * len(self.free_cols) + col

    def c_entry(self, t: int, l: int) -> Polynomial:
        """C[t,l] as a polynomial (a constant on pinned columns)."""
        u = self.spec.pinned.get(l)
        if u is not None:
            return self.ring.const(1 if t == u else 0)
        return self.ring.gen(self.c_index(t, l))


def oj_varspace(m: int, n: int, r: int, spec: Specialization, q: int = 2) -> VarSpace:
    spec.validate(m, n, r)
    if spec.kind == "columns":
        free = tuple(range(1, m + 1))
    else:
        free = tuple(a for a in range(2, m + 1) if a not in spec.T)
    cols = tuple(l for l in range(1, n + 1) if l not in spec.pinned)
    n_S = len(free) * (r - 1)
    n_C = r * len(cols)
    names = [f"s_{{{a},{t}}}" for a in free for t in range(2, r + 1)]
    names += [f"c_{{{t},{l}}}" for t in range(1, r + 1) for l in cols]
    ring = PolyRing(n_S + n_C, q, names=names)
    return VarSpace(ring, n_S, n_C, m, n, r, spec, free, cols)


@dataclass
class BilinearSystem:
    polys: list[Polynomial]
    varspace: VarSpace
    specialization: Specialization | None = None
    meta: dict = field(default_factory=dict)


# ---------------------------------------------------------------------------
# Ourivski-Johansson


def support_constants(tower: FieldTower, spec: Specialization, r: int) -> list[int]:
    """Constant part of S_t in F_{q^m}, t = 1..r."""
    if spec.kind == "columns":
        return [1] + [0] * (r - 1)
    return [1] + [tower.alpha_pow(a - 1) for a in spec.T[: r - 1]]


def oj_ext_polys(ext: ExtendedCode, vs: VarSpace) -> list[Polynomial]:
    """The n-k-1 equations over F_{q^m}, before splitting into coordinates."""
    tower = ext.tower
    m, n, k, r = vs.m, vs.n, ext.k, vs.r
    spec = vs.spec
    ring = vs.ring.with_coeffs(tower)
    consts = support_constants(tower, spec, r)
    apow = [tower.alpha_pow(i) for i in range(m)]
    pinned = spec.pinned
    out = []
    for j in range(n - k - 1):
        acc: dict[int, int] = {}

        def add(mono: int, c: int) -> None:
            if c:
                v = tower.add(acc.get(mono, 0), c)
                if v:
                    acc[mono] = v
                else:
                    acc.pop(mono, None)

        for l in range(1, n + 1):
            h = int(ext.Htilde[j, l - 1])
            if not h:
                continue
            u = pinned.get(l)
            if u is not None:
                # S_u * h
                add(0, tower.mul(consts[u - 1], h))
                if u >= 2:
                    for a in vs.free_rows:
                        add(ring.var(vs.s_index(a, u)), tower.mul(apow[a - 1], h))
                continue
            for t in range(1, r + 1):
                cv = ring.var(vs.c_index(t, l))
                add(cv, tower.mul(consts[t - 1], h))
                if t >= 2:
                    for a in vs.free_rows:
                        sv = ring.var(vs.s_index(a, t))
                        add(sv | cv if ring.binary else ring.mono_mul(sv, cv), tower.mul(apow[a - 1], h))
        out.append(Polynomial(ring, acc))
    return out


def build_oj_system(ext: ExtendedCode, spec: Specialization | None = None) -> BilinearSystem:
    tower = ext.tower
    r = ext.r
    spec = spec or default_specialization(r)
    vs = oj_varspace(tower.m, ext.n, r, spec, tower.q)
    polys: list[Polynomial] = []
    for E in oj_ext_polys(ext, vs):
        polys.extend(E.split_coords(vs.ring))
    return BilinearSystem(polys, vs, spec)


def planted_assignment(ext: ExtendedCode, spec: Specialization) -> list[int] | None:
    """The F_q point of the OJ system matching the planted error, if compatible.

    Returns None when e vanishes at the pinned column or the rows {1} u T
    (columns {j0} u P for the column variant) of Mat(lambda e) are not
    independent.
    """
    inst = ext.instance
    if inst.planted is None:
        raise ModellingError("instance carries no planted data")
    tower = inst.tower
    m, n, r = tower.m, inst.n, inst.r
    e = ext.to_permuted(inst.error)
    ej = int(e[spec.j0 - 1])
    if ej == 0:
        return None
    lam = tower.inv(ej)
    E = mat_of([tower.mul(lam, int(x)) for x in e], tower)
    if spec.kind == "columns":
        S = E[:, [spec.j0 - 1] + [p - 1 for p in spec.P]]
        if mc.rank(S, tower.base) < r:
            return None
        Ct = _solve_left(S.T.copy(), E.T.copy(), tower.base)
        if Ct is None:
            return None
        Cfull = Ct.T
    else:
        rows = [0] + [t - 1 for t in spec.T]
        Cfull = E[rows, :]
        if mc.rank(Cfull, tower.base) < r:
            return None
        S = _solve_left(Cfull, E, tower.base)
        if S is None:
            return None
    vs = oj_varspace(m, n, r, spec, tower.q)
    point = [0] * vs.nvars
    for a in vs.free_rows:
        for t in range(2, r + 1):
            point[vs.s_index(a, t)] = int(S[a - 1, t - 1])
    for t in range(1, r + 1):
        for l in vs.free_cols:
            point[vs.c_index(t, l)] = int(Cfull[t - 1, l - 1])
    return point


def _solve_left(C: np.ndarray, E: np.ndarray, F) -> np.ndarray | None:
    """S with S C = E for full-row-rank C (r x n), or None if inconsistent.

    Also used transposed: C^T S^T = E^T with S of full column rank.
    """
    r = C.shape[0]
    # S C = E  <=>  C^T S^T = E^T; row-reduce (C^T | E^T)
    aug = np.hstack([C.T, E.T])
    res = mc.rref(aug, F)
    if any(p >= r for p in res.pivot_cols):
        return None
    return res.rref[:r, r:].T.copy()


def field_equations(vs: VarSpace) -> list[Polynomial]:
    """x^q - x for each variable, in an unreduced ring (x^q does not collapse)."""
    ring = PolyRing(vs.nvars, vs.ring.q, names=vs.ring.names, reduced=False)
    q = ring.q
    return [Polynomial(ring, {q << (i * ring.width): 1, ring.var(i): ring.base.neg(1)})
            for i in range(vs.nvars)]


# ---------------------------------------------------------------------------
# Kipnis-Shamir and syndrome modellings (comparison builders)


def code_basis_matrices(inst: DecodingInstance) -> list[np.ndarray]:
    """Mat(y) followed by Mat(alpha^a g_b), an F_q-basis of Mat(C)."""
    tower = inst.tower
    mats = [mat_of(inst.y, tower)]
    for b in range(inst.k):
        for a in range(tower.m):
            row = [tower.mul(tower.alpha_pow(a), int(x)) for x in inst.code.G[b]]
            mats.append(mat_of(row, tower))
    return mats


def build_ks_system(inst: DecodingInstance) -> BilinearSystem:
    """(sum z_i M_i) (I_{n-r}; K) = 0 with z_0..z_km and K (r x (n-r)) as variables."""
    tower = inst.tower
    m, n, r = tower.m, inst.n, inst.r
    mats = code_basis_matrices(inst)
    nz = len(mats)
    nk = r * (n - r)
    names = [f"z_{{{i}}}" for i in range(nz)]
    names += [f"k_{{{t},{c}}}" for t in range(1, r + 1) for c in range(1, n - r + 1)]
    ring = PolyRing(nz + nk, tower.q, names=names)
    F = ring.coeffs
    stack = np.stack(mats)  # (nz, m, n)
    polys = []
    for i in range(m):
        for c in range(n - r):
            acc: dict[int, int] = {}
            for z in range(nz):
                v = int(stack[z, i, c])
                if v:
                    acc[ring.var(z)] = F.add(acc.get(ring.var(z), 0), v)
                for t in range(r):
                    w = int(stack[z, i, n - r + t])
                    if w:
                        mono = ring.mono_mul(ring.var(z), ring.var(nz + t * (n - r) + c))
                        acc[mono] = F.add(acc.get(mono, 0), w)
            polys.append(Polynomial(ring, {a: v for a, v in acc.items() if v}))
    vs = VarSpace(ring, nz, nk, m, n, r)
    return BilinearSystem(polys, vs, None, {"modelling": "kipnis-shamir"})


def build_syndrome_system(inst: DecodingInstance, H: np.ndarray | None = None) -> BilinearSystem:
    """(1 alpha ... alpha^{m-1}) S C H^T = y H^T in all mr + nr entries of S and C."""
    tower = inst.tower
    m, n, r = tower.m, inst.n, inst.r
    H = inst.code.parity_check() if H is None else H
    nk = H.shape[0]
    names = [f"s_{{{a},{t}}}" for a in range(1, m + 1) for t in range(1, r + 1)]
    names += [f"c_{{{t},{l}}}" for t in range(1, r + 1) for l in range(1, n + 1)]
    ring = PolyRing(m * r + r * n, tower.q, names=names)
    ering = ring.with_coeffs(tower)
    apow = [tower.alpha_pow(a) for a in range(m)]
    syn = mc.matmul(mc.as_matrix([list(inst.y)], tower), H.T, tower)[0]
    polys = []
    for j in range(nk):
        acc: dict[int, int] = {}
        for l in range(n):
            h = int(H[j, l])
            if not h:
                continue
            for a in range(m):
                ah = tower.mul(apow[a], h)
                for t in range(r):
                    mono = ring.mono_mul(ring.var(a * r + t), ring.var(m * r + t * n + l))
                    v = tower.add(acc.get(mono, 0), ah)
                    if v:
                        acc[mono] = v
                    else:
                        acc.pop(mono, None)
        s = int(syn[j])
        if s:
            acc[0] = tower.neg(s)
        polys.extend(Polynomial(ering, acc).split_coords(ring))
    vs = VarSpace(ring, m * r, r * n, m, n, r)
    return BilinearSystem(polys, vs, None, {"modelling": "syndrome"})


# ---------------------------------------------------------------------------
# Jacobian structure and kernel vectors


def _kron(A, B, F) -> list[list[int]]:
    out = []
    for arow in A:
        for brow in B:
            out.append([F.mul(int(a), int(b)) for a in arow for b in brow])
    return out


def jacobian_kronecker_check(A, x_shape: tuple[int, int], Y, field=None) -> bool:
    """Symbolically check Jac(vec(A X Y)) = A (x) Y^T (rows) and Y^T (x) A (columns)."""
    A = np.asarray(A, dtype=object)
    Y = np.asarray(Y, dtype=object)
    a, b = x_shape
    if A.shape[1] != a or Y.shape[0] != b:
        raise ModellingError(f"dimension mismatch: A {A.shape}, X {x_shape}, Y {Y.shape}")
    F = field if field is not None else base_field(2)
    ring = PolyRing(a * b, F.q, coeffs=F)
    X = [[ring.gen(s * b + t) for t in range(b)] for s in range(a)]
    p, c = A.shape[0], Y.shape[1]
    AXY = [[ring.zero() for _ in range(c)] for _ in range(p)]
    for i in range(p):
        for j in range(c):
            acc = ring.zero()
            for s in range(a):
                if not A[i, s]:
                    continue
                for t in range(b):
                    if Y[t, j]:
                        acc = acc + X[s][t].scale(F.mul(int(A[i, s]), int(Y[t, j])))
            AXY[i][j] = acc

    def jac(eqs, xs):
        return [[e.derivative(x).constant_term() if e.derivative(x).degree() <= 0 else None
                 for x in xs] for e in eqs]

    row_eqs = [AXY[i][j] for i in range(p) for j in range(c)]
    row_vars = [s * b + t for s in range(a) for t in range(b)]
    col_eqs = [AXY[i][j] for j in range(c) for i in range(p)]
    col_vars = [s * b + t for t in range(b) for s in range(a)]
    ok_row = jac(row_eqs, row_vars) == _kron(A, Y.T, F)
    ok_col = jac(col_eqs, col_vars) == _kron(Y.T, A, F)
    return ok_row and ok_col


def coefficient_matrix_CH(ext: ExtendedCode, vs: VarSpace) -> list[list[Polynomial]]:
    """C H~^T as an r x (n-k-1) matrix of linear polynomials over F_{q^m}."""
    tower = ext.tower
    ring = vs.ring.with_coeffs(tower)
    n, k, r = ext.n, ext.k, vs.r
    out = []
    for t in range(1, r + 1):
        row = []
        for j in range(n - k - 1):
            acc: dict[int, int] = {}
            for l in range(1, n + 1):
                h = int(ext.Htilde[j, l - 1])
                if not h:
                    continue
                if l in vs.spec.pinned:
                    if vs.spec.pinned[l] == t:
                        acc[0] = tower.add(acc.get(0, 0), h)
                    continue
                acc[ring.var(vs.c_index(t, l))] = h
            row.append(Polynomial(ring, {a: v for a, v in acc.items() if v}))
        out.append(row)
    return out


def det_poly(rows: list[list[Polynomial]], ring: PolyRing) -> Polynomial:
    """Determinant of a square matrix of polynomials by Laplace expansion."""
    n = len(rows)
    if n == 0:
        return ring.one()
    if n == 1:
        return rows[0][0]
    acc = ring.zero()
    for j in range(n):
        if rows[0][j].is_zero():
            continue
        minor = [row[:j] + row[j + 1:] for row in rows[1:]]
        term = rows[0][j] * det_poly(minor, ring)
        acc = acc + term if j % 2 == 0 else acc - term
    return acc


def kernel_vector_VJ(ext: ExtendedCode, vs: VarSpace, J) -> list[Polynomial]:
    """V_J for a size-r subset J of 1..n-k-1 (1-based), built on rows 2..r of C H~^T."""
    r = vs.r
    J = sorted(J)
    if len(J) != r:
        raise ModellingError(f"|J| must be r = {r}")
    nk1 = ext.n - ext.k - 1
    if any(not 1 <= j <= nk1 for j in J):
        raise ModellingError(f"J must lie in 1..{nk1}")
    CH = coefficient_matrix_CH(ext, vs)
    ring = vs.ring.with_coeffs(ext.tower)
    lower = CH[1:]
    V = [ring.zero() for _ in range(nk1)]
    for l, j in enumerate(J, start=1):
        cols = [jj - 1 for jj in J if jj != j]
        minor = det_poly([[row[c] for c in cols] for row in lower], ring)
        V[j - 1] = minor if (l + 1) % 2 == 0 else -minor
    return V


def dot(u: list[Polynomial], v: list[Polynomial], ring: PolyRing) -> Polynomial:
    acc = ring.zero()
    for a, b in zip(u, v):
        if a and b:
            acc = acc + a * b
    return acc


def minor_CH(ext: ExtendedCode, vs: VarSpace, J) -> Polynomial:
    """det((C H~^T)_{*,J}) over F_{q^m}, J a subset of 1..n-k-1."""
    CH = coefficient_matrix_CH(ext, vs)
    ring = vs.ring.with_coeffs(ext.tower)
    cols = [j - 1 for j in sorted(J)]
    return det_poly([[row[c] for c in cols] for row in CH], ring)


def all_points(nvars: int, q: int):
    """Every F_q point of the given dimension (tiny systems only)."""
    return product(range(q), repeat=nvars)
