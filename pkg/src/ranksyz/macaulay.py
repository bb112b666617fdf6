"""Degree-bounded XL solving with degree-fall harvesting.

At degree d the Macaulay matrix holds every product t*f (t a reduced
monomial, deg t <= d - deg f), columns are monomials in grevlex-descending
order.  After forward elimination an echelon row whose leading monomial has
degree < d consists only of lower-degree terms; it is a degree fall when its
leading monomial does not already lead a row of the degree-(d-1) matrix.

Falls are appended to the system and the same degree is re-run until no new
ones appear.  Linear rows are turned into substitutions x_p = L(others),
which is exact on F_q points, and the variables disappear from the system.
The run ends when every variable is substituted (Solved), a nonzero
constant shows up (Inconsistent) or the degree cap / column cap is hit.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from itertools import combinations

import numpy as np

from . import _gf2
from . import matrix_core as mc
from .field_core import BaseField
from .polynomials import Polynomial, PolyRing

SOLVED = "Solved"
INCONSISTENT = "Inconsistent"
DEGREE_CAP = "DegreeCapReached"

DEFAULT_COLUMN_CAP = 400_000

_MASK64 = (1 << 64) - 1


@dataclass
class MacaulayMatrix:
    degree: int
    rows: list[tuple[int, int]]  # (multiplier monomial, source poly index)
    columns: list[int]
    matrix: np.ndarray

    @property
    def shape(self):
        return self.matrix.shape


@dataclass
class SolveReport:
    status: str
    d_ff: int | None = None
    d_max: int | None = None
    shapes: list[tuple[int, int, int]] = field(default_factory=list)
    solution: list[int] | None = None
    trace: list[dict] = field(default_factory=list)
    n_falls: int = 0
    elapsed: float = 0.0
    note: str = ""

    @property
    def solved(self) -> bool:
        return self.status == SOLVED


# ---------------------------------------------------------------------------
# generic (any q) construction


def monomials_upto(ring: PolyRing, d: int, variables=None) -> list[int]:
    return ring.monomials_upto(d, variables)


def build_macaulay(system: list[Polynomial], ring: PolyRing, d: int, prune: bool = False,
                   column_cap: int = DEFAULT_COLUMN_CAP, variables=None) -> MacaulayMatrix:
    """Dense Macaulay matrix at degree d; columns are all monomials up to d unless pruned."""
    F = ring.coeffs
    rows, tags = [], []
    mono_cache: dict[int, list[int]] = {}
    for idx, f in enumerate(system):
        if f.is_zero():
            raise ValueError("zero polynomial in system")
        e = f.degree()
        if e > d:
            continue
        if d - e not in mono_cache:
            mono_cache[d - e] = ring.monomials_upto(d - e, variables)
        for t in mono_cache[d - e]:
            rows.append(f.mul_monomial(t))
            tags.append((t, idx))
    if prune:
        used = set()
        for p in rows:
            used.update(p.terms)
        columns = sorted(used, key=ring.key)
    else:
        columns = ring.monomials_upto(d, variables)
    if len(columns) > column_cap:
        raise ValueError(f"Macaulay matrix would have {len(columns)} columns (cap {column_cap})")
    col_of = {a: i for i, a in enumerate(columns)}
    M = np.zeros((len(rows), len(columns)), dtype=np.int64)
    for i, p in enumerate(rows):
        for a, c in p.terms.items():
            M[i, col_of[a]] = c
    del F
    return MacaulayMatrix(d, tags, columns, M)


# ---------------------------------------------------------------------------
# elimination back ends


class _Elim:
    """Forward echelon form of a Macaulay matrix; rows exposed as polynomials."""

    nrows: int
    ncols: int
    rank: int
    lead_cols: list[int]

    def lead_degree(self, i: int) -> int:
        return self.col_deg[self.lead_cols[i]]

    def lead_mono(self, i: int) -> int:
        return self.col_mono(self.lead_cols[i])


class _GenericElim(_Elim):
    def __init__(self, polys, ring: PolyRing, d: int, active, column_cap: int):
        mm = build_macaulay(polys, ring, d, prune=True, column_cap=column_cap, variables=active)
        self.ring = ring
        self.nrows, self.ncols = mm.shape
        self.columns = mm.columns
        self.col_deg = [ring.mono_deg(a) for a in mm.columns]
        res = mc.rref(mm.matrix, ring.base) if mm.matrix.size else mc.EchelonResult(mm.matrix, 0, [])
        self.res = res
        self.rank = res.rank
        self.lead_cols = list(res.pivot_cols)

    def col_mono(self, c: int) -> int:
        return self.columns[c]

    def row_poly(self, i: int) -> Polynomial:
        row = self.res.rref[i]
        return Polynomial(self.ring, {self.columns[c]: int(row[c]) for c in np.nonzero(row)[0]})


def _words(monos, W: int) -> np.ndarray:
    arr = np.array(monos, dtype=object)
    out = np.empty((len(monos), W), dtype=np.uint64)
    for w in range(W):
        out[:, w] = ((arr >> (64 * w)) & _MASK64).astype(np.uint64) if len(monos) else 0
    return out


def _void(a: np.ndarray) -> np.ndarray:
    a = np.ascontiguousarray(a)
    return a.view(np.dtype((np.void, a.dtype.itemsize * a.shape[1]))).ravel()


class _GF2Elim(_Elim):
    """Bit-packed path for q = 2; monomials handled as arrays of 64-bit words."""

    def __init__(self, polys, ring: PolyRing, d: int, active, column_cap: int):
        self.ring = ring
        W = max(1, (ring.nvars + 63) // 64)
        self.W = W
        mult_cache: dict[int, np.ndarray] = {}
        chunks, row_chunks = [], []
        base = 0
        for f in polys:
            e = f.degree()
            if e > d or e < 0:
                continue
            delta = d - e
            if delta not in mult_cache:
                mult_cache[delta] = _words(_squarefree_upto(active, delta), W)
            T = mult_cache[delta]
            Fw = _words(list(f.terms), W)
            prod = (T[:, None, :] | Fw[None, :, :]).reshape(-1, W)
            chunks.append(prod)
            row_chunks.append(np.repeat(np.arange(base, base + T.shape[0], dtype=np.uint64), Fw.shape[0]))
            base += T.shape[0]
        if not chunks:
            self._empty()
            return
        prod = np.concatenate(chunks)
        rowid = np.concatenate(row_chunks)
        del chunks, row_chunks
        # cancel repeated monomials inside a row (x*x = x merges terms)
        keyed = np.empty((prod.shape[0], W + 1), dtype=np.uint64)
        keyed[:, 0] = rowid
        keyed[:, 1:] = prod
        del prod, rowid
        _, first, counts = np.unique(_void(keyed), return_index=True, return_counts=True)
        keep = first[counts & 1 == 1]
        keyed = keyed[keep]
        rows_raw = keyed[:, 0].astype(np.int64)
        monos = np.ascontiguousarray(keyed[:, 1:])
        del keyed
        ukeys, uidx, inv = np.unique(_void(monos), return_index=True, return_inverse=True)
        umonos = monos[uidx]
        ncols = umonos.shape[0]
        if ncols > column_cap:
            raise ColumnCapError(ncols, column_cap)
        deg = np.zeros(ncols, dtype=np.int64)
        for w in range(W):
            deg += np.bitwise_count(umonos[:, w]).astype(np.int64)
        order = np.lexsort(tuple(umonos[:, w] for w in range(W)) + (-deg,))
        rank_of = np.empty(ncols, dtype=np.int64)
        rank_of[order] = np.arange(ncols)
        cols = rank_of[inv.ravel()]
        self.col_words = umonos[order]
        self.col_deg = deg[order].tolist()
        urows, rows = np.unique(rows_raw, return_inverse=True)
        self.nrows, self.ncols = len(urows), ncols
        P = np.zeros((self.nrows, max(1, (ncols + 63) // 64)), dtype=np.uint64)
        _gf2.set_bits(P, rows.ravel().astype(np.int64), cols)
        piv = _gf2.echelon_inplace(P, ncols, False)
        self.P = P
        self.rank = len(piv)
        self.lead_cols = [int(c) for c in piv]

    def _empty(self):
        self.nrows = self.ncols = self.rank = 0
        self.lead_cols = []
        self.col_deg = []
        self.col_words = np.zeros((0, self.W), dtype=np.uint64)
        self.P = np.zeros((0, 1), dtype=np.uint64)

    def col_mono(self, c: int) -> int:
        v = 0
        for w in range(self.W):
            v |= int(self.col_words[c, w]) << (64 * w)
        return v

    def row_poly(self, i: int) -> Polynomial:
        support = _gf2.row_support(self.P, i, self.ncols)
        return Polynomial(self.ring, {self.col_mono(int(c)): 1 for c in support})


class ColumnCapError(RuntimeError):
    def __init__(self, ncols: int, cap: int):
        super().__init__(f"Macaulay matrix needs {ncols} columns (cap {cap})")
        self.ncols = ncols


def _squarefree_upto(variables, delta: int) -> list[int]:
    out = []
    for deg in range(delta + 1):
        for c in combinations(variables, deg):
            m = 0
            for v in c:
                m |= 1 << v
            out.append(m)
    return out


def _eliminate(polys, ring: PolyRing, d: int, active, column_cap: int) -> _Elim:
    if ring.binary and isinstance(ring.coeffs, BaseField):
        return _GF2Elim(polys, ring, d, active, column_cap)
    return _GenericElim(polys, ring, d, active, column_cap)


# ---------------------------------------------------------------------------
# XL driver


def _linear_substitutions(lin: list[Polynomial], ring: PolyRing, active: list[int]):
    """Solve linear relations for their leading variables.

    Returns (mapping var -> polynomial in the remaining variables, inconsistent flag).
    """
    F = ring.base
    cols = sorted(active)  # variable 0 first: grevlex leading variable
    pos = {v: i for i, v in enumerate(cols)}
    A = np.zeros((len(lin), len(cols) + 1), dtype=np.int64)
    for i, p in enumerate(lin):
        for a, c in p.terms.items():
            if a == 0:
                A[i, -1] = c
            else:
                A[i, pos[ring.mono_vars(a)[0]]] = c
    res = mc.rref(A, F)
    mapping = {}
    for i, pc in enumerate(res.pivot_cols):
        if pc == len(cols):
            return {}, True
        row = res.rref[i]
        terms = {}
        for c in np.nonzero(row)[0]:
            if c == pc:
                continue
            key = 0 if c == len(cols) else ring.var(cols[c])
            terms[key] = F.neg(int(row[c]))
        mapping[cols[pc]] = Polynomial(ring, terms)
    return mapping, False


def xl_solve(system: list[Polynomial], ring: PolyRing | None = None, d_start: int | None = None,
             d_cap: int = 5, column_cap: int = DEFAULT_COLUMN_CAP, trace=None,
             original: list[Polynomial] | None = None, variables=None) -> SolveReport:
    """Solve a polynomial system with a unique F_q solution by degree-bounded XL.

    ``trace`` may be a callable receiving one dict per Macaulay matrix.
    ``original`` (default: ``system``) is what the solution is verified against.
    ``variables`` restricts both the multipliers and the unknowns to solve
    for; the system must then only involve those variables, and entries of
    the solution outside them are left at 0.
    """
    t0 = time.perf_counter()
    polys = [p for p in system if not p.is_zero()]
    if ring is None:
        if not polys:
            raise ValueError("empty system needs an explicit ring")
        ring = polys[0].ring
    original = list(system if original is None else original)
    report = SolveReport(DEGREE_CAP)
    maxdeg = max((p.degree() for p in polys), default=1)
    d = max(maxdeg, 1) if d_start is None else max(d_start, 1)
    subs: dict[int, Polynomial] = {}
    active = list(range(ring.nvars)) if variables is None else sorted(set(variables))
    baseline_cache: dict[tuple, set[int]] = {}
    version = 0

    def finish(status: str, note: str = "") -> SolveReport:
        report.status = status
        report.note = note
        report.elapsed = time.perf_counter() - t0
        return report

    def low_leads(E: _Elim, bound: int) -> set[int]:
        return {E.lead_mono(i) for i in range(E.rank) if E.lead_degree(i) < bound}

    while True:
        if any(p.degree() == 0 for p in polys):
            return finish(INCONSISTENT, "nonzero constant in system")
        if not active:
            break
        if d > d_cap:
            return finish(DEGREE_CAP)
        if not polys:
            return finish(DEGREE_CAP, "system exhausted with free variables left")
        ts = time.perf_counter()
        try:
            E = _eliminate(polys, ring, d, active, column_cap)
        except ColumnCapError as exc:
            return finish(DEGREE_CAP, str(exc))
        key = (version, d - 1)
        if key not in baseline_cache:
            if d - 1 >= 1:
                B = _eliminate(polys, ring, d - 1, active, column_cap)
                baseline_cache[key] = low_leads(B, d)
            else:
                baseline_cache[key] = set()
        baseline = baseline_cache[key]
        new_rows = [i for i in range(E.rank) if E.lead_degree(i) < d and E.lead_mono(i) not in baseline]
        lin_rows = [i for i in range(E.rank) if E.lead_degree(i) <= 1]
        entry = {"d": d, "rows": E.nrows, "cols": E.ncols, "rank": E.rank,
                 "new_falls": len(new_rows), "elapsed_ms": round(1000 * (time.perf_counter() - ts), 3)}
        report.trace.append(entry)
        report.shapes.append((d, E.nrows, E.ncols))
        if trace is not None:
            trace(entry)
        if new_rows:
            report.n_falls += len(new_rows)
            if report.d_ff is None:
                report.d_ff = d
        if new_rows or lin_rows:
            report.d_max = d if report.d_max is None else max(report.d_max, d)
        if any(E.lead_degree(i) == 0 for i in lin_rows):
            return finish(INCONSISTENT, f"constant in span at degree {d}")
        if lin_rows:
            lin = [E.row_poly(i) for i in lin_rows]
            mapping, bad = _linear_substitutions(lin, ring, active)
            if bad:
                return finish(INCONSISTENT, f"inconsistent linear relations at degree {d}")
            for v in list(subs):
                subs[v] = subs[v].substitute(mapping)
            subs.update(mapping)
            active = [v for v in active if v not in mapping]
            polys = _dedupe([p.substitute(mapping) for p in polys])
            version += 1
            continue
        if new_rows:
            polys = _dedupe(polys + [E.row_poly(i) for i in new_rows])
            version += 1
            continue
        d += 1

    # every variable has been substituted: the right-hand sides are constants
    solution = [0] * ring.nvars
    for v, p in subs.items():
        if p.degree() > 0:
            return finish(DEGREE_CAP, "substitution left free variables")
        solution[v] = p.constant_term()
    for p in original:
        if p.evaluate(solution) != 0:
            return finish(INCONSISTENT, "candidate solution fails the input system")
    report.solution = solution
    if report.d_max is None:
        report.d_max = d
    return finish(SOLVED)


def _dedupe(polys: list[Polynomial]) -> list[Polynomial]:
    seen = set()
    out = []
    for p in polys:
        if p.is_zero():
            continue
        key = frozenset(p.terms.items())
        if key in seen:
            continue
        seen.add(key)
        out.append(p)
    return out
