"""Algorithm 1: specialization loop, full attack with retries, success bounds.

One attempt fixes a pinned column j0 of C and an (r-1)-block, builds the
specialized Ourivski-Johansson system, harvests the MaxMinors equations and
runs the XL solver.  Two block kinds are supported:

* rows (the default): the block T is a set of rows of S carrying the
  identity, exactly as in Algorithm 1;
* columns: the block P is a set of columns of C carrying e_2, .., e_r.
  This is used for the underdetermined regime, where it turns the degree-r
  harvest into one with quadratic equations and a unique solution in the
  coefficient variables alone.

Every reported success is checked: y - e lies in the code and e has the
target rank weight.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from . import matrix_core as mc
from .macaulay import DEFAULT_COLUMN_CAP, DEGREE_CAP, INCONSISTENT, SolveReport, xl_solve
from .maxminors import UNDERDETERMINED, Harvest, MinorsError, harvest, regime
from .modelling import BilinearSystem, Specialization, VarSpace, build_oj_system
from .rank_codes import (CodeError, DecodingInstance, ExtendedCode, extend_code, rank_weight, vec_from_mat,
                         vec_scale, vec_sub)

ROWS = "rows"
COLUMNS = "columns"
AUTO = "auto"


class AttackError(ValueError):
    pass


def max_blocks(m: int, n: int, r: int, mode: str = ROWS) -> int:
    """Number of disjoint (r-1)-blocks available: floor((m-1)/(r-1)) for rows."""
    if r < 2:
        return 1
    pool = m - 1 if mode == ROWS else n - 1
    return pool // (r - 1)


@dataclass
class AttackConfig:
    c: int | None = None  # blocks per column choice; default: all disjoint blocks
    max_column_retries: int = 4
    seed: int | None = 0
    d_cap: int | None = None  # default r + 3
    rank_sweep: bool = False
    mode: str = AUTO
    column_cap: int = DEFAULT_COLUMN_CAP
    trace: object = None  # callable receiving per-matrix dicts

    def blocks_for(self, m: int, n: int, r: int, mode: str) -> int:
        cmax = max_blocks(m, n, r, mode)
        if self.c is None:
            return cmax
        if not 1 <= self.c <= max(cmax, 1):
            raise AttackError(f"c={self.c} outside 1..{cmax}")
        return self.c


@dataclass
class AttemptRecord:
    target_rank: int
    j0: int
    block: tuple[int, ...]
    mode: str
    status: str
    d_ff: int | None = None
    d_max: int | None = None
    elapsed: float = 0.0
    note: str = ""


@dataclass
class AttackOutcome:
    success: bool
    error: np.ndarray | None = None
    codeword: np.ndarray | None = None
    lam: int | None = None  # the solver found lam * e
    target_rank: int | None = None
    attempts: list[AttemptRecord] = field(default_factory=list)
    reports: list[SolveReport] = field(default_factory=list)
    elapsed: float = 0.0
    note: str = ""

    @property
    def d_max(self) -> int | None:
        """Largest degree reached by the successful solve."""
        if not self.success or not self.reports:
            return None
        return self.reports[-1].d_max


# ---------------------------------------------------------------------------
# one specialization


def resolve_mode(ext: ExtendedCode, mode: str = AUTO) -> str:
    if mode in (ROWS, COLUMNS):
        return mode
    if mode != AUTO:
        raise AttackError(f"unknown mode {mode!r}")
    if ext.r < 2:
        return ROWS
    reg = regime(ext.tower.m, ext.n, ext.k, ext.r)
    return COLUMNS if reg.name == UNDERDETERMINED else ROWS


def make_spec(j0: int, block, mode: str) -> Specialization:
    block = tuple(block)
    return Specialization(j0, (), block) if mode == COLUMNS and block else Specialization(j0, block)


def _merge_reports(a: SolveReport, b: SolveReport) -> SolveReport:
    """Chain two solver runs into one report (status and solution from the second)."""
    d_max = [x for x in (a.d_max, b.d_max) if x is not None]
    return SolveReport(b.status, a.d_ff if a.d_ff is not None else b.d_ff, max(d_max, default=None),
                       a.shapes + b.shapes, b.solution, a.trace + b.trace, a.n_falls + b.n_falls,
                       a.elapsed + b.elapsed, b.note or a.note)


def solve_with_J(ext: ExtendedCode, spec: Specialization, d_cap: int | None = None,
                 column_cap: int = DEFAULT_COLUMN_CAP, trace=None,
                 harvested: Harvest | None = None) -> tuple[SolveReport, BilinearSystem]:
    """Harvest the MaxMinors equations for ``spec`` and solve {F, J} by XL.

    ``harvested`` lets callers reuse the equations across blocks of the rows
    kind, where they only depend on j0.
    """
    system = build_oj_system(ext, spec)
    vs = system.varspace
    r = ext.r
    d_cap = r + 3 if d_cap is None else d_cap
    if spec.kind == COLUMNS:
        H = harvested or harvest(ext, vs, include_degree_r=True)
        J = [p.change_ring(vs.ring) for p in H.polys + H.degree_r_extra]
        rep_c = xl_solve(J, vs.ring, d_cap=d_cap, column_cap=column_cap, trace=trace,
                         original=J, variables=vs.coeff_vars)
        if not rep_c.solved:
            return rep_c, system
        mapping = {v: vs.ring.const(rep_c.solution[v]) for v in vs.coeff_vars}
        lin = [p.substitute(mapping) for p in system.polys]
        rep_s = xl_solve(lin, vs.ring, d_start=1, d_cap=d_cap, column_cap=column_cap, trace=trace,
                         original=lin, variables=vs.support_vars)
        rep = _merge_reports(rep_c, rep_s)
        if rep.solved:
            point = list(rep_s.solution)
            for v in vs.coeff_vars:
                point[v] = rep_c.solution[v]
            if any(p.evaluate(point) for p in system.polys):
                rep.status, rep.solution, rep.note = INCONSISTENT, None, "point fails the OJ system"
            else:
                rep.solution = point
        return rep, system
    H = harvested or harvest(ext, vs)
    J = [p.change_ring(vs.ring) for p in H.polys]
    rep = xl_solve(system.polys + J, vs.ring, d_cap=d_cap, column_cap=column_cap, trace=trace,
                   original=system.polys)
    return rep, system


def point_to_matrices(vs: VarSpace, point) -> tuple[np.ndarray, np.ndarray]:
    """(S, C) over F_q from a solution of the specialized system."""
    spec = vs.spec
    m, n, r = vs.m, vs.n, vs.r
    S = np.zeros((m, r), dtype=np.int64)
    S[0, 0] = 1
    for t, a in enumerate(spec.T, start=2):
        S[a - 1, t - 1] = 1
    for a in vs.free_rows:
        for t in range(2, r + 1):
            S[a - 1, t - 1] = int(point[vs.s_index(a, t)])
    C = np.zeros((r, n), dtype=np.int64)
    for l, u in spec.pinned.items():
        C[u - 1, l - 1] = 1
    for t in range(1, r + 1):
        for l in vs.free_cols:
            C[t - 1, l - 1] = int(point[vs.c_index(t, l)])
    return S, C


def recover_error(ext: ExtendedCode, S: np.ndarray, C: np.ndarray):
    """From lam*e (permuted coordinates) back to e in original coordinates.

    lam*e lies in C + <y>; writing it as u G + mu y gives lam = mu.
    Returns (e, lam) or None when lam*e is not of that form with mu != 0.
    """
    inst = ext.instance
    tower = inst.tower
    le = ext.from_permuted(vec_from_mat(mc.matmul(S, C, tower.base), tower))
    stacked = np.vstack([inst.code.G, np.asarray(inst.y, dtype=object)[None, :]])
    aug = np.hstack([stacked.T, np.asarray(le, dtype=object)[:, None]])
    res = mc.rref(aug, tower)
    k1 = stacked.shape[0]
    if any(p >= k1 for p in res.pivot_cols):
        return None
    coeffs = [0] * k1
    for i, p in enumerate(res.pivot_cols):
        coeffs[p] = int(res.rref[i, k1])
    mu = coeffs[-1]
    if not mu:
        return None
    return vec_scale(tower.inv(mu), le, tower), mu


def verify_error(inst: DecodingInstance, e, target_rank: int) -> bool:
    """y - e in the code and |e| = target rank."""
    tower = inst.tower
    if rank_weight(e, tower) != target_rank:
        return False
    return inst.code.contains(vec_sub(inst.y, e, tower))


# ---------------------------------------------------------------------------
# Algorithm 1


def _blocks(pool: list[int], size: int, c: int, rng) -> list[tuple[int, ...]]:
    if size == 0:
        return [()]
    order = [pool[i] for i in rng.permutation(len(pool))]
    return [tuple(sorted(order[i * size:(i + 1) * size])) for i in range(c)]


def algorithm1(ext: ExtendedCode, cfg: AttackConfig | None = None, rng=None, j0: int | None = None) -> AttackOutcome:
    """One column choice and up to c disjoint blocks; first verified solution wins."""
    cfg = cfg or AttackConfig()
    rng = np.random.default_rng(cfg.seed) if rng is None else rng
    t0 = time.perf_counter()
    inst = ext.instance
    m, n, r = ext.tower.m, ext.n, ext.r
    mode = resolve_mode(ext, cfg.mode)
    c = cfg.blocks_for(m, n, r, mode)
    if j0 is None:
        j0 = int(rng.integers(1, n + 1))
    if mode == COLUMNS:
        pool = [l for l in range(1, n + 1) if l != j0]
    else:
        pool = list(range(2, m + 1))
    out = AttackOutcome(False, target_rank=r)
    cached: Harvest | None = None
    for block in _blocks(pool, r - 1, c, rng):
        spec = make_spec(j0, block, mode)
        ts = time.perf_counter()
        try:
            if mode == ROWS and cached is None:
                system = build_oj_system(ext, spec)
                cached = harvest(ext, system.varspace)
            rep, system = solve_with_J(ext, spec, cfg.d_cap, cfg.column_cap, cfg.trace,
                                       cached if mode == ROWS else None)
        except (MinorsError, MemoryError) as exc:
            out.attempts.append(AttemptRecord(r, j0, block, mode, DEGREE_CAP, note=str(exc),
                                              elapsed=time.perf_counter() - ts))
            continue
        rec = AttemptRecord(r, j0, block, mode, rep.status, rep.d_ff, rep.d_max,
                            time.perf_counter() - ts, rep.note)
        out.attempts.append(rec)
        out.reports.append(rep)
        if not rep.solved:
            continue
        S, C = point_to_matrices(system.varspace, rep.solution)
        got = recover_error(ext, S, C)
        if got is None or not verify_error(inst, got[0], r):
            rec.status, rec.note = INCONSISTENT, "solution failed verification"
            continue
        e, lam = got
        out.success = True
        out.error, out.lam = e, lam
        out.codeword = vec_sub(inst.y, e, inst.tower)
        break
    out.elapsed = time.perf_counter() - t0
    if not out.success:
        out.note = "all blocks exhausted"
    return out


def full_attack(instance: DecodingInstance, cfg: AttackConfig | None = None) -> AttackOutcome:
    """Algorithm 1 with fresh column choices, optionally sweeping the target rank 1..r."""
    cfg = cfg or AttackConfig()
    t0 = time.perf_counter()
    rng = np.random.default_rng(cfg.seed)
    targets = range(1, instance.r + 1) if cfg.rank_sweep else [instance.r]
    total = AttackOutcome(False, target_rank=instance.r)
    for t in targets:
        inst_t = DecodingInstance(instance.code, instance.y, t, instance.planted, instance.seed)
        try:
            ext = extend_code(inst_t)
            regime(ext.tower.m, ext.n, ext.k, t)
        except (CodeError, MinorsError) as exc:
            total.note = str(exc)
            if isinstance(exc, CodeError):
                break
            continue
        for _ in range(max(1, cfg.max_column_retries)):
            res = algorithm1(ext, cfg, rng)
            total.attempts.extend(res.attempts)
            total.reports.extend(res.reports)
            if res.success:
                res.attempts, res.reports = total.attempts, total.reports
                res.elapsed = time.perf_counter() - t0
                return res
        total.note = "all retries exhausted"
    total.elapsed = time.perf_counter() - t0
    return total


# ---------------------------------------------------------------------------
# probabilities


def p_full_rank(q: int, a: int, b: int) -> Fraction:
    """prod_{i<a} (1 - q^(i-b)): probability that a uniform a x b matrix has rank a."""
    if a < 0 or b < 0 or a > b:
        raise AttackError(f"need 0 <= a <= b, got a={a}, b={b}")
    out = Fraction(1)
    for i in range(a):
        out *= 1 - Fraction(1, q ** (b - i))
    return out


def lemma1_bound(q: int, r: int, n: int) -> Fraction:
    """Probability that a fixed coordinate of a uniform rank-r error is nonzero."""
    return (1 - Fraction(1, q ** r)) / (1 - Fraction(1, q ** n))


def lemma2_bound(q: int, m: int, r: int, c: int) -> Fraction:
    """Lower bound for some of c disjoint (r-1)-row blocks of a full-rank (m-1) x (r-1) matrix being invertible."""
    p_block = p_full_rank(q, r - 1, r - 1)
    return 1 - (1 - p_block) ** c / p_full_rank(q, r - 1, m - 1)


def success_probability(m: int, n: int, r: int, q: int = 2, c: int | None = None) -> Fraction:
    """Lower bound on the success of one run of Algorithm 1 making at most c calls."""
    if r < 2:
        raise AttackError("the bound needs r >= 2")
    cmax = (m - 1) // (r - 1)
    c = cmax if c is None else c
    if not 1 <= c <= cmax:
        raise AttackError(f"c={c} outside 1..{cmax}")
    return lemma1_bound(q, r, n) * lemma2_bound(q, m, r, c)


def binomial_sigma(p: float, trials: int) -> float:
    return float(np.sqrt(max(p * (1 - p), 0.0) / trials))


def _rank_batch(mats: np.ndarray, F) -> np.ndarray:
    return np.array([mc.rank(A, F) for A in mats])


def _uniform_full_rank(nrows: int, ncols: int, F, rng, count: int) -> np.ndarray:
    """count uniform full-rank matrices, by batched rejection."""
    target = min(nrows, ncols)
    out = []
    while len(out) < count:
        batch = rng.integers(0, F.q, size=(max(16, count - len(out)), nrows, ncols))
        ok = _rank_batch(batch, F) == target
        out.extend(batch[ok])
    return np.stack(out[:count])


def mc_lemma1(n: int, r: int, q: int, trials: int, rng) -> tuple[float, float]:
    """Frequency of a nonzero error coordinate at a random column, and its sigma.

    With S of full column rank, e_j = 0 exactly when column j of C is zero,
    so only the uniform full-rank r x n coefficient matrix is sampled.
    """
    from .field_core import base_field
    F = base_field(q)
    C = _uniform_full_rank(r, n, F, rng, trials)
    j = rng.integers(0, n, size=trials)
    hits = np.any(C[np.arange(trials), :, j] != 0, axis=1)
    freq = float(hits.mean())
    return freq, binomial_sigma(float(lemma1_bound(q, r, n)), trials)


def mc_lemma2(m: int, r: int, q: int, c: int, trials: int, rng) -> tuple[float, float]:
    """Frequency of some invertible block among c disjoint (r-1)-row blocks."""
    from .field_core import base_field
    F = base_field(q)
    A = _uniform_full_rank(m - 1, r - 1, F, rng, trials)
    hits = np.zeros(trials, dtype=bool)
    for b in range(c):
        blk = A[:, b * (r - 1):(b + 1) * (r - 1), :]
        hits |= _rank_batch(blk, F) == r - 1
    freq = float(hits.mean())
    return freq, binomial_sigma(float(lemma2_bound(q, m, r, c)), trials)


def mc_algorithm1(m: int, n: int, k: int, r: int, q: int = 2, c: int = 3, trials: int = 2000,
                  seed: int = 0, solve: bool = True) -> tuple[float, float]:
    """Empirical success of one run of Algorithm 1 (no column retry) on planted instances.

    With ``solve=False`` only the combinatorial condition is checked (the
    planted error has a compatible specialization among the chosen blocks),
    which is the event the bound is about.
    """
    import warnings

    from .modelling import planted_assignment
    from .rank_codes import gen_instance
    rng = np.random.default_rng(seed)
    cfg = AttackConfig(c=c, max_column_retries=1, mode=ROWS)
    wins = 0
    for i in range(trials):
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            inst = gen_instance(m, n, k, r, seed=int(rng.integers(2**31)), q=q)
        try:
            ext = extend_code(inst)
        except CodeError:
            continue
        if solve:
            wins += algorithm1(ext, cfg, rng).success
        else:
            j0 = int(rng.integers(1, n + 1))
            blocks = _blocks(list(range(2, m + 1)), r - 1, c, rng)
            wins += any(planted_assignment(ext, Specialization(j0, b)) is not None for b in blocks)
    freq = wins / trials
    bound = float(success_probability(m, n, r, q, c))
    return freq, binomial_sigma(bound, trials)


def planted_matches(inst: DecodingInstance, e) -> bool:
    planted = inst.error
    return planted is not None and all(int(a) == int(b) for a, b in zip(planted, e))


__all__ = [
    "AttackConfig", "AttackOutcome", "AttemptRecord", "AttackError", "ROWS", "COLUMNS", "AUTO",
    "algorithm1", "full_attack", "solve_with_J", "recover_error", "verify_error", "point_to_matrices",
    "p_full_rank", "success_probability", "lemma1_bound", "lemma2_bound", "max_blocks",
    "mc_lemma1", "mc_lemma2", "mc_algorithm1", "planted_matches", "binomial_sigma",
]
