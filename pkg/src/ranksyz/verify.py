"""Property battery behind ``ranksyz verify``.

Each check returns a ``Check`` with a pass flag and a short detail string;
the suite is deterministic for a fixed seed.
"""

from __future__ import annotations

import time
import warnings
from dataclasses import dataclass
from itertools import combinations

import numpy as np

from . import _gf2
from . import matrix_core as mc
from .attack_driver import lemma1_bound, lemma2_bound, mc_lemma1, mc_lemma2
from .field_core import base_field, make_tower
from .maxminors import build_matrix_M, build_Pj, linearised_residuals
from .modelling import (Specialization, build_oj_system, coefficient_matrix_CH, default_specialization, dot,
                        jacobian_kronecker_check, kernel_vector_VJ, minor_CH, oj_ext_polys,
                        planted_assignment)
from .rank_codes import extend_code, gen_instance


@dataclass
class Check:
    name: str
    passed: bool
    detail: str = ""
    elapsed: float = 0.0

    def line(self) -> str:
        return f"{'PASS' if self.passed else 'FAIL'}  {self.name}: {self.detail} ({self.elapsed:.1f}s)"


def _quiet_instance(m, n, k, r, seed, q=2):
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        return gen_instance(m, n, k, r, seed, q)


def check_field(rng, trials: int = 1000) -> tuple[bool, str]:
    bad = 0
    for q, m in ((2, 8), (3, 5), (4, 3)):
        F = make_tower(q, m)
        for _ in range(trials // 3):
            b = F.random_element(rng)
            rebuilt = 0
            for i in range(1, m + 1):
                rebuilt = F.add(rebuilt, F.scale(F.coord(b, i), F.alpha_pow(i - 1)))
            bad += rebuilt != b
            a, c = F.random_element(rng, nonzero=True), F.random_element(rng)
            bad += F.mul(F.mul(a, b), c) != F.mul(a, F.mul(b, c))
            bad += F.mul(a, F.add(b, c)) != F.add(F.mul(a, b), F.mul(a, c))
            bad += F.mul(a, F.inv(a)) != 1
    return bad == 0, f"{bad} failures"


def check_gf2_echelon(rng, trials: int = 100) -> tuple[bool, str]:
    """Packed elimination against the table-driven rref over F_2."""
    F = base_field(2)
    bad = 0
    for _ in range(trials):
        a, b = rng.integers(1, 150, size=2)
        D = (rng.random((a, b)) < rng.random()).astype(np.int64)
        P = _gf2.pack(D)
        piv = _gf2.echelon_inplace(P, int(b), True)
        ref = mc._rref_tables(D, F)
        bad += list(piv) != list(ref.pivot_cols)
        bad += not np.array_equal(_gf2.unpack(P[:len(piv)], int(b)), ref.rref[:len(piv)])
    return bad == 0, f"{bad} mismatches over {trials} matrices"


def check_jacobian(rng, shapes: int = 100) -> tuple[bool, str]:
    F = base_field(2)
    bad = 0
    for _ in range(shapes):
        p, a, b, c = (int(x) for x in rng.integers(1, 4, size=4))
        A = rng.integers(0, 2, size=(p, a))
        Y = rng.integers(0, 2, size=(b, c))
        bad += not jacobian_kronecker_check(A, (a, b), Y, F)
    return bad == 0, f"{bad} of {shapes} shapes disagree"


def check_cauchy_binet(seed: int) -> tuple[bool, str]:
    bad = total = 0
    for m, n, k, r in ((6, 6, 2, 2), (7, 8, 3, 2)):
        ext = extend_code(_quiet_instance(m, n, k, r, seed))
        vs = build_oj_system(ext, default_specialization(r)).varspace
        for J in combinations(range(k + 2, n + 1), r):
            total += 1
            direct = minor_CH(ext, vs, [j - k - 1 for j in J])
            bad += build_Pj(ext, vs, J) != direct
    return bad == 0, f"{bad} of {total} minors differ"


def check_vj(seed: int) -> tuple[bool, str]:
    """V_J kills the bilinear parts and maps F to the maximal minor."""
    m, n, k, r = 6, 6, 2, 2
    ext = extend_code(_quiet_instance(m, n, k, r, seed))
    vs = build_oj_system(ext, default_specialization(r)).varspace
    F = oj_ext_polys(ext, vs)
    Fh = [f.homogeneous_part(2) for f in F]
    ring = F[0].ring
    bad = total = 0
    for J in combinations(range(1, n - k), r):
        total += 1
        V = kernel_vector_VJ(ext, vs, J)
        bad += not dot(V, Fh, ring).is_zero()
        mn = minor_CH(ext, vs, J)
        got = dot(V, F, ring)
        bad += got != mn and got != -mn
    return bad == 0, f"{bad} failures over {total} subsets J"


def check_maxminors_vanish(seed: int, trials: int) -> tuple[bool, str]:
    """M times the planted minor values is zero, on ``trials`` compatible planted instances."""
    rng = np.random.default_rng(seed)
    bad = tested = i = 0
    shapes = ((8, 8, 3, 2), (9, 9, 3, 3), (10, 12, 5, 2))
    while tested < trials and i < 20 * trials:
        i += 1
        m, n, k, r = shapes[i % len(shapes)]
        ext = extend_code(_quiet_instance(m, n, k, r, int(rng.integers(2**31))))
        j0 = int(rng.integers(1, n + 1))
        T = tuple(sorted(rng.choice(np.arange(2, m + 1), size=r - 1, replace=False).tolist()))
        spec = Specialization(j0, T)
        pt = planted_assignment(ext, spec)
        if pt is None:
            continue
        tested += 1
        vs = build_oj_system(ext, spec).varspace
        MM = build_matrix_M(ext, j0)
        bad += bool(np.any(linearised_residuals(MM, vs, pt)))
    return bad == 0 and tested == trials, f"{bad} nonzero residuals over {tested} compatible instances"


def check_lemma1(seed: int, trials: int) -> tuple[bool, str]:
    rng = np.random.default_rng(seed)
    out = []
    ok = True
    for m, r, q in ((8, 2, 2), (9, 3, 2)):
        n = m
        freq, sigma = mc_lemma1(n, r, q, trials, rng)
        p = float(lemma1_bound(q, r, n))
        ok &= abs(freq - p) <= 3 * sigma
        out.append(f"(n,r)=({n},{r}) {freq:.4f} vs {p:.4f}")
    return ok, "; ".join(out)


def check_lemma2(seed: int, trials: int) -> tuple[bool, str]:
    rng = np.random.default_rng(seed)
    out = []
    ok = True
    for m, r, q in ((8, 2, 2), (9, 3, 2)):
        c = (m - 1) // (r - 1)
        freq, sigma = mc_lemma2(m, r, q, c, trials, rng)
        p = float(lemma2_bound(q, m, r, c))
        ok &= freq >= p - 3 * sigma
        out.append(f"(m,r,c)=({m},{r},{c}) {freq:.4f} >= {p:.4f}")
    return ok, "; ".join(out)


def check_syndrome(seed: int) -> tuple[bool, str]:
    ext = extend_code(_quiet_instance(14, 18, 8, 3, seed))
    T = ext.tower
    GH = mc.matmul(ext.Gtilde, ext.Htilde.T, T)
    e = ext.to_permuted(ext.instance.error)
    eH = mc.matmul(mc.as_matrix([list(e)], T), ext.Htilde.T, T)
    CH = coefficient_matrix_CH(ext, build_oj_system(ext).varspace)
    ok = mc.is_zero(GH) and mc.is_zero(eH) and len(CH[0]) == 9
    return ok, "G~ H~^T = 0, e H~^T = 0, H~ has n-k-1 rows"


def run_suite(seed: int = 0, quick: bool = False, out=print) -> list[Check]:
    rng = np.random.default_rng(seed)
    n_mc = 1000 if quick else 5000
    n_planted = 100 if quick else 1000
    battery = [
        ("field axioms and coordinates", lambda: check_field(rng, 300 if quick else 1000)),
        ("packed GF(2) elimination", lambda: check_gf2_echelon(rng, 30 if quick else 100)),
        ("Jacobian Kronecker identity", lambda: check_jacobian(rng, 30 if quick else 100)),
        ("extended code duality", lambda: check_syndrome(seed)),
        ("Cauchy-Binet expansion of P_J", lambda: check_cauchy_binet(seed)),
        ("V_J syzygies and minors", lambda: check_vj(seed)),
        ("MaxMinors vanish at planted points", lambda: check_maxminors_vanish(seed, n_planted)),
        ("Lemma 1 Monte Carlo", lambda: check_lemma1(seed, n_mc)),
        ("Lemma 2 Monte Carlo", lambda: check_lemma2(seed, n_mc)),
    ]
    results = []
    for name, fn in battery:
        t0 = time.perf_counter()
        try:
            ok, detail = fn()
        except Exception as exc:  # a crashing property is a failing property
            ok, detail = False, f"{type(exc).__name__}: {exc}"
        chk = Check(name, bool(ok), detail, time.perf_counter() - t0)
        results.append(chk)
        if out is not None:
            out(chk.line())
    return results
