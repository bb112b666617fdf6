"""Acceptance criteria, one test per criterion.

Each test prints a single ``PASS``/``FAIL`` line (visible with ``pytest -s``
or in the captured output of a failure).  Criteria 4 to 7 are slow and carry
the ``slow`` marker; they still run by default.
"""

from __future__ import annotations

import time
import warnings

import numpy as np
import pytest

from ranksyz.attack_driver import (AttackConfig, full_attack, lemma1_bound, lemma2_bound, mc_algorithm1,
                                   mc_lemma1, mc_lemma2, planted_matches, success_probability, verify_error)
from ranksyz.estimator import BUILTIN, choose_d, oj_complexity_bits
from ranksyz.maxminors import expected_syzygy_count, harvest
from ranksyz.modelling import Specialization, build_oj_system
from ranksyz.rank_codes import extend_code, gen_instance
from ranksyz.verify import check_cauchy_binet, check_jacobian, check_maxminors_vanish, check_vj

OMEGA = 2.807

# published security table: name -> (bits at d=r, bits at d=r+1, bold column is r+1)
TABLE4 = {
    "Loidreau": (96.3, 117.1, False),
    "ROLLO-I-128": (114.9, 134.5, False),
    "ROLLO-I-192": (142.2, 162.5, False),
    "ROLLO-I-256": (174.0, 195.3, True),
    "ROLLO-II-128": (132.3, 155.4, False),
    "ROLLO-II-192": (161.5, 185.0, False),
    "ROLLO-II-256": (191.6, 215.4, True),
    "ROLLO-III-128": (117.1, 137.2, False),
    "ROLLO-III-192": (145.7, 166.6, False),
    "ROLLO-III-256": (175.9, 197.5, True),
    "RQC-I": (121.1, 142.0, False),
    "RQC-II": (154.2, 176.5, False),
    "RQC-III": (188.4, 211.9, True),
}

# published "d:n_syz" entries of the small-parameter experiments
SYZYGIES = {
    (25, 30, 15, 2): (1, 28), (30, 30, 16, 2): (1, 28), (30, 50, 20, 2): (1, 48), (50, 50, 26, 2): (1, 48),
    (15, 15, 7, 3): (2, 90), (15, 15, 8, 3): (3, 300), (20, 20, 10, 3): (2, 170),
    (14, 18, 11, 2): (1, 16), (14, 18, 12, 2): (1, 4), (14, 18, 13, 2): (2, 84),
    (14, 18, 8, 3): (2, 135), (14, 18, 9, 3): (2, 104),
    (14, 18, 4, 4): (3, 679), (14, 18, 5, 4): (3, 679), (14, 18, 6, 4): (3, 679),
    (14, 18, 2, 5): (4, 2379), (14, 18, 5, 5): (4, 2379),
    (12, 12, 6, 3): (3, 120), (14, 14, 7, 3): (3, 280), (16, 16, 8, 3): (2, 104),
}


def report(num: int, ok: bool, detail: str, t0: float) -> None:
    print(f"\n{'PASS' if ok else 'FAIL'}  criterion {num}: {detail} ({time.perf_counter() - t0:.1f}s)")


def _instance(m, n, k, r, seed):
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        return gen_instance(m, n, k, r, seed)


def test_criterion_1_table4_bits():
    t0 = time.perf_counter()
    bad = []
    for p in BUILTIN:
        want_r, want_r1, _ = TABLE4[p.name]
        got_r = oj_complexity_bits(*p.tuple, p.r, OMEGA)
        got_r1 = oj_complexity_bits(*p.tuple, p.r + 1, OMEGA)
        if abs(got_r - want_r) > 0.1 or abs(got_r1 - want_r1) > 0.1:
            bad.append(f"{p.name}: {got_r:.2f}/{got_r1:.2f} vs {want_r}/{want_r1}")
    ok = not bad and len(BUILTIN) == 13 and time.perf_counter() - t0 < 1
    report(1, ok, "13 rows within 0.1 bits" if ok else "; ".join(bad), t0)
    assert ok, bad


def test_criterion_2_bold_column():
    t0 = time.perf_counter()
    bad = [p.name for p in BUILTIN if (choose_d(*p.tuple) == p.r + 1) != TABLE4[p.name][2]]
    ok = not bad and time.perf_counter() - t0 < 1
    report(2, ok, "bold column placed correctly on 13 rows" if ok else f"wrong on {bad}", t0)
    assert ok, bad


def test_criterion_3_syzygy_counts():
    t0 = time.perf_counter()
    bad = {p: (expected_syzygy_count(*p), want) for p, want in SYZYGIES.items()
           if expected_syzygy_count(*p) != want}
    ok = not bad and time.perf_counter() - t0 < 1
    report(3, ok, f"{len(SYZYGIES)} table entries reproduced" if ok else f"mismatch {bad}", t0)
    assert ok, bad


@pytest.mark.slow
def test_criterion_4_observed_harvest():
    t0 = time.perf_counter()
    parts, ok = [], True
    for params in ((25, 30, 15, 2), (15, 15, 7, 3), (14, 18, 9, 3)):
        r = params[3]
        hits, moved, short = 0, 0, []
        for seed in range(20):
            ext = extend_code(_instance(*params, seed))
            # the prediction assumes the planted solution fits the specialization,
            # i.e. e is nonzero at the pinned column
            e = ext.to_permuted(ext.instance.error)
            j0 = next(j for j in range(1, ext.n + 1) if int(e[j - 1]))
            moved += j0 != 1
            vs = build_oj_system(ext, Specialization(j0, tuple(range(2, r + 1)))).varspace
            H = harvest(ext, vs)
            if H.as_expected:
                hits += 1
            else:
                short.append((seed, H.degree, H.count))
        ok &= hits >= 18
        parts.append(f"{params}: {hits}/20 (j0 moved off column 1 in {moved})"
                     + (f" shortfalls {short}" if short else ""))
    report(4, ok, "; ".join(parts), t0)
    assert ok, parts


@pytest.mark.slow
@pytest.mark.parametrize("params", [(14, 18, 11, 2), (14, 18, 8, 3), (20, 20, 10, 3), (15, 15, 8, 3)])
def test_criterion_5_end_to_end(params):
    t0 = time.perf_counter()
    m, n, k, r = params
    d_bound = 5 if params == (15, 15, 8, 3) else r
    wins, worst, fails = 0, 0, []
    for seed in range(10):
        inst = _instance(*params, seed)
        out = full_attack(inst, AttackConfig(seed=seed))
        good = (out.success and verify_error(inst, out.error, r) and planted_matches(inst, out.error)
                and out.d_max is not None and out.d_max <= d_bound)
        wins += good
        worst = max(worst, out.d_max or 0)
        if not good:
            fails.append((seed, out.success, out.d_max, out.note))
    ok = wins == 10
    report(5, ok, f"{params}: {wins}/10 recovered, max d_max={worst} (bound {d_bound})"
           + (f" failures {fails}" if fails else ""), t0)
    assert ok, fails


@pytest.mark.slow
def test_criterion_6_probabilities():
    t0 = time.perf_counter()
    rng = np.random.default_rng(2024)
    parts, ok = [], True
    for m, r, q in ((8, 2, 2), (9, 3, 2)):
        n = m
        f1, s1 = mc_lemma1(n, r, q, 5000, rng)
        p1 = float(lemma1_bound(q, r, n))
        ok &= abs(f1 - p1) <= 3 * s1
        c = (m - 1) // (r - 1)
        f2, s2 = mc_lemma2(m, r, q, c, 5000, rng)
        p2 = float(lemma2_bound(q, m, r, c))
        # a lower bound: overshoot is expected (at r = 2 the true value is 1)
        ok &= f2 >= p2 - 3 * s2
        parts.append(f"({m},{r},{q}) L1 {f1:.4f} vs {p1:.4f} ({(f1 - p1) / s1:+.1f} sd), "
                     f"L2 {f2:.4f} >= {p2:.4f} ({(f2 - p2) / s2:+.1f} sd)")
    freq, sigma = mc_algorithm1(8, 8, 4, 2, c=3, trials=2000, seed=1)
    bound = float(success_probability(8, 8, 2, 2, 3))
    ok &= freq >= bound - 3 * sigma
    parts.append(f"Alg1 {freq:.4f} >= {bound:.4f}-3s")
    low = [p.name for p in BUILTIN if success_probability(p.m, p.n, p.r, 2, 5) <= 0.8]
    ok &= not low
    parts.append("c=5 > 0.8 on all 13 rows" if not low else f"c=5 too low on {low}")
    report(6, ok, "; ".join(parts), t0)
    assert ok, parts


@pytest.mark.slow
def test_criterion_7_oracles():
    t0 = time.perf_counter()
    rng = np.random.default_rng(7)
    checks = {
        "Cauchy-Binet": check_cauchy_binet(0),
        "Jacobian": check_jacobian(rng, 100),
        "V_J": check_vj(0),
        "MaxMinors vanish": check_maxminors_vanish(0, 1000),
    }
    ok = all(v[0] for v in checks.values())
    report(7, ok, "; ".join(f"{k}: {v[1]}" for k, v in checks.items()), t0)
    assert ok, checks
