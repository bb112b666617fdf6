from __future__ import annotations

import warnings
from itertools import combinations, permutations
from math import comb

import numpy as np
import pytest

from ranksyz.maxminors import (INTERMEDIATE, OVERDETERMINED, UNDERDETERMINED, MinorsError, build_matrix_M,
                               expected_syzygy_count, extract_J_equations, harvest, linearised_residuals,
                               minor_vars, regime, sign_sigma, sign_sigma_printed)
from ranksyz.modelling import (Specialization, build_oj_system, column_specialization, default_specialization,
                               planted_assignment)
from ranksyz.rank_codes import extend_code, gen_instance


def _ext(m, n, k, r, seed):
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        return extend_code(gen_instance(m, n, k, r, seed))


def _det_mod(A, p):
    n = len(A)
    tot = 0
    for perm in permutations(range(n)):
        inv = sum(perm[i] > perm[j] for i in range(n) for j in range(i + 1, n))
        t = 1
        for i in range(n):
            t *= A[i][perm[i]]
        tot += -t if inv % 2 else t
    return tot % p


@pytest.mark.parametrize("params,name", [
    ((79, 94, 47, 5), OVERDETERMINED),
    ((113, 134, 67, 7), UNDERDETERMINED),
    ((15, 15, 8, 3), UNDERDETERMINED),
    ((20, 20, 10, 3), OVERDETERMINED),
])
def test_regime_examples(params, name):
    assert regime(*params).name == name


def test_regime_thresholds_and_intermediate():
    m, n, k, r = 14, 18, 12, 2
    reg = regime(m, n, k, r)
    assert reg.n_equations == m * comb(n - k - 1, r)
    assert reg.under_threshold < reg.n_equations < reg.over_threshold
    assert reg.name == INTERMEDIATE
    assert expected_syzygy_count(m, n, k, r) == (1, reg.n_equations - comb(n - 1, r))


@pytest.mark.parametrize("bad", [(10, 10, 5, 5), (10, 10, 5, 0)])
def test_regime_rejects_r(bad):
    with pytest.raises(MinorsError):
        regime(*bad)


@pytest.mark.parametrize("p", [3, 5])
def test_sign_sigma_against_determinant(p):
    """det((-R; I)_{T1 u T2, J}) = (-1)^sigma det(R_{T1, J minus T2}) in odd characteristic."""
    rng = np.random.default_rng(p)
    for k, n, r in ((3, 8, 2), (2, 7, 2), (3, 9, 3), (1, 7, 3)):
        R = rng.integers(0, p, size=(k + 1, n - k - 1))
        full = np.vstack([(-R) % p, np.eye(n - k - 1, dtype=np.int64)])  # rows 1..n, cols k+2..n
        printed_disagrees = False
        for J in combinations(range(k + 2, n + 1), r):
            cols = [j - k - 2 for j in J]
            for s in range(r + 1):
                for T2 in combinations(J, s):
                    rest = [j - k - 2 for j in J if j not in T2]
                    for T1 in combinations(range(1, k + 2), r - s):
                        rows = [t - 1 for t in T1 + T2]
                        lhs = _det_mod(full[np.ix_(rows, cols)].tolist(), p)
                        rhs = _det_mod(R[np.ix_([t - 1 for t in T1], rest)].tolist(), p) if T1 else 1
                        sgn = sign_sigma(T2, J, k, r)
                        assert lhs == (rhs if sgn == 0 else (-rhs) % p)
                        if rhs and sign_sigma_printed(T2, J, k, r) != sgn:
                            printed_disagrees = True
        if (k + r) % 2 == 1 or (r * (r + 1) // 2) % 2 == 1:
            assert printed_disagrees


def test_minor_vars_order():
    n, r = 7, 3
    cols, n_high = minor_vars(n, r)
    assert len(cols) == comb(n, r)
    assert n_high == comb(n - 1, r)
    degs = [c.degree for c in cols]
    assert degs == sorted(degs, reverse=True)
    assert all((1 in c.T) == (c.degree == r - 1) for c in cols)
    cols2, n_high2 = minor_vars(n, r, (1, 2, 3))
    assert n_high2 == comb(n - 3, r)
    assert {c.degree for c in cols2} == {0, 1, 2, 3}


@pytest.mark.parametrize("params,seed", [((14, 18, 8, 3), 0), ((15, 15, 7, 3), 1), ((14, 18, 11, 2), 2)])
def test_harvest_counts_and_vanishing(params, seed):
    ext = _ext(*params, seed)
    e = ext.to_permuted(ext.instance.error)
    j0 = next(j for j in range(1, ext.n + 1) if int(e[j - 1]))
    spec = Specialization(j0, default_specialization(params[3]).T)
    vs = build_oj_system(ext, spec).varspace
    H = harvest(ext, vs)
    assert (H.degree, H.count) == expected_syzygy_count(*params)
    pt = planted_assignment(ext, spec)
    if pt is not None:
        assert all(p.evaluate(pt) == 0 for p in H.polys)
        MM = build_matrix_M(ext, j0)
        assert not np.any(linearised_residuals(MM, vs, pt))


def test_incompatible_pin_gives_one_extra_equation():
    # e vanishing at the pinned column puts the minors vector in the j0-free block
    for seed in range(40):
        ext = _ext(25, 30, 15, 2, seed)
        e = ext.to_permuted(ext.instance.error)
        if int(e[0]) == 0:
            break
    else:
        pytest.skip("no instance with e_1 = 0")
    vs = build_oj_system(ext, default_specialization(2)).varspace
    H = harvest(ext, vs)
    assert (H.degree, H.count) == (1, 29)


def test_columns_specialization_harvest_vanishes():
    spec = column_specialization(3)
    for seed in range(20):
        ext = _ext(15, 15, 8, 3, seed)
        pt = planted_assignment(ext, spec)
        if pt is not None:
            break
    vs = build_oj_system(ext, spec).varspace
    H = harvest(ext, vs, include_degree_r=True)
    assert H.polys
    assert all(p.evaluate(pt) == 0 for p in H.polys + H.degree_r_extra)


def test_extract_rejects_mismatched_pins():
    ext = _ext(8, 8, 3, 2, 0)
    vs = build_oj_system(ext, Specialization(2, (2,))).varspace
    with pytest.raises(MinorsError):
        extract_J_equations(build_matrix_M(ext, 1), vs)
