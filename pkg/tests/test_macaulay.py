from __future__ import annotations

from itertools import product
from math import comb

import numpy as np
import pytest

from ranksyz.macaulay import DEGREE_CAP, INCONSISTENT, SOLVED, build_macaulay, monomials_upto, xl_solve
from ranksyz.polynomials import PolyRing


def _random_quadratic(ring: PolyRing, neq: int, point, rng):
    """Random quadratics shifted to vanish at ``point``."""
    q = ring.q
    n = ring.nvars
    polys = []
    for _ in range(neq):
        f = ring.zero()
        for i in range(n):
            for j in range(i, n):
                c = int(rng.integers(0, q))
                if c:
                    f = f + (ring.gen(i) * ring.gen(j)).scale(c)
            c = int(rng.integers(0, q))
            if c:
                f = f + ring.gen(i).scale(c)
        f = f - ring.const(f.evaluate(point))
        polys.append(f)
    return polys


def _brute_solutions(polys, n, q):
    return [list(x) for x in product(range(q), repeat=n) if all(p.evaluate(list(x)) == 0 for p in polys)]


@pytest.mark.parametrize("q,n,neq", [(2, 8, 16), (2, 10, 14), (3, 5, 12)])
def test_xl_recovers_unique_solution(q, n, neq):
    ring = PolyRing(n, q)
    rng = np.random.default_rng(n + q)
    for _ in range(10):
        point = [int(v) for v in rng.integers(0, q, size=n)]
        polys = _random_quadratic(ring, neq, point, rng)
        if len(_brute_solutions(polys, n, q)) == 1:
            break
    else:
        pytest.skip("no uniquely solvable system drawn")
    rep = xl_solve(polys, ring, d_cap=5)
    assert rep.status == SOLVED
    assert rep.solution == point
    assert rep.d_max is not None and rep.trace


def test_xl_inconsistent():
    ring = PolyRing(3, 2)
    x, y, z = (ring.gen(i) for i in range(3))
    rep = xl_solve([x * y + z, x + 1, y + 1, z], ring)
    assert rep.status == INCONSISTENT


def test_xl_degree_cap_on_underdetermined():
    ring = PolyRing(6, 2)
    rng = np.random.default_rng(0)
    polys = _random_quadratic(ring, 2, [0] * 6, rng)
    rep = xl_solve(polys, ring, d_cap=3)
    assert rep.status == DEGREE_CAP and rep.solution is None


def test_xl_variables_restriction():
    ring = PolyRing(5, 2)
    x = [ring.gen(i) for i in range(5)]
    sysm = [x[0] * x[1] + x[0], x[0] + x[1] + 1]  # unique solution (0, 1)
    rep = xl_solve(sysm, ring, variables=[0, 1])
    assert rep.status == SOLVED
    assert rep.solution[:2] == [0, 1]
    assert all(p.evaluate(rep.solution) == 0 for p in sysm)
    assert rep.solution[2:] == [0, 0, 0]


def test_trace_callback_entries():
    ring = PolyRing(8, 2)
    rng = np.random.default_rng(4)
    polys = _random_quadratic(ring, 16, [1, 0, 1, 1, 0, 0, 1, 0], rng)
    seen = []
    xl_solve(polys, ring, trace=seen.append)
    assert seen and set(seen[0]) == {"d", "rows", "cols", "rank", "new_falls", "elapsed_ms"}


@pytest.mark.parametrize("q,n,d", [(2, 6, 3), (3, 4, 3), (2, 10, 2)])
def test_monomial_count(q, n, d):
    ring = PolyRing(n, q)
    monos = monomials_upto(ring, d)
    if q == 2:
        assert len(monos) == sum(comb(n, i) for i in range(d + 1))
    else:
        # exponents in 0..q-1 with total degree <= d
        assert len(monos) == sum(1 for e in product(range(q), repeat=n) if sum(e) <= d)
    keys = [ring.key(a) for a in monos]
    assert keys == sorted(keys)


def test_build_macaulay_shape():
    ring = PolyRing(4, 2)
    x = [ring.gen(i) for i in range(4)]
    sysm = [x[0] * x[1] + x[2], x[3] + 1]
    M = build_macaulay(sysm, ring, 3)
    # 1 + 4 multipliers of degree <= 1 for the quadric, all 15 monomials of degree <= 2 for the linear one
    assert M.shape == (5 + 11, 15)
    with pytest.raises(ValueError):
        build_macaulay([ring.zero()], ring, 2)
