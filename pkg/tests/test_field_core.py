from __future__ import annotations

from itertools import product

import pytest
from hypothesis import given, settings, strategies as st

from ranksyz.field_core import FieldError, FieldTower, coord, ext_arith, make_tower


# -- independent GF(2)[x] oracle: polynomials as int bitmasks ---------------

def _pmod(a: int, f: int) -> int:
    df = f.bit_length() - 1
    while a and a.bit_length() - 1 >= df:
        a ^= f << (a.bit_length() - 1 - df)
    return a


def _pmulmod(a: int, b: int, f: int) -> int:
    out = 0
    while b:
        if b & 1:
            out ^= a
        b >>= 1
        a = _pmod(a << 1, f)
    return _pmod(out, f)


def _gcd(a: int, b: int) -> int:
    while b:
        a, b = b, _pmod(a, b)
    return a


def _trial_irreducible(f: int) -> bool:
    deg = f.bit_length() - 1
    for g in range(2, 1 << (deg // 2 + 1)):
        if g.bit_length() - 1 >= 1 and _pmod(f, g) == 0:
            return False
    return True


def _frobenius_irreducible(f: int, m: int) -> bool:
    """x^(2^m) = x mod f and gcd(x^(2^d) - x, f) = 1 for the maximal divisors d of m."""
    def x_pow_2k(k):
        h = 2
        for _ in range(k):
            h = _pmulmod(h, h, f)
        return h
    if x_pow_2k(m) != 2:
        return False
    for d in range(1, m):
        if m % d == 0 and _gcd(f, x_pow_2k(d) ^ 2) != 1:
            return False
    return True


def _bits(coeffs) -> int:
    return sum(int(c) << i for i, c in enumerate(coeffs))


def test_make_tower_2_4_canonical():
    # enumerate monic degree-4 polynomials, low coefficient as least significant digit
    first = next(v | 16 for v in range(16) if _trial_irreducible(v | 16))
    assert _bits(make_tower(2, 4).modulus) == first == 0b10011


def test_make_tower_2_25_irreducible():
    T = make_tower(2, 25)
    assert len(T.modulus) == 26
    assert _frobenius_irreducible(_bits(T.modulus), 25)


def test_make_tower_trivial_extension():
    T = make_tower(2, 1)
    assert T.m == 1 and T.order == 2
    assert T.alpha == 1
    assert T.mul(1, 1) == 1


def test_make_tower_deterministic_and_basis():
    assert make_tower(3, 5).modulus == FieldTower(3, 5).modulus
    T = make_tower(3, 4)
    coords = [T.to_coords(T.alpha_pow(i)) for i in range(4)]
    assert coords == [tuple(int(i == j) for j in range(4)) for i in range(4)]


@pytest.mark.parametrize("q", [6, 10, 11, 16])
def test_unsupported_q(q):
    with pytest.raises(FieldError):
        make_tower(q, 3)


def test_reducible_modulus_rejected():
    with pytest.raises(FieldError):
        FieldTower(2, 4, [1, 0, 0, 0, 1])


def test_alpha_power_m_matches_division():
    for m in (4, 7, 12):
        T = make_tower(2, m)
        f = _bits(T.modulus)
        assert T.alpha_pow(m) == _pmod(1 << m, f)
        assert [coord(T.element(T.alpha_pow(m)), i) for i in range(1, m + 1)] == \
            [(_pmod(1 << m, f) >> (i - 1)) & 1 for i in range(1, m + 1)]


def test_mul_matches_oracle():
    T = make_tower(2, 9)
    f = _bits(T.modulus)
    for a, b in product(range(0, 512, 37), range(1, 512, 41)):
        assert T.mul(a, b) == _pmulmod(a, b, f)


def test_coord_examples():
    T = make_tower(2, 6)
    alpha = T.element(T.alpha)
    assert coord(alpha, 2) == 1
    assert all(coord(alpha, j) == 0 for j in range(1, 7) if j != 2)
    assert all(coord(T.element(0), i) == 0 for i in range(1, 7))
    with pytest.raises((IndexError, FieldError, ValueError)):
        coord(alpha, 7)


def test_ext_arith_examples():
    T = make_tower(2, 5)
    a = T.element(13)
    assert ext_arith(a, T.element(1), "mul") == a
    assert ext_arith(a, a, "add") == T.element(0)
    assert ext_arith(a, None, "inv") * a == T.element(1)
    with pytest.raises(ZeroDivisionError):
        ext_arith(T.element(0), None, "inv")


towers = st.sampled_from([(2, 8), (3, 4), (4, 3), (5, 3), (2, 1), (9, 2)])


@settings(max_examples=60, deadline=None)
@given(towers, st.data())
def test_field_axioms(qm, data):
    T = make_tower(*qm)
    el = st.integers(0, T.order - 1)
    a, b, c = data.draw(el), data.draw(el), data.draw(el)
    assert T.mul(T.mul(a, b), c) == T.mul(a, T.mul(b, c))
    assert T.mul(a, T.add(b, c)) == T.add(T.mul(a, b), T.mul(a, c))
    assert T.add(a, T.neg(a)) == 0
    if a:
        assert T.mul(a, T.inv(a)) == 1


@settings(max_examples=60, deadline=None)
@given(towers, st.data())
def test_coordinates_reconstruct_and_linear(qm, data):
    T = make_tower(*qm)
    el = st.integers(0, T.order - 1)
    b, g = data.draw(el), data.draw(el)
    s = data.draw(st.integers(0, T.q - 1))
    rebuilt = 0
    for i in range(1, T.m + 1):
        rebuilt = T.add(rebuilt, T.scale(T.coord(b, i), T.alpha_pow(i - 1)))
    assert rebuilt == b
    lhs = T.add(T.scale(s, b), g)
    F = T.base
    for i in range(1, T.m + 1):
        assert T.coord(lhs, i) == F.add(F.mul(s, T.coord(b, i)), T.coord(g, i))


def test_format_parse_roundtrip():
    T = make_tower(3, 4)
    for a in range(0, T.order, 7):
        assert T.parse(T.format(a)) == a
