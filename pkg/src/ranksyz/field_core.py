"""Arithmetic in a small base field F_q and its degree-m extension F_{q^m}.

Elements of both fields are plain Python ints.  An element of F_q with
q = p^e is the integer whose base-p digits are its coordinates over the
prime field; an element of F_{q^m} is the integer whose base-q digits
c_0, ..., c_{m-1} are its coordinates in the basis (1, alpha, ...,
alpha^{m-1}).  For q = 2 this is simply a bitmask, and multiplication in
F_{2^m} is a shift-and-xor loop.

Both field classes share one duck-typed interface (``zero``, ``one``,
``add``, ``sub``, ``neg``, ``mul``, ``inv``, ``order``), which is what the
linear algebra and polynomial modules rely on.
"""

from __future__ import annotations

import functools
from dataclasses import dataclass

import numpy as np

SUPPORTED_Q = (2, 3, 4, 5, 7, 8, 9)
_PRIME_POWERS = {2: (2, 1), 3: (3, 1), 4: (2, 2), 5: (5, 1), 7: (7, 1), 8: (2, 3), 9: (3, 2)}


class FieldError(ValueError):
    """Invalid field construction or arithmetic (unsupported q, inverse of 0)."""


# ---------------------------------------------------------------------------
# Dense univariate polynomials over a prime field, coefficient lists
# (constant term first, no trailing zeros).  Only used to build fields.


def _trim(a):
    while a and a[-1] == 0:
        a.pop()
    return a


def _pmod(a, f, p):
    a = list(a)
    df = len(f) - 1
    inv_lead = pow(f[-1], p - 2, p)
    while len(a) - 1 >= df and a:
        c = a[-1] * inv_lead % p
        if c:
            shift = len(a) - 1 - df
            for i, fc in enumerate(f):
                a[shift + i] = (a[shift + i] - c * fc) % p
        a.pop()
        _trim(a)
    return _trim(a)


def _pmul(a, b, p):
    if not a or not b:
        return []
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] = (out[i + j] + x * y) % p
    return _trim(out)


def _int_to_digits(v: int, base: int, length: int) -> list[int]:
    out = []
    for _ in range(length):
        v, d = divmod(v, base)
        out.append(d)
    return out


def _digits_to_int(digits, base: int) -> int:
    v = 0
    for d in reversed(digits):
        v = v * base + d
    return v


# ---------------------------------------------------------------------------


class BaseField:
    """The field F_q for q in {2, 3, 4, 5, 7, 8, 9}, driven by lookup tables."""

    def __init__(self, q: int):
        if q not in _PRIME_POWERS:
            raise FieldError(f"unsupported base field order q={q}; expected one of {SUPPORTED_Q}")
        self.q = q
        self.p, self.e = _PRIME_POWERS[q]
        self.order = q
        self.zero, self.one = 0, 1
        p = self.p
        if self.e == 1:
            self.inner_modulus = None
            add = [[(a + b) % p for b in range(q)] for a in range(q)]
            mul = [[(a * b) % p for b in range(q)] for a in range(q)]
        else:
            self.inner_modulus = _first_irreducible_prime(p, self.e)
            digs = [_int_to_digits(a, p, self.e) for a in range(q)]
            add = [[_digits_to_int([(x + y) % p for x, y in zip(digs[a], digs[b])], p)
                    for b in range(q)] for a in range(q)]
            mul = []
            for a in range(q):
                row = []
                for b in range(q):
                    prod = _pmod(_pmul(_trim(list(digs[a])), _trim(list(digs[b])), p),
                                 self.inner_modulus, p)
                    prod = prod + [0] * (self.e - len(prod))
                    row.append(_digits_to_int(prod, p))
                mul.append(row)
        neg = [next(b for b in range(q) if add[a][b] == 0) for a in range(q)]
        inv = [0] + [next(b for b in range(q) if mul[a][b] == 1) for a in range(1, q)]
        self.add_table = np.array(add, dtype=np.int64)
        self.mul_table = np.array(mul, dtype=np.int64)
        self.neg_table = np.array(neg, dtype=np.int64)
        self.inv_table = np.array(inv, dtype=np.int64)
        self.sub_table = self.add_table[:, self.neg_table]
        self._add, self._mul, self._neg, self._inv = add, mul, neg, inv

    def __repr__(self):
        return f"BaseField(q={self.q})"

    def __eq__(self, other):
        return isinstance(other, BaseField) and other.q == self.q

    def __hash__(self):
        return hash(("F", self.q))

    def add(self, a: int, b: int) -> int:
        return self._add[a][b]

    def sub(self, a: int, b: int) -> int:
        return self._add[a][self._neg[b]]

    def neg(self, a: int) -> int:
        return self._neg[a]

    def mul(self, a: int, b: int) -> int:
        return self._mul[a][b]

    def inv(self, a: int) -> int:
        if a == 0:
            raise ZeroDivisionError("inverse of zero in F_q")
        return self._inv[a]

    def from_int(self, v: int) -> int:
        """Image of the integer v under Z -> F_q (i.e. v mod p)."""
        return v % self.p

    def elements(self):
        return range(self.q)


@functools.lru_cache(maxsize=None)
def base_field(q: int) -> BaseField:
    return BaseField(q)


# ---------------------------------------------------------------------------
# Polynomials over F_q as coefficient lists, used to find and verify moduli.


def _poly_mod(a, f, F: BaseField):
    a = list(a)
    df = len(f) - 1
    inv_lead = F.inv(f[-1])
    while a and len(a) - 1 >= df:
        c = F.mul(a[-1], inv_lead)
        if c:
            shift = len(a) - 1 - df
            for i, fc in enumerate(f):
                if fc:
                    a[shift + i] = F.sub(a[shift + i], F.mul(c, fc))
        a.pop()
        _trim(a)
    return _trim(a)


def _poly_mul(a, b, F: BaseField):
    if not a or not b:
        return []
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                if y:
                    out[i + j] = F.add(out[i + j], F.mul(x, y))
    return _trim(out)


def _poly_sub(a, b, F: BaseField):
    n = max(len(a), len(b))
    out = [F.sub(a[i] if i < len(a) else 0, b[i] if i < len(b) else 0) for i in range(n)]
    return _trim(out)


def _poly_gcd(a, b, F: BaseField):
    a, b = _trim(list(a)), _trim(list(b))
    while b:
        a, b = b, _poly_mod(a, b, F)
    return a


def _poly_powmod(base, e: int, f, F: BaseField):
    result = [1]
    base = _poly_mod(base, f, F)
    while e:
        if e & 1:
            result = _poly_mod(_poly_mul(result, base, F), f, F)
        base = _poly_mod(_poly_mul(base, base, F), f, F)
        e >>= 1
    return result


def is_irreducible(f, F: BaseField) -> bool:
    """Ben-Or test: f of degree m is irreducible iff gcd(x^(q^i) - x, f) = 1 for i <= m/2."""
    f = _trim(list(f))
    m = len(f) - 1
    if m <= 0:
        return False
    if m == 1:
        return True
    x = [0, 1]
    h = x
    for _ in range(m // 2):
        h = _poly_powmod(h, F.q, f, F)
        g = _poly_gcd(f, _poly_sub(h, x, F), F)
        if len(g) > 1:
            return False
    return True


def _first_irreducible_prime(p: int, e: int):
    F = BaseField.__new__(BaseField)
    # minimal prime-field helper for the inner modulus search
    F.q = p
    F._add = [[(a + b) % p for b in range(p)] for a in range(p)]
    F._mul = [[(a * b) % p for b in range(p)] for a in range(p)]
    F._neg = [(-a) % p for a in range(p)]
    F._inv = [0] + [pow(a, p - 2, p) for a in range(1, p)]
    return first_irreducible(F, e)


def first_irreducible(F: BaseField, m: int) -> list[int]:
    """First monic irreducible of degree m, enumerating coefficient vectors as base-q integers.

    The vector (c_0, ..., c_{m-1}) is read with c_0 as the least significant
    digit, so for (q, m) = (2, 4) this returns x^4 + x + 1.
    """
    q = F.q
    for v in range(q ** m):
        coeffs = _int_to_digits(v, q, m) + [1]
        if m > 1 and coeffs[0] == 0:
            continue
        if is_irreducible(coeffs, F):
            return coeffs
    raise RuntimeError(f"no irreducible polynomial of degree {m} over F_{q}")  # pragma: no cover


# ---------------------------------------------------------------------------


class FieldTower:
    """F_q together with F_{q^m} = F_q[x]/(modulus) and alpha = x mod modulus.

    Immutable after construction.  Extension elements are ints of base-q
    digits (coordinates in the basis 1, alpha, ..., alpha^{m-1}).
    """

    def __init__(self, q: int, m: int, modulus=None):
        if m < 1:
            raise FieldError("extension degree m must be >= 1")
        self.base = base_field(q)
        self.q, self.m = q, m
        self.order = q ** m
        if modulus is None:
            if m == 1:
                # x - 1, so that alpha = 1 is a unit and the basis is (1,)
                modulus = [self.base.neg(1), 1]
            else:
                modulus = first_irreducible(self.base, m)
        modulus = [int(c) for c in modulus]
        if len(modulus) != m + 1 or modulus[-1] != 1:
            raise FieldError("modulus must be monic of degree m")
        if not is_irreducible(modulus, self.base):
            raise FieldError(f"modulus {modulus} is reducible over F_{q}")
        self.modulus = tuple(modulus)
        self.zero, self.one = 0, 1
        self._binary = q == 2
        if self._binary:
            self._mod_mask = _digits_to_int(modulus, 2)
            self._top = 1 << m
        # x^m = -(c_0 + ... + c_{m-1} x^{m-1}) mod modulus
        self._reduce_tail = [self.base.neg(c) for c in modulus[:-1]]
        self.alpha = self._alpha()

    def _alpha(self) -> int:
        if self.m == 1:
            return self.base.neg(self.modulus[0])
        return self.q

    def __repr__(self):
        return f"FieldTower(q={self.q}, m={self.m}, modulus={list(self.modulus)})"

    def __eq__(self, other):
        return isinstance(other, FieldTower) and (other.q, other.m, other.modulus) == (
            self.q, self.m, self.modulus)

    def __hash__(self):
        return hash((self.q, self.m, self.modulus))

    # -- coordinates -------------------------------------------------------

    def to_coords(self, a: int) -> tuple[int, ...]:
        if self._binary:
            return tuple((a >> i) & 1 for i in range(self.m))
        return tuple(_int_to_digits(a, self.q, self.m))

    def from_coords(self, coords) -> int:
        coords = list(coords)
        if len(coords) != self.m:
            raise FieldError(f"expected {self.m} coordinates, got {len(coords)}")
        if any(not 0 <= c < self.q for c in coords):
            raise FieldError(f"coordinate out of range for F_{self.q}: {coords}")
        if self._binary:
            return sum(c << i for i, c in enumerate(coords))
        return _digits_to_int(coords, self.q)

    def coord(self, a: int, i: int) -> int:
        """[alpha^(i-1)] a, with i in 1..m."""
        if not 1 <= i <= self.m:
            raise IndexError(f"coordinate index {i} outside 1..{self.m}")
        if self._binary:
            return (a >> (i - 1)) & 1
        return (a // self.q ** (i - 1)) % self.q

    def embed(self, c: int) -> int:
        """Image of a base-field element in F_{q^m}."""
        return c

    # -- arithmetic --------------------------------------------------------

    def add(self, a: int, b: int) -> int:
        if self._binary:
            return a ^ b
        F = self.base
        return self.from_coords([F.add(x, y) for x, y in zip(self.to_coords(a), self.to_coords(b))])

    def neg(self, a: int) -> int:
        if self._binary:
            return a
        F = self.base
        return self.from_coords([F.neg(x) for x in self.to_coords(a)])

    def sub(self, a: int, b: int) -> int:
        if self._binary:
            return a ^ b
        return self.add(a, self.neg(b))

    def scale(self, c: int, a: int) -> int:
        """Multiply an extension element by a base-field scalar."""
        if self._binary:
            return a if c else 0
        F = self.base
        return self.from_coords([F.mul(c, x) for x in self.to_coords(a)])

    def mul(self, a: int, b: int) -> int:
        if self._binary:
            top, mask = self._top, self._mod_mask
            r = 0
            while b:
                if b & 1:
                    r ^= a
                b >>= 1
                a <<= 1
                if a & top:
                    a ^= mask
            return r
        F = self.base
        x = self.to_coords(a)
        y = self.to_coords(b)
        prod = [0] * (2 * self.m - 1)
        for i, xi in enumerate(x):
            if xi:
                for j, yj in enumerate(y):
                    if yj:
                        prod[i + j] = F.add(prod[i + j], F.mul(xi, yj))
        tail = self._reduce_tail
        for d in range(2 * self.m - 2, self.m - 1, -1):
            c = prod[d]
            if c:
                prod[d] = 0
                s = d - self.m
                for i, t in enumerate(tail):
                    if t:
                        prod[s + i] = F.add(prod[s + i], F.mul(c, t))
        return self.from_coords(prod[: self.m])

    def mul_alpha(self, a: int) -> int:
        """a * alpha, the cheap shift used when expanding alpha^i multiples."""
        if self.m == 1:
            return self.mul(a, self.alpha)
        if self._binary:
            a <<= 1
            if a & self._top:
                a ^= self._mod_mask
            return a
        return self.mul(a, self.alpha)

    def pow(self, a: int, e: int) -> int:
        if e < 0:
            return self.pow(self.inv(a), -e)
        result = 1
        while e:
            if e & 1:
                result = self.mul(result, a)
            a = self.mul(a, a)
            e >>= 1
        return result

    def inv(self, a: int) -> int:
        if a == 0:
            raise ZeroDivisionError("inverse of zero in F_{q^m}")
        return self.pow(a, self.order - 2)

    def alpha_pow(self, i: int) -> int:
        a = 1
        for _ in range(i):
            a = self.mul_alpha(a)
        return a

    def random_element(self, rng, nonzero: bool = False) -> int:
        while True:
            v = int(rng.integers(0, self.order)) if self.order < 2 ** 62 else _big_random(rng, self.order)
            if v or not nonzero:
                return v

    def element(self, value) -> "ExtElement":
        if isinstance(value, str):
            return ExtElement(self, self.parse(value))
        return ExtElement(self, int(value))

    # -- text format "c0,c1,...,c{m-1}" -------------------------------------

    def format(self, a: int) -> str:
        return ",".join(str(c) for c in self.to_coords(a))

    def parse(self, text: str) -> int:
        parts = [p.strip() for p in text.split(",")]
        try:
            coords = [int(p) for p in parts]
        except ValueError as exc:
            raise FieldError(f"malformed element {text!r}") from exc
        return self.from_coords(coords)


def _big_random(rng, bound: int) -> int:
    nbits = bound.bit_length()
    while True:
        v = 0
        for _ in range(0, nbits, 32):
            v = (v << 32) | int(rng.integers(0, 1 << 32))
        v &= (1 << nbits) - 1
        if v < bound:
            return v


def make_tower(q: int, m: int) -> FieldTower:
    if q not in _PRIME_POWERS:
        raise FieldError(f"unsupported base field order q={q}; expected one of {SUPPORTED_Q}")
    return _cached_tower(q, m)


@functools.lru_cache(maxsize=64)
def _cached_tower(q: int, m: int) -> FieldTower:
    return FieldTower(q, m)


@dataclass(frozen=True)
class ExtElement:
    """An element of F_{q^m} bound to its tower, with operator overloads."""

    tower: FieldTower
    value: int

    @property
    def coords(self) -> tuple[int, ...]:
        return self.tower.to_coords(self.value)

    def _other(self, other) -> int:
        if isinstance(other, ExtElement):
            if other.tower != self.tower:
                raise FieldError("elements belong to different towers")
            return other.value
        if isinstance(other, int):
            return self.tower.embed(self.tower.base.from_int(other))
        return NotImplemented

    def __add__(self, other):
        return ExtElement(self.tower, self.tower.add(self.value, self._other(other)))

    __radd__ = __add__

    def __sub__(self, other):
        return ExtElement(self.tower, self.tower.sub(self.value, self._other(other)))

    def __rsub__(self, other):
        return ExtElement(self.tower, self.tower.sub(self._other(other), self.value))

    def __neg__(self):
        return ExtElement(self.tower, self.tower.neg(self.value))

    def __mul__(self, other):
        return ExtElement(self.tower, self.tower.mul(self.value, self._other(other)))

    __rmul__ = __mul__

    def __truediv__(self, other):
        return self * ExtElement(self.tower, self.tower.inv(self._other(other)))

    def __pow__(self, e: int):
        return ExtElement(self.tower, self.tower.pow(self.value, e))

    def inv(self) -> "ExtElement":
        return ExtElement(self.tower, self.tower.inv(self.value))

    def __bool__(self):
        return self.value != 0

    def __str__(self):
        return self.tower.format(self.value)


def ext_arith(a: ExtElement, b: ExtElement | None, op: str) -> ExtElement:
    """Dispatch form of the field operations: op in {"add", "mul", "inv"}."""
    if op == "add":
        return a + b
    if op == "mul":
        return a * b
    if op == "inv":
        return a.inv()
    raise ValueError(f"unknown op {op!r}")


def coord(beta: ExtElement, i: int) -> int:
    """The i-th coordinate [alpha^(i-1)] beta, 1-based."""
    return beta.tower.coord(beta.value, i)
