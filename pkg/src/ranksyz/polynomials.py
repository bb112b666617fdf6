"""Sparse multivariate polynomials with F_q-valued variables.

Monomials are Python ints.  For q = 2 a monomial is the bitmask of its
variables (squarefree, since x^2 = x); otherwise exponents are packed in
fixed-width digit fields, variable i in field i.  Exponents are always
reduced modulo the field equations x^q = x, so they stay below q.

With variable 0 the largest, grevlex on monomials of equal degree compares
the last variable where exponents differ, the smaller exponent winning.  In
the packed encoding that is exactly the reverse of integer order, so the
grevlex-descending sort key is ``(-deg(a), a)``.

Coefficients live in any field object exposing add/sub/neg/mul/inv on
element codes: a ``BaseField`` (F_q) or a ``FieldTower`` (F_{q^m}).
"""

from __future__ import annotations

from itertools import combinations

from .field_core import BaseField, FieldTower, base_field


class PolyRing:
    def __init__(self, nvars: int, q: int = 2, coeffs=None, names=None, reduced: bool = True):
        self.nvars = nvars
        self.q = q
        # reduced=False keeps exponents >= q; only used to display field equations
        self.reduced = reduced
        self.binary = q == 2 and reduced
        self.coeffs = coeffs if coeffs is not None else base_field(q)
        self.base = base_field(q)
        self.names = list(names) if names is not None else [f"x{i}" for i in range(nvars)]
        # room for exponents up to 2(q-1) before reduction
        self.width = 1 if self.binary else (2 * q - 2).bit_length() if reduced else 8
        self._mask = (1 << self.width) - 1

    def __repr__(self):
        return f"PolyRing(nvars={self.nvars}, q={self.q}, coeffs={self.coeffs!r})"

    def with_coeffs(self, coeffs) -> "PolyRing":
        return PolyRing(self.nvars, self.q, coeffs, self.names, self.reduced)

    # -- monomials ---------------------------------------------------------

    def var(self, i: int) -> int:
        if not 0 <= i < self.nvars:
            raise IndexError(f"variable {i} outside 0..{self.nvars - 1}")
        return 1 << (i * self.width)

    def mono_deg(self, a: int) -> int:
        if self.binary:
            return a.bit_count()
        d, w, mask = 0, self.width, self._mask
        while a:
            d += a & mask
            a >>= w
        return d

    def mono_exps(self, a: int) -> list[tuple[int, int]]:
        out = []
        if self.binary:
            while a:
                low = a & -a
                out.append((low.bit_length() - 1, 1))
                a ^= low
            return out
        i, w, mask = 0, self.width, self._mask
        while a:
            e = a & mask
            if e:
                out.append((i, e))
            a >>= w
            i += 1
        return out

    def mono_vars(self, a: int) -> list[int]:
        return [v for v, _ in self.mono_exps(a)]

    def mono_from_exps(self, exps) -> int:
        items = exps.items() if isinstance(exps, dict) else exps
        a = 0
        for v, e in items:
            if e:
                a = self.mono_mul(a, self._pow_var(v, e))
        return a

    def _pow_var(self, v: int, e: int) -> int:
        if self.binary:
            return 1 << v
        e = self._reduce_exp(e)
        return e << (v * self.width)

    def _reduce_exp(self, e: int) -> int:
        q = self.q
        if not self.reduced:
            return e
        while e >= q:
            e -= q - 1
        return e

    def mono_mul(self, a: int, b: int) -> int:
        if self.binary:
            return a | b
        s = a + b
        if not self.reduced:
            return s
        q, w, mask = self.q, self.width, self._mask
        # fix fields whose exponent reached q
        out, shift, t = 0, 0, s
        while t:
            e = t & mask
            if e >= q:
                e -= q - 1
            out |= e << shift
            t >>= w
            shift += w
        return out

    def mono_divides(self, a: int, b: int) -> bool:
        if self.binary:
            return a & ~b == 0
        ea, eb = dict(self.mono_exps(a)), dict(self.mono_exps(b))
        return all(eb.get(v, 0) >= e for v, e in ea.items())

    def key(self, a: int):
        return (-self.mono_deg(a), a)

    def grevlex_gt(self, a: int, b: int) -> bool:
        da, db = self.mono_deg(a), self.mono_deg(b)
        if da != db:
            return da > db
        return a < b

    def mono_str(self, a: int) -> str:
        if a == 0:
            return "1"
        parts = []
        for v, e in self.mono_exps(a):
            parts.append(self.names[v] if e == 1 else f"{self.names[v]}^{e}")
        return "*".join(parts)

    def monomials_upto(self, d: int, variables=None) -> list[int]:
        """All reduced monomials of degree <= d in the given variables, grevlex-descending."""
        variables = list(range(self.nvars)) if variables is None else list(variables)
        out = []
        if self.binary:
            for deg in range(d, -1, -1):
                block = [sum(1 << v for v in c) for c in combinations(variables, deg)]
                block.sort()
                out.extend(block)
            return out
        monos = {0}
        frontier = {0}
        for _ in range(d):
            nxt = set()
            for a in frontier:
                for v in variables:
                    b = self.mono_mul(a, self.var(v))
                    if self.mono_deg(b) == self.mono_deg(a) + 1:
                        nxt.add(b)
            monos |= nxt
            frontier = nxt
        return sorted(monos, key=self.key)

    # -- polynomial constructors ------------------------------------------

    def zero(self) -> "Polynomial":
        return Polynomial(self, {})

    def one(self) -> "Polynomial":
        return Polynomial(self, {0: 1})

    def const(self, c) -> "Polynomial":
        return Polynomial(self, {0: c} if c else {})

    def gen(self, i: int) -> "Polynomial":
        return Polynomial(self, {self.var(i): 1})

    def from_terms(self, terms) -> "Polynomial":
        F = self.coeffs
        acc: dict[int, int] = {}
        for mono, c in terms:
            if c:
                v = F.add(acc.get(mono, 0), c)
                if v:
                    acc[mono] = v
                else:
                    acc.pop(mono, None)
        return Polynomial(self, acc)


def _scalar_times(F, v: int, c: int) -> int:
    """Base-field value v times coefficient c (which may live in an extension)."""
    if isinstance(F, FieldTower):
        return F.scale(v, c)
    return F.mul(v, c)


class Polynomial:
    """Immutable sparse polynomial; ``terms`` maps monomial -> nonzero coefficient."""

    __slots__ = ("ring", "terms")

    def __init__(self, ring: PolyRing, terms: dict[int, int]):
        self.ring = ring
        self.terms = terms

    # -- basic queries -----------------------------------------------------

    def is_zero(self) -> bool:
        return not self.terms

    def __bool__(self):
        return bool(self.terms)

    def __len__(self):
        return len(self.terms)

    def __eq__(self, other):
        if isinstance(other, Polynomial):
            return self.terms == other.terms
        if isinstance(other, int):
            return self.terms == ({0: other} if other else {})
        return NotImplemented

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def degree(self) -> int:
        if not self.terms:
            return -1
        return max(self.ring.mono_deg(a) for a in self.terms)

    def monomials(self) -> list[int]:
        """Monomials in grevlex-descending order."""
        return sorted(self.terms, key=self.ring.key)

    def items(self) -> list[tuple[int, int]]:
        return [(a, self.terms[a]) for a in self.monomials()]

    def leading_monomial(self) -> int:
        if not self.terms:
            raise ValueError("zero polynomial has no leading monomial")
        return min(self.terms, key=self.ring.key)

    def constant_term(self) -> int:
        return self.terms.get(0, 0)

    def variables(self) -> set[int]:
        mask = 0
        for a in self.terms:
            mask |= a
        if self.ring.binary:
            return set(self.ring.mono_vars(mask))
        out = set()
        for a in self.terms:
            out.update(self.ring.mono_vars(a))
        return out

    # -- arithmetic --------------------------------------------------------

    def _combine(self, other: "Polynomial", sub: bool) -> "Polynomial":
        F = self.ring.coeffs
        out = dict(self.terms)
        for a, c in other.terms.items():
            v = F.sub(out.get(a, 0), c) if sub else F.add(out.get(a, 0), c)
            if v:
                out[a] = v
            else:
                out.pop(a, None)
        return Polynomial(self.ring, out)

    def _lift(self, other) -> "Polynomial":
        if isinstance(other, Polynomial):
            return other
        if isinstance(other, int):
            return self.ring.const(other)
        return NotImplemented

    def __add__(self, other):
        other = self._lift(other)
        if other is NotImplemented:
            return other
        return self._combine(other, False)

    __radd__ = __add__

    def __sub__(self, other):
        other = self._lift(other)
        if other is NotImplemented:
            return other
        return self._combine(other, True)

    def __rsub__(self, other):
        return (-self) + other

    def __neg__(self):
        F = self.ring.coeffs
        return Polynomial(self.ring, {a: F.neg(c) for a, c in self.terms.items()})

    def scale(self, c: int) -> "Polynomial":
        if not c:
            return self.ring.zero()
        F = self.ring.coeffs
        out = {}
        for a, v in self.terms.items():
            w = F.mul(c, v)
            if w:
                out[a] = w
        return Polynomial(self.ring, out)

    def __mul__(self, other):
        if isinstance(other, int):
            return self.scale(other)
        if not isinstance(other, Polynomial):
            return NotImplemented
        R, F = self.ring, self.ring.coeffs
        out: dict[int, int] = {}
        for a, ca in self.terms.items():
            for b, cb in other.terms.items():
                m = R.mono_mul(a, b)
                v = F.add(out.get(m, 0), F.mul(ca, cb))
                if v:
                    out[m] = v
                else:
                    out.pop(m, None)
        return Polynomial(R, out)

    __rmul__ = __mul__

    def mul_monomial(self, t: int) -> "Polynomial":
        R, F = self.ring, self.ring.coeffs
        out: dict[int, int] = {}
        for a, c in self.terms.items():
            m = R.mono_mul(a, t)
            v = F.add(out.get(m, 0), c)
            if v:
                out[m] = v
            else:
                out.pop(m, None)
        return Polynomial(R, out)

    # -- structure ---------------------------------------------------------

    def homogeneous_part(self, d: int) -> "Polynomial":
        R = self.ring
        return Polynomial(R, {a: c for a, c in self.terms.items() if R.mono_deg(a) == d})

    def top_part(self) -> "Polynomial":
        """f^h: the homogeneous component of highest degree."""
        return self.homogeneous_part(self.degree()) if self.terms else self

    def derivative(self, i: int) -> "Polynomial":
        """Formal partial derivative with respect to variable i."""
        R, F = self.ring, self.ring.coeffs
        out: dict[int, int] = {}
        for a, c in self.terms.items():
            exps = dict(R.mono_exps(a))
            e = exps.get(i, 0)
            if not e:
                continue
            factor = R.base.from_int(e)
            if not factor:
                continue
            exps[i] = e - 1
            m = R.mono_from_exps(exps)
            v = F.add(out.get(m, 0), _scalar_times(F, factor, c))
            if v:
                out[m] = v
            else:
                out.pop(m, None)
        return Polynomial(R, out)

    def evaluate(self, point) -> int:
        """Value at an F_q point (sequence indexed by variable)."""
        R, F = self.ring, self.ring.coeffs
        B = R.base
        acc = 0
        for a, c in self.terms.items():
            v = 1
            for var, e in R.mono_exps(a):
                x = point[var]
                if not x:
                    v = 0
                    break
                for _ in range(e):
                    v = B.mul(v, x)
            if v:
                acc = F.add(acc, _scalar_times(F, v, c))
        return acc

    def substitute(self, mapping: dict[int, "Polynomial"]) -> "Polynomial":
        """Replace variables by polynomials (then reduce by the field equations)."""
        R = self.ring
        if R.binary and isinstance(R.coeffs, BaseField):
            return _substitute_gf2(self, mapping)
        out = R.zero()
        cache: dict[tuple[int, int], Polynomial] = {}
        for a, c in self.terms.items():
            rest = 0
            term = R.const(c)
            for var, e in R.mono_exps(a):
                if var in mapping:
                    key = (var, e)
                    if key not in cache:
                        p = R.one()
                        for _ in range(e):
                            p = p * mapping[var]
                        cache[key] = p
                    term = term * cache[key]
                else:
                    rest = R.mono_mul(rest, R._pow_var(var, e))
            out = out + term.mul_monomial(rest)
        return out

    def change_ring(self, ring: PolyRing) -> "Polynomial":
        return Polynomial(ring, dict(self.terms))

    def split_coords(self, base_ring: PolyRing | None = None) -> list["Polynomial"]:
        """For coefficients in F_{q^m}: the m polynomials [alpha^(i-1)] f over F_q."""
        T = self.ring.coeffs
        if not isinstance(T, FieldTower):
            raise TypeError("split_coords needs F_{q^m} coefficients")
        ring = base_ring or self.ring.with_coeffs(T.base)
        outs: list[dict[int, int]] = [dict() for _ in range(T.m)]
        for a, c in self.terms.items():
            for i, v in enumerate(T.to_coords(c)):
                if v:
                    outs[i][a] = v
        return [Polynomial(ring, t) for t in outs]

    def to_str(self) -> str:
        if not self.terms:
            return "0"
        R, F = self.ring, self.ring.coeffs
        parts = []
        for a, c in self.items():
            cs = F.format(c) if isinstance(F, FieldTower) else str(c)
            cs = f"({cs})" if isinstance(F, FieldTower) else cs
            if a == 0:
                parts.append(cs)
            elif c == 1:
                parts.append(R.mono_str(a))
            else:
                parts.append(f"{cs}*{R.mono_str(a)}")
        return " + ".join(parts)

    __str__ = to_str

    def __repr__(self):
        return f"Polynomial({self.to_str()})"


def _substitute_gf2(f: Polynomial, mapping: dict[int, Polynomial]) -> Polynomial:
    """Substitution over F_2 with monomial sets and XOR accumulation."""
    submask = 0
    for v in mapping:
        submask |= 1 << v
    images = {v: list(p.terms) for v, p in mapping.items()}
    acc: set[int] = set()
    for a in f.terms:
        hit = a & submask
        if not hit:
            acc ^= {a}
            continue
        partial = {a & ~submask}
        while hit:
            low = hit & -hit
            hit ^= low
            img = images[low.bit_length() - 1]
            nxt: set[int] = set()
            for u in partial:
                for b in img:
                    nxt ^= {u | b}
            partial = nxt
            if not partial:
                break
        acc ^= partial
    return Polynomial(f.ring, dict.fromkeys(acc, 1))


def dump(polys, ring: PolyRing | None = None) -> str:
    """One polynomial per line, terms grevlex-descending."""
    return "\n".join(p.to_str() for p in polys)
