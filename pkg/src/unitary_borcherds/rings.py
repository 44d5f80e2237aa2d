"""Exact coefficient rings.

CycElem is an element of Q[X]/(X^m - 1) with X standing for exp(2 pi i/m).
The algebra itself is not a field (it has zero divisors), so value-level
questions (is it zero, is it rational, what is its inverse) go through the
reduction modulo the m-th cyclotomic polynomial.
"""
from __future__ import annotations

import cmath
import math
import sys
from fractions import Fraction
from functools import lru_cache
from typing import Dict, Iterable, Mapping, Sequence, Tuple, Union

import numpy as np

# eta powers and theta products carry integers far beyond the default decimal conversion limit
if hasattr(sys, "set_int_max_str_digits"):
    sys.set_int_max_str_digits(0)

Scalar = Union[int, Fraction]


def _as_fraction(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    raise TypeError(f"not an exact scalar: {x!r}")


def parse_fraction(text: str) -> Fraction:
    text = text.strip()
    if "/" in text:
        p, q = text.split("/")
        return Fraction(int(p), int(q))
    return Fraction(int(text))


def format_fraction(x: Fraction) -> str:
    x = _as_fraction(x)
    return f"{x.numerator}/{x.denominator}"


# integer polynomial helpers, coefficient lists low degree first

def _poly_divmod_int(a: list, b: list) -> Tuple[list, list]:
    """Division by a monic integer polynomial."""
    a = list(a)
    db = len(b) - 1
    assert b[-1] == 1
    if len(a) - 1 < db:
        return [0], a
    q = [0] * (len(a) - db)
    for i in range(len(a) - 1, db - 1, -1):
        c = a[i]
        if c:
            q[i - db] = c
            for j in range(db + 1):
                a[i - db + j] -= c * b[j]
    return q, a[:db] if db else [0]


@lru_cache(maxsize=None)
def cyclotomic_poly(m: int) -> Tuple[int, ...]:
    """Coefficients of the m-th cyclotomic polynomial, low degree first."""
    num = [-1] + [0] * (m - 1) + [1]
    for d in range(1, m):
        if m % d == 0:
            num, rem = _poly_divmod_int(num, list(cyclotomic_poly(d)))
            assert not any(rem)
    return tuple(num)


def _units_mod(m: int) -> list:
    return [j for j in range(1, m + 1) if math.gcd(j, m) == 1]


class CycElem:
    """Element of Q[X]/(X^order - 1), stored as integer numerators over a common denominator."""

    __slots__ = ("order", "_num", "_den")

    def __init__(self, order: int, coords: Iterable = None, _raw=None):
        self.order = int(order)
        if _raw is not None:
            num, den = _raw
        else:
            fr = [_as_fraction(c) for c in coords]
            if len(fr) != self.order:
                raise ValueError("coordinate length must equal the order")
            den = 1
            for c in fr:
                den = den * c.denominator // math.gcd(den, c.denominator)
            num = [c.numerator * (den // c.denominator) for c in fr]
        g = den
        for v in num:
            if v:
                g = math.gcd(g, v)
                if g == 1:
                    break
        if not any(num):
            den, g = 1, 1
        if g != 1:
            num = [v // g for v in num]
            den //= g
        self._num = tuple(num)
        self._den = den

    # constructors

    @classmethod
    def zero(cls, order: int) -> "CycElem":
        return cls(order, _raw=([0] * order, 1))

    @classmethod
    def one(cls, order: int) -> "CycElem":
        return cls.scalar(order, 1)

    @classmethod
    def scalar(cls, order: int, c) -> "CycElem":
        c = _as_fraction(c)
        num = [0] * order
        num[0] = c.numerator
        return cls(order, _raw=(num, c.denominator))

    @classmethod
    def root(cls, order: int, t: int, c=1) -> "CycElem":
        """c * X^t."""
        c = _as_fraction(c)
        num = [0] * order
        num[t % order] = c.numerator
        return cls(order, _raw=(num, c.denominator))

    # accessors

    @property
    def coords(self) -> Tuple[Fraction, ...]:
        return tuple(Fraction(v, self._den) for v in self._num)

    def __getitem__(self, t: int) -> Fraction:
        return Fraction(self._num[t % self.order], self._den)

    def is_zero(self) -> bool:
        return not any(self._num)

    def __bool__(self) -> bool:
        return not self.is_zero()

    def __hash__(self):
        return hash((self.order, self._num, self._den))

    def __eq__(self, other) -> bool:
        if isinstance(other, CycElem):
            return self.order == other.order and self._num == other._num and self._den == other._den
        if isinstance(other, (int, Fraction)):
            return self == CycElem.scalar(self.order, other)
        return NotImplemented

    def __repr__(self):
        return f"CycElem({self.serialize()})"

    # arithmetic

    def _coerce(self, other) -> "CycElem":
        if isinstance(other, CycElem):
            if other.order != self.order:
                raise ValueError(f"order mismatch {self.order} vs {other.order}")
            return other
        if isinstance(other, (int, Fraction)):
            return CycElem.scalar(self.order, other)
        raise TypeError

    def __add__(self, other):
        try:
            o = self._coerce(other)
        except TypeError:
            return NotImplemented
        den = self._den * o._den // math.gcd(self._den, o._den)
        a, b = den // self._den, den // o._den
        return CycElem(self.order, _raw=([x * a + y * b for x, y in zip(self._num, o._num)], den))

    __radd__ = __add__

    def __neg__(self):
        return CycElem(self.order, _raw=([-x for x in self._num], self._den))

    def __sub__(self, other):
        try:
            o = self._coerce(other)
        except TypeError:
            return NotImplemented
        return self + (-o)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            c = _as_fraction(other)
            return CycElem(self.order, _raw=([x * c.numerator for x in self._num], self._den * c.denominator))
        if not isinstance(other, CycElem):
            return NotImplemented
        o = self._coerce(other)
        m = self.order
        out = [0] * m
        bnz = [(j, y) for j, y in enumerate(o._num) if y]
        for i, x in enumerate(self._num):
            if x:
                for j, y in bnz:
                    k = i + j
                    if k >= m:
                        k -= m
                    out[k] += x * y
        return CycElem(m, _raw=(out, self._den * o._den))

    def __rmul__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.__mul__(other)
        return NotImplemented

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction)):
            return self * (1 / _as_fraction(other))
        if isinstance(other, CycElem):
            return self * other.inverse()
        return NotImplemented

    def __rtruediv__(self, other):
        return self.inverse() * other

    def __pow__(self, e: int):
        if e < 0:
            return self.inverse() ** (-e)
        result = CycElem.one(self.order)
        base = self
        while e:
            if e & 1:
                result = result * base
            e >>= 1
            if e:
                base = base * base
        return result

    def conj(self) -> "CycElem":
        """Complex conjugation, X -> X^-1."""
        m = self.order
        return CycElem(m, _raw=([self._num[(-t) % m] for t in range(m)], self._den))

    def galois(self, j: int) -> "CycElem":
        """The automorphism X -> X^j (j a unit mod the order)."""
        m = self.order
        out = [0] * m
        for t, v in enumerate(self._num):
            if v:
                out[(t * j) % m] += v
        return CycElem(m, _raw=(out, self._den))

    # values

    def to_complex(self, j: int = 1) -> complex:
        m = self.order
        s = 0j
        for t, v in enumerate(self._num):
            if v:
                s += v * cmath.exp(2j * math.pi * ((t * j) % m) / m)
        return s / self._den

    def reduced_coords(self) -> Tuple[Fraction, ...]:
        """Canonical coordinates modulo the cyclotomic polynomial (length phi(order))."""
        phi = cyclotomic_poly(self.order)
        _, r = _poly_divmod_int(list(self._num), list(phi))
        deg = len(phi) - 1
        r = list(r) + [0] * (deg - len(r))
        return tuple(Fraction(v, self._den) for v in r[:deg])

    def reduce(self) -> "CycElem":
        """Same complex value, canonical representative of degree < phi(order)."""
        r = self.reduced_coords()
        return CycElem(self.order, list(r) + [0] * (self.order - len(r)))

    def value_eq(self, other) -> bool:
        return (self - other).is_zero_value()

    def is_zero_value(self) -> bool:
        return not any(self.reduced_coords())

    def rational_value(self):
        """The rational number this element equals, or None if it is not rational."""
        r = self.reduced_coords()
        if any(r[1:]):
            return None
        return r[0]

    def trace_average(self) -> Fraction:
        """Average of all Galois conjugates; a rational number."""
        js = _units_mod(self.order)
        tot = CycElem.zero(self.order)
        for j in js:
            tot = tot + self.galois(j)
        r = tot.rational_value()
        assert r is not None
        return r / len(js)

    def inverse(self) -> "CycElem":
        """Value-level inverse: a * a.inverse() has value 1 (equal modulo the cyclotomic polynomial)."""
        phi = [Fraction(c) for c in cyclotomic_poly(self.order)]
        a = list(self.reduced_coords())
        if not any(a):
            raise ZeroDivisionError("CycElem has value zero")
        inv = _poly_inverse_mod(a, phi)
        return CycElem(self.order, inv + [Fraction(0)] * (self.order - len(inv)))

    # interchange

    def serialize(self) -> str:
        return f"cyc:{self.order}:" + ",".join(format_fraction(c) for c in self.coords)

    @classmethod
    def parse(cls, text: str) -> "CycElem":
        head, order, body = text.strip().split(":", 2)
        if head != "cyc":
            raise ValueError(f"not a cyclotomic element: {text!r}")
        order = int(order)
        parts = body.split(",")
        return cls(order, [parse_fraction(p) for p in parts])


def _poly_trim(p):
    while len(p) > 1 and p[-1] == 0:
        p.pop()
    return p


def _poly_inverse_mod(a, modulus):
    """Inverse of a modulo an irreducible rational polynomial via extended Euclid."""
    def pdivmod(x, y):
        x = list(x)
        y = _poly_trim(list(y))
        q = [Fraction(0)] * max(1, len(x) - len(y) + 1)
        while len(_poly_trim(x)) >= len(y) and any(x):
            c = x[-1] / y[-1]
            s = len(x) - len(y)
            q[s] = c
            for i, v in enumerate(y):
                x[s + i] -= c * v
            x.pop()
            if not x:
                x = [Fraction(0)]
        return q, _poly_trim(x)

    def pmul(x, y):
        out = [Fraction(0)] * (len(x) + len(y) - 1)
        for i, u in enumerate(x):
            if u:
                for j, v in enumerate(y):
                    out[i + j] += u * v
        return out

    def psub(x, y):
        n = max(len(x), len(y))
        x = list(x) + [Fraction(0)] * (n - len(x))
        y = list(y) + [Fraction(0)] * (n - len(y))
        return _poly_trim([u - v for u, v in zip(x, y)])

    r0, r1 = _poly_trim(list(modulus)), _poly_trim(list(a))
    s0, s1 = [Fraction(0)], [Fraction(1)]
    while any(r1):
        q, r = pdivmod(r0, r1)
        r0, r1 = r1, r
        s0, s1 = s1, psub(s0, pmul(q, s1))
    # r0 is a nonzero constant since the modulus is irreducible
    assert len(r0) == 1 and r0[0] != 0
    inv = [c / r0[0] for c in s0]
    _, inv = pdivmod(inv, modulus)
    return inv


class FourthRoot:
    """A power of i, stored as its exponent mod 4."""

    __slots__ = ("e",)

    def __init__(self, e: int):
        self.e = e % 4

    def __mul__(self, other):
        if isinstance(other, FourthRoot):
            return FourthRoot(self.e + other.e)
        return NotImplemented

    def __pow__(self, k: int):
        return FourthRoot(self.e * k)

    def inverse(self) -> "FourthRoot":
        return FourthRoot(-self.e)

    def __eq__(self, other):
        return isinstance(other, FourthRoot) and self.e == other.e

    def __hash__(self):
        return hash(("i", self.e))

    def to_complex(self) -> complex:
        return (1, 1j, -1, -1j)[self.e]

    def to_cyc(self, order: int) -> CycElem:
        if order % 4:
            raise ValueError("order must be divisible by 4")
        return CycElem.root(order, self.e * (order // 4))

    def __repr__(self):
        return ("1", "i", "-1", "-i")[self.e]


Exps2 = Tuple[int, ...]


class EllipticMonomial:
    """zeta^e for a vector e of half-integers; exponents stored doubled."""

    __slots__ = ("exps2",)

    def __init__(self, exps2: Sequence[int]):
        self.exps2 = tuple(int(e) for e in exps2)

    @classmethod
    def from_exponents(cls, exps: Sequence) -> "EllipticMonomial":
        out = []
        for e in exps:
            e2 = 2 * _as_fraction(e)
            if e2.denominator != 1:
                raise ValueError(f"exponent {e} is not a half-integer")
            out.append(int(e2))
        return cls(out)

    @property
    def exponents(self) -> Tuple[Fraction, ...]:
        return tuple(Fraction(e, 2) for e in self.exps2)

    @property
    def rank(self) -> int:
        return len(self.exps2)

    def __mul__(self, other: "EllipticMonomial") -> "EllipticMonomial":
        if self.rank != other.rank:
            raise ValueError("rank mismatch")
        return EllipticMonomial(tuple(a + b for a, b in zip(self.exps2, other.exps2)))

    def __eq__(self, other):
        return isinstance(other, EllipticMonomial) and self.exps2 == other.exps2

    def __hash__(self):
        return hash(self.exps2)

    def __repr__(self):
        return f"zeta^{list(map(str, self.exponents))}"


def _coeff_is_zero(c) -> bool:
    if isinstance(c, (int, Fraction)):
        return c == 0
    return c.is_zero()


class GroupAlgebraElem:
    """Finite combination of elliptic monomials with exact coefficients.

    Coefficients are rationals or CycElems (or anything with ring operations and is_zero).
    """

    __slots__ = ("rank", "terms")

    def __init__(self, rank: int, terms: Mapping[Exps2, object] = None):
        self.rank = int(rank)
        clean: Dict[Exps2, object] = {}
        for k, v in (terms or {}).items():
            k = tuple(k)
            if len(k) != self.rank:
                raise ValueError("monomial rank mismatch")
            if isinstance(v, Fraction) and v.denominator == 1:
                v = v.numerator
            if not _coeff_is_zero(v):
                clean[k] = v
        self.terms = clean

    @classmethod
    def monomial(cls, exps2: Sequence[int], coeff=1) -> "GroupAlgebraElem":
        return cls(len(exps2), {tuple(exps2): coeff})

    @classmethod
    def scalar(cls, rank: int, c) -> "GroupAlgebraElem":
        return cls(rank, {(0,) * rank: c})

    def is_zero(self) -> bool:
        return not self.terms

    def __bool__(self):
        return bool(self.terms)

    def __eq__(self, other):
        if isinstance(other, (int, Fraction, CycElem)):
            other = GroupAlgebraElem.scalar(self.rank, other)
        if not isinstance(other, GroupAlgebraElem):
            return NotImplemented
        return self.rank == other.rank and self.terms == other.terms

    def __hash__(self):
        return hash((self.rank, frozenset(self.terms.items())))

    def __repr__(self):
        return f"GroupAlgebraElem({self.serialize()})"

    def _coerce(self, other) -> "GroupAlgebraElem":
        if isinstance(other, GroupAlgebraElem):
            if other.rank != self.rank:
                raise ValueError("rank mismatch")
            return other
        if isinstance(other, (int, Fraction, CycElem)):
            return GroupAlgebraElem.scalar(self.rank, other)
        raise TypeError

    def __add__(self, other):
        try:
            o = self._coerce(other)
        except TypeError:
            return NotImplemented
        t = dict(self.terms)
        for k, v in o.terms.items():
            t[k] = t[k] + v if k in t else v
        return GroupAlgebraElem(self.rank, t)

    __radd__ = __add__

    def __neg__(self):
        return GroupAlgebraElem(self.rank, {k: -v for k, v in self.terms.items()})

    def __sub__(self, other):
        try:
            o = self._coerce(other)
        except TypeError:
            return NotImplemented
        return self + (-o)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, (int, Fraction, CycElem)):
            return GroupAlgebraElem(self.rank, {k: v * other for k, v in self.terms.items()})
        if not isinstance(other, GroupAlgebraElem):
            return NotImplemented
        if other.rank != self.rank:
            raise ValueError("rank mismatch")
        if self.rank == 1 and len(self.terms) * len(other.terms) > 64 and self._all_int() and other._all_int():
            return self._mul_dense1(other)
        out: Dict[Exps2, object] = {}
        for k1, v1 in self.terms.items():
            for k2, v2 in other.terms.items():
                k = tuple(a + b for a, b in zip(k1, k2))
                p = v1 * v2
                out[k] = out[k] + p if k in out else p
        return GroupAlgebraElem(self.rank, out)

    def __rmul__(self, other):
        if isinstance(other, (int, Fraction, CycElem)):
            return GroupAlgebraElem(self.rank, {k: other * v for k, v in self.terms.items()})
        return NotImplemented

    def _all_int(self) -> bool:
        return all(type(v) is int for v in self.terms.values())

    def _mul_dense1(self, other: "GroupAlgebraElem") -> "GroupAlgebraElem":
        a0, a1 = min(self.terms)[0], max(self.terms)[0]
        b0, b1 = min(other.terms)[0], max(other.terms)[0]
        a = np.zeros(a1 - a0 + 1, dtype=object)
        b = np.zeros(b1 - b0 + 1, dtype=object)
        for (k,), v in self.terms.items():
            a[k - a0] = v
        for (k,), v in other.terms.items():
            b[k - b0] = v
        c = np.convolve(a, b)
        return GroupAlgebraElem(1, {(i + a0 + b0,): int(v) for i, v in enumerate(c) if v})

    def __pow__(self, e: int):
        if e < 0:
            return self.inverse() ** (-e)
        result = GroupAlgebraElem.scalar(self.rank, 1)
        base = self
        while e:
            if e & 1:
                result = result * base
            e >>= 1
            if e:
                base = base * base
        return result

    def is_unit(self) -> bool:
        if len(self.terms) != 1:
            return False
        (c,) = self.terms.values()
        if isinstance(c, CycElem):
            return not c.is_zero_value()
        return not _coeff_is_zero(c)

    def inverse(self) -> "GroupAlgebraElem":
        """Inverse of a monomial with invertible coefficient."""
        if not self.is_unit():
            raise ZeroDivisionError("only monomials with invertible coefficient are units here")
        ((k, c),) = self.terms.items()
        inv = c.inverse() if isinstance(c, CycElem) else 1 / _as_fraction(c)
        return GroupAlgebraElem(self.rank, {tuple(-a for a in k): inv})

    def truediv_scalar(self, c):
        return self * (1 / _as_fraction(c))

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.truediv_scalar(other)
        if isinstance(other, CycElem):
            return self * other.inverse()
        if isinstance(other, GroupAlgebraElem):
            return self * other.inverse()
        return NotImplemented

    def map_exponents(self, f) -> "GroupAlgebraElem":
        """Apply a linear map on doubled exponent vectors; f returns a tuple of the new rank."""
        out: Dict[Exps2, object] = {}
        new_rank = None
        for k, v in self.terms.items():
            nk = tuple(f(k))
            new_rank = len(nk)
            out[nk] = out[nk] + v if nk in out else v
        return GroupAlgebraElem(new_rank if new_rank is not None else self.rank, out)

    def scale_exponents(self, d: int) -> "GroupAlgebraElem":
        """zeta -> zeta^d."""
        return self.map_exponents(lambda k: tuple(d * a for a in k))

    def specialize(self, images2: Sequence[CycElem]) -> CycElem:
        """Substitute zeta_j^(1/2) -> images2[j] (CycElems of a common order)."""
        order = images2[0].order
        tot = CycElem.zero(order)
        for k, v in self.terms.items():
            t = v if isinstance(v, CycElem) else CycElem.scalar(order, v)
            for img, e in zip(images2, k):
                if e:
                    t = t * (img ** e)
            tot = tot + t
        return tot

    def specialize_torsion(self, bs: Sequence[int], order: int) -> CycElem:
        """Substitute zeta_j^(1/2) -> X^(bs[j]) in Q[X]/(X^order - 1)."""
        tot = CycElem.zero(order)
        for k, v in self.terms.items():
            t = sum(e * b for e, b in zip(k, bs))
            term = CycElem.root(order, t)
            tot = tot + term * v
        return tot

    def evaluate(self, z: Sequence[complex]) -> complex:
        """Numerical value at zeta_j = exp(2 pi i z_j)."""
        s = 0j
        for k, v in self.terms.items():
            ph = sum(e * zj for e, zj in zip(k, z)) / 2
            cv = v.to_complex() if isinstance(v, CycElem) else float(v)
            s += cv * cmath.exp(2j * math.pi * ph)
        return s

    # interchange: ga:<rank>:{e1 e2 ...=coeff;...} with doubled exponents

    def serialize(self) -> str:
        items = sorted(self.terms.items())
        body = ";".join(" ".join(str(e) for e in k) + "=" + serialize_coeff(v) for k, v in items)
        return f"ga:{self.rank}:{{{body}}}"

    @classmethod
    def parse(cls, text: str) -> "GroupAlgebraElem":
        text = text.strip()
        head, rank, body = text.split(":", 2)
        if head != "ga" or not (body.startswith("{") and body.endswith("}")):
            raise ValueError(f"not a group algebra element: {text!r}")
        rank = int(rank)
        body = body[1:-1]
        terms = {}
        if body:
            for item in _split_top(body, ";"):
                k, v = item.split("=", 1)
                exps = tuple(int(e) for e in k.split()) if k.strip() else ()
                terms[exps] = parse_coeff(v)
        return cls(rank, terms)


def _split_top(s: str, sep: str) -> list:
    out, depth, cur = [], 0, []
    for ch in s:
        if ch == "{":
            depth += 1
        elif ch == "}":
            depth -= 1
        if ch == sep and depth == 0:
            out.append("".join(cur))
            cur = []
        else:
            cur.append(ch)
    out.append("".join(cur))
    return out


def serialize_coeff(c) -> str:
    if isinstance(c, (int, Fraction)):
        return format_fraction(c)
    return c.serialize()


def parse_coeff(text: str):
    text = text.strip()
    if text.startswith("cyc:"):
        return CycElem.parse(text)
    if text.startswith("ga:"):
        return GroupAlgebraElem.parse(text)
    return parse_fraction(text)


def ring_tag(c) -> str:
    if isinstance(c, (int, Fraction)):
        return "rational"
    if isinstance(c, CycElem):
        return f"cyc:{c.order}"
    if isinstance(c, GroupAlgebraElem):
        return f"groupalg:{c.rank}"
    raise TypeError(f"unknown coefficient type {type(c)}")


def coeff_is_zero(c) -> bool:
    return _coeff_is_zero(c)


def coeff_to_complex(c) -> complex:
    if isinstance(c, (int, Fraction)):
        return complex(float(c))
    return c.to_complex()

EllipticGroupElem = EllipticMonomial
