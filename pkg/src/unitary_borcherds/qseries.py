"""Truncated q-series with exponents in (1/N)Z over exact coefficient rings."""
from __future__ import annotations

import math
from fractions import Fraction
from functools import lru_cache
from typing import Callable, Dict, Iterable, Optional, Tuple

from .rings import (
    CycElem,
    GroupAlgebraElem,
    coeff_is_zero,
    format_fraction,
    parse_coeff,
    parse_fraction,
    ring_tag,
    serialize_coeff,
)

INF = None  # exact (untruncated) series use prec=None


def _lcm(a: int, b: int) -> int:
    return a * b // math.gcd(a, b)


def _min_prec(*ps):
    vals = [p for p in ps if p is not None]
    return min(vals) if vals else None


def _scalar_inverse(c):
    if isinstance(c, (int, Fraction)):
        if c == 0:
            raise ZeroDivisionError("zero leading coefficient")
        return 1 / Fraction(c)
    if isinstance(c, CycElem):
        return c.inverse()
    if isinstance(c, GroupAlgebraElem):
        return c.inverse()
    if isinstance(c, QExp):
        return c.invert()
    raise TypeError(f"cannot invert {type(c)}")


class QExp:
    """sum_k c_k q^(k/N), certified for exponents < prec (prec None: exact)."""

    __slots__ = ("N", "prec", "terms")

    def __init__(self, terms: Dict[int, object] = None, N: int = 1, prec=None):
        self.N = int(N)
        self.prec = None if prec is None else Fraction(prec)
        clean = {}
        for k, v in (terms or {}).items():
            if isinstance(v, int):
                v = Fraction(v)
            if coeff_is_zero(v):
                continue
            if self.prec is not None and Fraction(k, self.N) >= self.prec:
                continue
            clean[int(k)] = v
        self.terms = clean

    # constructors

    @classmethod
    def from_exponents(cls, items: Dict, prec=None) -> "QExp":
        """Build from a mapping exponent (Fraction) -> coefficient."""
        N = 1
        for e in items:
            N = _lcm(N, Fraction(e).denominator)
        return cls({int(Fraction(e) * N): v for e, v in items.items()}, N, prec)

    @classmethod
    def one(cls, prec=None) -> "QExp":
        return cls({0: Fraction(1)}, 1, prec)

    @classmethod
    def monomial(cls, e, coeff=1, prec=None) -> "QExp":
        e = Fraction(e)
        return cls({e.numerator: coeff}, e.denominator, prec)

    @classmethod
    def from_list(cls, coeffs: Iterable, prec=None) -> "QExp":
        """Integer-exponent series from a coefficient list starting at q^0."""
        coeffs = list(coeffs)
        return cls(dict(enumerate(coeffs)), 1, len(coeffs) if prec is None else prec)

    # basic accessors

    def exponents(self):
        return sorted(Fraction(k, self.N) for k in self.terms)

    def items(self):
        """(exponent, coefficient) pairs in increasing exponent order."""
        return [(Fraction(k, self.N), self.terms[k]) for k in sorted(self.terms)]

    def coefficient(self, e):
        e = Fraction(e)
        if self.prec is not None and e >= self.prec:
            raise ValueError(f"coefficient at {e} is beyond the certified order {self.prec}")
        k = e * self.N
        if k.denominator != 1:
            return Fraction(0)
        return self.terms.get(int(k), Fraction(0))

    __getitem__ = coefficient

    def valuation(self):
        if not self.terms:
            return None
        return Fraction(min(self.terms), self.N)

    def leading(self):
        """(exponent, coefficient) of the lowest term."""
        if not self.terms:
            raise ValueError("zero series has no leading term")
        k = min(self.terms)
        return Fraction(k, self.N), self.terms[k]

    def is_zero(self) -> bool:
        return not self.terms

    def ring(self) -> str:
        for v in self.terms.values():
            return ring_tag(v)
        return "rational"

    def with_N(self, N: int) -> "QExp":
        if N % self.N:
            raise ValueError("new N must be a multiple")
        f = N // self.N
        return QExp({k * f: v for k, v in self.terms.items()}, N, self.prec)

    def normalized(self) -> "QExp":
        """Smallest N compatible with the stored exponents and the precision."""
        g = 0
        for k in self.terms:
            g = math.gcd(g, k)
        g = math.gcd(g, self.N)
        if g == 0:
            g = self.N
        N = self.N // g
        return QExp({k // g: v for k, v in self.terms.items()}, N, self.prec)

    def truncate(self, prec) -> "QExp":
        prec = Fraction(prec)
        if self.prec is not None and prec > self.prec:
            raise ValueError(f"cannot extend precision from {self.prec} to {prec}")
        return QExp(self.terms, self.N, prec)

    def __eq__(self, other) -> bool:
        if not isinstance(other, QExp):
            if isinstance(other, (int, Fraction)):
                other = QExp.one(self.prec) * other
            else:
                return NotImplemented
        a, b = self.normalized(), other.normalized()
        return a.prec == b.prec and a.N == b.N and a.terms == b.terms

    def equal_to(self, other: "QExp", prec) -> bool:
        """Agreement of all coefficients with exponent < prec."""
        return self.truncate(prec) == other.truncate(prec)

    def value_equal(self, other: "QExp") -> bool:
        """Coefficientwise equality of complex values (for cyclotomic coefficients)."""
        d = self - other
        for v in d.terms.values():
            if isinstance(v, CycElem):
                if not v.is_zero_value():
                    return False
            elif not coeff_is_zero(v):
                return False
        return True

    def __hash__(self):
        a = self.normalized()
        return hash((a.N, a.prec, tuple(sorted(a.terms.items(), key=lambda t: t[0]))))

    def __repr__(self):
        body = " + ".join(f"({v})*q^{e}" for e, v in self.items()[:8])
        more = " + ..." if len(self.terms) > 8 else ""
        tail = f" + O(q^{self.prec})" if self.prec is not None else ""
        return f"QExp[{body}{more}{tail}]"

    # arithmetic

    @staticmethod
    def _align(a: "QExp", b: "QExp"):
        N = _lcm(a.N, b.N)
        return a.with_N(N), b.with_N(N), N

    def _coerce(self, other):
        if isinstance(other, QExp):
            return other
        return QExp({0: other}, 1, None)

    def __add__(self, other):
        o = self._coerce(other)
        a, b, N = QExp._align(self, o)
        t = dict(a.terms)
        for k, v in b.terms.items():
            t[k] = t[k] + v if k in t else v
        return QExp(t, N, _min_prec(a.prec, b.prec))

    __radd__ = __add__

    def __neg__(self):
        return QExp({k: -v for k, v in self.terms.items()}, self.N, self.prec)

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return (-self) + other

    def scale(self, c) -> "QExp":
        return QExp({k: v * c for k, v in self.terms.items()}, self.N, self.prec)

    def __mul__(self, other):
        if not isinstance(other, QExp):
            if isinstance(other, (int, Fraction, CycElem, GroupAlgebraElem)):
                return self.scale(other)
            return NotImplemented
        return series_mul(self, other)

    def __rmul__(self, other):
        if isinstance(other, (int, Fraction, CycElem, GroupAlgebraElem)):
            return QExp({k: other * v for k, v in self.terms.items()}, self.N, self.prec)
        return NotImplemented

    def __pow__(self, e: int):
        return series_pow(self, e)

    def invert(self, prec=None) -> "QExp":
        return series_invert(self, prec)

    def shift(self, e) -> "QExp":
        """Multiply by q^e."""
        e = Fraction(e)
        return self * QExp.monomial(e)

    def subs_q_power(self, d: int) -> "QExp":
        """q -> q^d (tau -> d tau)."""
        return QExp(
            {k * d: v for k, v in self.terms.items()}, self.N, None if self.prec is None else self.prec * d
        )

    def map_coeffs(self, f: Callable) -> "QExp":
        return QExp({k: f(v) for k, v in self.terms.items()}, self.N, self.prec)

    def evaluate(self, q_of: Callable[[Fraction], complex], coeff_value: Callable = None) -> complex:
        """Numerical value sum c_e * q_of(e)."""
        from .rings import coeff_to_complex

        cv = coeff_value or coeff_to_complex
        return sum(cv(v) * q_of(Fraction(k, self.N)) for k, v in self.terms.items())

    # interchange format

    def serialize(self, ring: Optional[str] = None) -> str:
        ring = ring or self.ring()
        T = "inf" if self.prec is None else format_fraction(self.prec)
        lines = [f"qexp N={self.N} T={T} ring={ring}"]
        for k in sorted(self.terms):
            e = Fraction(k, self.N)
            lines.append(f"{format_fraction(e)} : {serialize_coeff(self.terms[k])}")
        return "\n".join(lines) + "\n"

    @classmethod
    def parse(cls, text: str) -> "QExp":
        lines = [ln for ln in text.splitlines() if ln.strip()]
        if not lines or not lines[0].startswith("qexp "):
            raise ValueError("missing qexp header")
        head = dict(part.split("=", 1) for part in lines[0].split()[1:])
        N = int(head["N"])
        prec = None if head["T"] == "inf" else parse_fraction(head["T"])
        ring = head.get("ring", "rational")
        terms = {}
        for ln in lines[1:]:
            e, c = ln.split(" : ", 1)
            e = parse_fraction(e)
            k = e * N
            if k.denominator != 1:
                raise ValueError(f"exponent {e} incompatible with N={N}")
            coeff = parse_coeff(c)
            _check_ring(coeff, ring)
            terms[int(k)] = coeff
        out = cls(terms, N, prec)
        if out.terms != terms:
            raise ValueError("series file holds zero or out-of-range terms")
        return out


def _check_ring(c, ring: str):
    tag = ring_tag(c)
    if tag != ring:
        raise ValueError(f"coefficient ring {tag} does not match header ring {ring}")


def series_mul(a: QExp, b: QExp) -> QExp:
    """Cauchy product with pessimistic truncation bookkeeping."""
    a, b, N = QExp._align(a, b)
    if not a.terms or not b.terms:
        prec = _min_prec(
            None if a.prec is None else a.prec + (b.valuation() or 0),
            None if b.prec is None else b.prec + (a.valuation() or 0),
        )
        if prec is None:
            prec = _min_prec(a.prec, b.prec)
        return QExp({}, N, prec)
    va, vb = min(a.terms), min(b.terms)
    limits = []
    if a.prec is not None:
        limits.append(a.prec * N + vb)
    if b.prec is not None:
        limits.append(b.prec * N + va)
    kmax = min(limits) if limits else None
    out: Dict[int, object] = {}
    bt = sorted(b.terms.items())
    for i, x in a.terms.items():
        for j, y in bt:
            k = i + j
            if kmax is not None and k >= kmax:
                break
            p = x * y
            out[k] = out[k] + p if k in out else p
    prec = None if kmax is None else Fraction(kmax, N)
    return QExp(out, N, prec)


def _split_leading(a: QExp):
    if not a.terms:
        raise ZeroDivisionError("zero series")
    v = min(a.terms)
    return v, a.terms[v]


def series_invert(a: QExp, prec=None) -> QExp:
    """1/a for a series whose leading coefficient is a unit; prec optionally caps the result."""
    if a.prec is None and prec is None:
        raise ValueError("inverting an exact series needs an explicit precision")
    v, c = _split_leading(a)
    cinv = _scalar_inverse(c)
    N = a.N
    rel = None if a.prec is None else a.prec * N - v  # relative precision in steps
    out_prec = None if rel is None else Fraction(-v + rel, N)
    if prec is not None:
        prec = Fraction(prec)
        out_prec = prec if out_prec is None else min(out_prec, prec)
    steps = int(math.ceil(out_prec * N)) + v  # number of relative steps
    h = {k - v: cinv * x for k, x in a.terms.items() if k != v}
    b = [None] * max(steps, 0)
    for m in range(len(b)):
        if m == 0:
            b[0] = Fraction(1)
            continue
        acc = None
        for j, hj in h.items():
            if j > m:
                continue
            if b[m - j] is None:
                continue
            t = hj * b[m - j]
            acc = t if acc is None else acc + t
        b[m] = Fraction(0) if acc is None else -acc
    terms = {m - v: cinv * bm for m, bm in enumerate(b) if bm is not None}
    return QExp(terms, N, out_prec)


def _is_scalar_unit(c) -> bool:
    if isinstance(c, (int, Fraction)):
        return c != 0
    if isinstance(c, CycElem):
        return not c.is_zero_value()
    if isinstance(c, GroupAlgebraElem):
        return c.is_unit()
    return False


def series_pow(a: QExp, e: int) -> QExp:
    """a^e; Miller's recurrence when the leading coefficient is a unit, else binary powering."""
    e = int(e)
    if e == 0:
        return QExp.one(None if a.prec is None else a.prec - (a.valuation() or 0))
    if e < 0:
        return series_pow(series_invert(a), -e)
    if e == 1:
        return a
    if not a.terms:
        return a
    v, c = _split_leading(a)
    if len(a.terms) == 1:
        prec = None if a.prec is None else Fraction(e * v, a.N) + (a.prec - Fraction(v, a.N))
        return QExp({e * v: c ** e}, a.N, prec)
    if a.prec is None or not _is_scalar_unit(c):
        result = None
        base = a
        while e:
            if e & 1:
                result = base if result is None else result * base
            e >>= 1
            if e:
                base = base * base
        return result
    N = a.N
    rel = int(a.prec * N) - v if (a.prec * N).denominator == 1 else math.ceil(a.prec * N) - v
    cinv = _scalar_inverse(c)
    h = {k - v: cinv * x for k, x in a.terms.items() if k != v}
    b = [Fraction(1)] + [None] * (rel - 1)
    for m in range(1, rel):
        acc = None
        for j, hj in h.items():
            if j > m:
                continue
            w = (e + 1) * j - m
            if w == 0:
                continue
            t = hj * b[m - j] * w
            acc = t if acc is None else acc + t
        b[m] = Fraction(0) if acc is None else acc * Fraction(1, m)
    ce = c ** e
    terms = {m + e * v: ce * bm for m, bm in enumerate(b)}
    return QExp(terms, N, Fraction(e * v + rel, N))


# standard building blocks

def sigma1(m) -> Fraction:
    """Divisor sum with sigma1(0) = -1/24 and 0 off the non-negative integers."""
    m = Fraction(m)
    if m.denominator != 1 or m < 0:
        return Fraction(0)
    m = int(m)
    if m == 0:
        return Fraction(-1, 24)
    return Fraction(_sigma(m, 1))


@lru_cache(maxsize=4096)
def _sigma(m: int, k: int) -> int:
    s = 0
    d = 1
    while d * d <= m:
        if m % d == 0:
            s += d ** k
            e = m // d
            if e != d:
                s += e ** k
        d += 1
    return s


def sigma(m: int, k: int) -> int:
    return _sigma(int(m), int(k))


def euler_product(order: int) -> QExp:
    """prod_{n>=1} (1 - q^n) to q^order, via the pentagonal number theorem."""
    terms = {}
    k = 0
    while True:
        done = True
        for kk in ((k,) if k == 0 else (k, -k)):
            g = kk * (3 * kk - 1) // 2
            if g < order:
                terms[g] = Fraction(-1 if kk % 2 else 1)
                done = False
        if done and k > 0:
            break
        k += 1
    return QExp(terms, 1, order)


def eta(order: int) -> QExp:
    """q^(1/24) prod (1-q^n), certified for exponents < 1/24 + order."""
    if order < 1:
        raise ValueError("order must be >= 1")
    return euler_product(order).shift(Fraction(1, 24))


def eta_power(e: int, order: int) -> QExp:
    """eta^e with relative order `order`, computed as q^(e/24) (prod)^e."""
    return (euler_product(order) ** e).shift(Fraction(e, 24))


def e2_series(order: int) -> QExp:
    if order < 1:
        raise ValueError("order must be >= 1")
    return QExp({m: -24 * sigma1(m) for m in range(order)}, 1, order)


def theta_operator(g: QExp, k) -> QExp:
    """D(g) = q dg/dq - (k/12) g E2 for g with integer exponents."""
    g = g.normalized()
    if g.N != 1:
        raise ValueError("theta operator needs integer exponents")
    if g.prec is None:
        raise ValueError("theta operator needs a truncated series")
    order = int(math.ceil(g.prec))
    deriv = QExp({m: c * m for m, c in g.terms.items()}, 1, g.prec)
    return deriv - (g * e2_series(max(order - (g.valuation() or 0), 1))).scale(Fraction(k) / 12)
