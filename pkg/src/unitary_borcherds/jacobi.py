"""The Jacobi theta block Theta(tau, z) = q^(1/12) (zeta^(1/2) - zeta^(-1/2)) prod (1 - zeta q^n)(1 - zeta^-1 q^n),
its torsion specializations and the theta_d^24 shift identity."""
from __future__ import annotations

import cmath
import math
from fractions import Fraction
from typing import Sequence, Tuple

from .qseries import QExp, eta, series_pow
from .rings import CycElem, GroupAlgebraElem


def _ga(exps2: Sequence[int], c=1) -> GroupAlgebraElem:
    return GroupAlgebraElem.monomial(tuple(exps2), c)


def elliptic_binomial(x2: Sequence[int]) -> GroupAlgebraElem:
    """zeta^(x/2) - zeta^(-x/2) for a doubled exponent vector x2 (i.e. zeta^x has doubled exponents 2*x2)."""
    return _ga(x2) - _ga([-a for a in x2])


def theta_unit_part(order: int, x2: Sequence[int] = (1,)) -> QExp:
    """prod_{n=1}^{order} (1 - zeta^x q^n)(1 - zeta^-x q^n) truncated below q^order.

    Here zeta^x is the monomial with doubled exponent vector 2*x2.
    """
    r = len(x2)
    one = GroupAlgebraElem.scalar(r, 1)
    up = tuple(2 * a for a in x2)
    dn = tuple(-2 * a for a in x2)
    prod = QExp({0: one}, 1, order)
    for n in range(1, order):
        f1 = QExp({0: one, n: -_ga(up)}, 1, None)
        f2 = QExp({0: one, n: -_ga(dn)}, 1, None)
        prod = prod * f1 * f2
    return prod


def theta_block(order: int) -> QExp:
    """Theta(tau, z) certified for exponents < 1/12 + order (N = 12, rank-1 elliptic coefficients)."""
    if order < 1:
        raise ValueError("order must be >= 1")
    return theta_general((1,), order)


def theta_general(x2: Sequence[int], order: int) -> QExp:
    """Theta(tau, <w0, x>) as a formal series: zeta^(1/2) -> monomial with doubled exponents x2."""
    lead = elliptic_binomial(x2)
    return (theta_unit_part(order, x2) * lead).shift(Fraction(1, 12))


def theta_power(x2: Sequence[int], e: int, order: int) -> Tuple[GroupAlgebraElem, QExp]:
    """Theta(tau, <w0,x>)^e split as (elliptic prefactor, q^(e/12) * unit series^e).

    The prefactor (zeta^(x/2) - zeta^(-x/2))^e is returned as a group algebra element only
    for e >= 0; for e < 0 it is not a Laurent polynomial and None is returned.
    """
    unit = series_pow(theta_unit_part(order, x2), e).shift(Fraction(e, 12))
    lead = elliptic_binomial(x2) ** e if e >= 0 else None
    return lead, unit


def theta_block_power(e: int, order: int, d: int = 1) -> QExp:
    """Theta(tau, d z)^e for e >= 0 via the factored expansion."""
    if e < 0:
        raise ValueError("negative powers of Theta are not Laurent polynomials in zeta")
    lead, unit = theta_power((d,), e, order)
    return unit * lead


def theta_at_torsion(b: int, D: int, order: int) -> QExp:
    """Theta(tau, b/D) over Q[X]/(X^(4D)-1); zeta^(1/2) -> X^(2b)."""
    if b % D == 0:
        raise ValueError("Theta vanishes identically at b = 0 mod D")
    m = 4 * D
    one = CycElem.one(m)
    prod = QExp({0: one}, 1, order)
    for n in range(1, order):
        f1 = QExp({0: one, n: -CycElem.root(m, 4 * b)}, 1, None)
        f2 = QExp({0: one, n: -CycElem.root(m, -4 * b)}, 1, None)
        prod = prod * f1 * f2
    lead = CycElem.root(m, 2 * b) - CycElem.root(m, -2 * b)
    return (prod * lead).shift(Fraction(1, 12))


def theta_torsion_power(b: int, D: int, e: int, order: int) -> QExp:
    """Theta(tau, b/D)^e for any integer e (leading coefficient is invertible by value)."""
    m = 4 * D
    one = CycElem.one(m)
    prod = QExp({0: one}, 1, order)
    for n in range(1, order):
        f1 = QExp({0: one, n: -CycElem.root(m, 4 * b)}, 1, None)
        f2 = QExp({0: one, n: -CycElem.root(m, -4 * b)}, 1, None)
        prod = prod * f1 * f2
    lead = CycElem.root(m, 2 * b) - CycElem.root(m, -2 * b)
    prod = prod.map_coeffs(lambda c: c.reduce())
    unit = series_pow(prod, e).map_coeffs(lambda c: c.reduce())
    return (unit * _pow_reduced(lead, e)).shift(Fraction(e, 12))


def _pow_reduced(a: CycElem, e: int) -> CycElem:
    """a^e by binary powering, reducing modulo the cyclotomic polynomial at every step."""
    if e < 0:
        a, e = a.inverse(), -e
    result = CycElem.one(a.order)
    base = a.reduce()
    while e:
        if e & 1:
            result = (result * base).reduce()
        e >>= 1
        if e:
            base = (base * base).reduce()
    return result


def negate_elliptic(s: QExp) -> QExp:
    """z -> -z on a series with group algebra coefficients."""
    return s.map_coeffs(lambda c: c.map_exponents(lambda k: tuple(-a for a in k)))


def scale_elliptic(s: QExp, d: int) -> QExp:
    """z -> d z."""
    return s.map_coeffs(lambda c: c.scale_exponents(d))


def specialize_torsion(s: QExp, b: int, D: int) -> QExp:
    """zeta -> exp(2 pi i b/D) on a rank-1 series, zeta^(1/2) -> X^(2b) in order 4D."""
    return s.map_coeffs(lambda c: c.specialize_torsion([2 * b], 4 * D))


def theta_block_sum(order: int) -> QExp:
    """Theta via the triple-product sum: sum_n (-1)^n q^((n+1/2)^2/2) zeta^(n+1/2) / eta."""
    prec = Fraction(1, 12) + order
    num = {}
    n = 0
    while True:
        added = False
        for m in (n, -n - 1):
            e = Fraction((2 * m + 1) ** 2, 8)
            if e - Fraction(1, 24) < prec:
                t = _ga((2 * m + 1,), -1 if m % 2 else 1)
                num[e] = num[e] + t if e in num else t
                added = True
        if not added:
            break
        n += 1
    theta1 = QExp.from_exponents(num, prec + Fraction(1, 24))
    return theta1 * eta(order + 1).invert(prec=-Fraction(1, 24) + order + 1)


def _shift_products(d: int, order: int, shift_exps: int) -> QExp:
    """prod_{n>=0} (1 - q^n zeta^s) prod_{n>0} (1 - q^n zeta^-s) truncated, s = shift_exps."""
    one = GroupAlgebraElem.scalar(1, 1)
    up, dn = (2 * shift_exps,), (-2 * shift_exps,)
    prod = QExp({0: one - _ga(up)}, 1, order)
    for n in range(1, order):
        prod = prod * QExp({0: one, n: -_ga(up)}, 1, None) * QExp({0: one, n: -_ga(dn)}, 1, None)
    return prod


def theta_shift_check(d: int, order: int) -> bool:
    """Exact check of Theta(z)^(24 d^2) / Theta(d z)^24 = q^(2(d^2-1)) zeta^(-12 d(d-1)) (G_1^(d^2) / G_d)^24,
    with G_s = prod_{n>=0} (1 - q^n zeta^s) prod_{n>0} (1 - q^n zeta^-s).

    Both sides are multiplied through by Theta(dz)^24 G_d^24 so that every factor is a
    Laurent polynomial in zeta^(1/2) at each q-power. The left side raises the
    triple-product sum form of Theta by binary powering; the right side uses the product form.
    """
    if d < 1:
        raise ValueError("d must be >= 1")
    if order < 5:
        raise ValueError("need order >= 5 for a meaningful comparison")
    lhs = (theta_block_sum(order) ** (24 * d * d)) * (_shift_products(d, order, d) ** 24)
    g1 = _shift_products(1, order, 1)
    rhs = (g1 ** (24 * d * d)) * theta_block_power(24, order, d)
    rhs = rhs.shift(2 * (d * d - 1)) * GroupAlgebraElem.monomial((-24 * d * (d - 1),))
    prec = min(lhs.prec, rhs.prec)
    lead = lhs.valuation()
    if lead is None or prec - lead < 5:
        raise ValueError("insufficient certified order")
    return lhs.equal_to(rhs, prec)


# numerical evaluation

def theta_numeric(tau: complex, z: complex, terms: int = 60) -> complex:
    """Theta(tau, z) by the truncated product."""
    if tau.imag <= 0:
        raise ValueError("tau must lie in the upper half plane")
    q = cmath.exp(2j * math.pi * tau)
    zeta = cmath.exp(2j * math.pi * z)
    val = cmath.exp(2j * math.pi * tau / 12) * (cmath.exp(1j * math.pi * z) - cmath.exp(-1j * math.pi * z))
    qn = 1
    for _ in range(terms):
        qn *= q
        val *= (1 - zeta * qn) * (1 - qn / zeta)
    return val


def log_theta_numeric(tau: complex, z: complex, terms: int = 25) -> complex:
    """A branch of log Theta(tau, z) by the truncated product (valid mod 2 pi i)."""
    q = cmath.exp(2j * math.pi * tau)
    zeta = cmath.exp(2j * math.pi * z)
    val = 2j * math.pi * tau / 12 + cmath.log(cmath.exp(1j * math.pi * z) - cmath.exp(-1j * math.pi * z))
    qn = 1
    for _ in range(terms):
        qn *= q
        val += cmath.log(1 - zeta * qn) + cmath.log(1 - qn / zeta)
    return val


def theta_transform_numeric(tau: complex, z: complex, a: int, b: int, terms: int = 60) -> float:
    """Residual of the index-1 law for Theta^2:
    Theta^2(tau, z + a tau + b) exp(2 pi i (a^2 tau + 2 a z)) = Theta^2(tau, z), scaled by max(1, |rhs|)."""
    if tau.imag <= 0:
        raise ValueError("tau must lie in the upper half plane")
    lhs = theta_numeric(tau, z + a * tau + b, terms) ** 2 * cmath.exp(2j * math.pi * (a * a * tau + 2 * a * z))
    rhs = theta_numeric(tau, z, terms) ** 2
    return abs(lhs - rhs) / max(1.0, abs(rhs))
