from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from unitary_borcherds.hermlat import HermLattice
from unitary_borcherds.qseries import (
    QExp,
    e2_series,
    eta,
    eta_power,
    series_invert,
    sigma1,
    theta_operator,
)


def _naive_product(power, order):
    """prod_{n>=1} (1 - q^n)^power by repeated multiplication of coefficient lists."""
    c = [0] * order
    c[0] = 1
    for n in range(1, order):
        for _ in range(power):
            c = [c[m] - (c[m - n] if m >= n else 0) for m in range(order)]
    return c


def test_fractional_exponents():
    s = QExp.monomial(Fraction(1, 2)) * QExp.monomial(Fraction(1, 3))
    assert s.items() == [(Fraction(5, 6), 1)]
    assert s.normalized().N == 6


def test_identity():
    a = QExp.from_list([1, 2, 3, 4])
    assert a * QExp.one() == a


def test_eta_squared_against_product():
    e2 = eta(10) * eta(10)
    expected = _naive_product(2, 10)
    for m in range(10):
        assert e2.coefficient(Fraction(1, 12) + m) == expected[m]


def test_invert_geometric():
    inv = series_invert(QExp.from_list([1, -1], prec=12))
    assert [inv.coefficient(m) for m in range(12)] == [1] * 12


def test_eta_inverse():
    e = eta(12)
    assert (e * e.invert()).truncate(Fraction(1, 1)).value_equal(QExp.one(1))
    prod = e * e.invert()
    assert prod.items() == [(0, 1)]
    assert (e.invert() ** 24).leading() == (-1, 1)


def test_eta_coefficients():
    e = eta(4)
    assert e.leading() == (Fraction(1, 24), 1)
    assert e.coefficient(Fraction(1, 24) + 1) == -1
    d = eta_power(24, 4)
    assert d.coefficient(1) == 1 and d.coefficient(2) == -24
    assert [d.coefficient(m + 1) for m in range(3)] == _naive_product(24, 3)


def test_sigma1():
    assert sigma1(0) == Fraction(-1, 24)
    assert sigma1(6) == 12
    assert sigma1(Fraction(1, 2)) == 0
    assert sigma1(-3) == 0


def test_e2():
    e = e2_series(5)
    assert [e.coefficient(m) for m in range(3)] == [1, -24, -72]


def test_theta_operator_constant():
    assert theta_operator(QExp.one(5), 0).is_zero()


def test_theta_operator_on_theta_series():
    """D(Theta) for the D=3 rank-1 lattice: b(m) = m R(m) + 2 * rank * sum_x sigma_1(m - Q(x))."""
    order = 6
    L = HermLattice.diagonal(3, [1])
    R = L.representation_numbers(order)
    D_th = theta_operator(L.theta_series(order), 1)
    for m in range(order):
        b = m * R[m] + 2 * sum(R[j] * sigma1(m - j) for j in range(m + 1))
        assert D_th.coefficient(m) == b


coef = st.integers(-5, 5)
series = st.lists(coef, min_size=1, max_size=8).map(lambda c: QExp.from_list(c, prec=8))


@settings(max_examples=40, deadline=None)
@given(series, series, series)
def test_ring_laws(a, b, c):
    assert (a * b) * c == a * (b * c)
    assert a * b == b * a
    assert a * (b + c) == a * b + a * c


@settings(max_examples=40, deadline=None)
@given(st.lists(coef, min_size=8, max_size=8), st.lists(coef, min_size=8, max_size=8), st.integers(2, 7))
def test_truncation_soundness(a, b, low):
    """Products at high precision, truncated, equal products of truncations."""
    A, B = QExp.from_list(a), QExp.from_list(b)
    assert (A * B).equal_to(A.truncate(low) * B.truncate(low), low)


@settings(max_examples=30, deadline=None)
@given(st.lists(coef, min_size=6, max_size=6), st.integers(1, 4))
def test_invert_is_inverse(tail, e):
    a = QExp.from_list([1] + tail)
    assert (a * a.invert()) == QExp.one(a.prec)
    assert (a ** e) * (a.invert() ** e) == QExp.one(a.prec)


def test_serialize_roundtrip():
    s = eta_power(-3, 6)
    assert QExp.parse(s.serialize()) == s
    assert QExp.parse(s.serialize()).serialize() == s.serialize()


def test_beyond_precision_raises():
    with pytest.raises(ValueError):
        QExp.from_list([1, 2]).coefficient(5)
