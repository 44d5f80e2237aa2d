import cmath
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from unitary_borcherds.rings import (
    CycElem,
    EllipticMonomial,
    FourthRoot,
    GroupAlgebraElem,
    format_fraction,
    parse_coeff,
    parse_fraction,
    serialize_coeff,
)

ORDER = 12
fractions = st.builds(Fraction, st.integers(-20, 20), st.integers(1, 6))
cyc = st.lists(fractions, min_size=ORDER, max_size=ORDER).map(lambda c: CycElem(ORDER, c))


def test_i_squared():
    i = CycElem.root(ORDER, 3)
    assert i * i == CycElem.root(ORDER, 6)
    assert (i * i).rational_value() == -1


def test_identity():
    a = CycElem(ORDER, range(ORDER))
    assert a * 1 == a
    assert a * CycElem.one(ORDER) == a


def test_embedding_values():
    assert abs(CycElem.root(ORDER, 3).to_complex() - 1j) < 1e-12
    assert abs(CycElem.root(ORDER, 0).to_complex(5) - 1) < 1e-12
    assert abs(CycElem.root(ORDER, 6).to_complex() + 1) < 1e-12
    assert abs(CycElem.root(ORDER, 4).to_complex(1) - cmath.exp(2j * cmath.pi / 3)) < 1e-12


def test_rational_value():
    assert CycElem.scalar(ORDER, Fraction(5, 2)).rational_value() == Fraction(5, 2)
    assert CycElem.root(ORDER, 3).rational_value() is None
    assert CycElem.root(ORDER, 6).rational_value() == -1
    # 1 + X^4 + X^8 vanishes at a primitive 12th root of unity
    s = CycElem.root(ORDER, 0) + CycElem.root(ORDER, 4) + CycElem.root(ORDER, 8)
    assert not s.is_zero() and s.is_zero_value()


def test_inverse():
    a = CycElem.root(ORDER, 0) + CycElem.root(ORDER, 1, 2)
    assert (a * a.inverse()).value_eq(CycElem.one(ORDER))


@settings(max_examples=40, deadline=None)
@given(cyc, cyc, cyc)
def test_ring_axioms(a, b, c):
    assert (a * b) * c == a * (b * c)
    assert a * (b + c) == a * b + a * c
    assert a * b == b * a


@settings(max_examples=40, deadline=None)
@given(cyc, cyc, st.sampled_from([1, 5, 7, 11]))
def test_embedding_is_multiplicative(a, b, j):
    lhs = (a * b).to_complex(j)
    rhs = a.to_complex(j) * b.to_complex(j)
    assert abs(lhs - rhs) <= 1e-10 * max(1.0, abs(rhs))


@given(st.lists(st.integers(-9, 9), min_size=1, max_size=3))
def test_elliptic_halving_roundtrip(exps2):
    m = EllipticMonomial(exps2)
    again = EllipticMonomial.from_exponents(m.exponents)
    assert again == m
    assert (m * m).exponents == tuple(2 * e for e in m.exponents)


def test_elliptic_rejects_quarter():
    with pytest.raises(ValueError):
        EllipticMonomial.from_exponents([Fraction(1, 4)])


def test_fourth_roots():
    i = FourthRoot(1)
    assert i * i == FourthRoot(2)
    assert i ** 4 == FourthRoot(0)
    assert repr(i.inverse()) == "-i"
    assert i.to_cyc(12) == CycElem.root(12, 3)


def test_group_algebra_specialize():
    # zeta^(1/2) - zeta^(-1/2) at zeta = exp(2 pi i / 3)
    g = GroupAlgebraElem.monomial((1,)) - GroupAlgebraElem.monomial((-1,))
    v = g.specialize_torsion([2], 12)
    assert abs(v.to_complex() - 2j * cmath.sin(cmath.pi / 3)) < 1e-12


@given(fractions)
def test_fraction_format_roundtrip(x):
    assert parse_fraction(format_fraction(x)) == x


@settings(max_examples=25, deadline=None)
@given(cyc)
def test_coeff_roundtrip(a):
    assert parse_coeff(serialize_coeff(a)) == a
    g = GroupAlgebraElem.monomial((3, -1), a) + GroupAlgebraElem.monomial((1, 1), 2)
    assert parse_coeff(serialize_coeff(g)) == g
