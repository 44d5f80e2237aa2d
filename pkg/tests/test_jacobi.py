import cmath
import math
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from unitary_borcherds.jacobi import (
    negate_elliptic,
    specialize_torsion,
    theta_at_torsion,
    theta_block,
    theta_block_sum,
    theta_numeric,
    theta_shift_check,
    theta_torsion_power,
    theta_transform_numeric,
)
from unitary_borcherds.rings import CycElem, GroupAlgebraElem

ORDER = 6


def mono(e2, c=1):
    return GroupAlgebraElem.monomial((e2,), c)


@pytest.fixture(scope="module")
def theta():
    return theta_block(ORDER)


def test_leading_term(theta):
    e, c = theta.leading()
    assert e == Fraction(1, 12)
    assert c == mono(1) - mono(-1)


def test_first_correction(theta):
    # (zeta^1/2 - zeta^-1/2)(-zeta - zeta^-1), the q^1 term of the product form
    expected = (mono(1) - mono(-1)) * (-mono(2) - mono(-2))
    assert theta.coefficient(Fraction(13, 12)) == expected
    assert expected == mono(-3) - mono(-1) + mono(1) - mono(3)


def test_vanishes_at_zeta_one(theta):
    for _, c in theta.items():
        assert sum(c.terms.values()) == 0


def test_oddness(theta):
    assert negate_elliptic(theta) == theta.scale(-1)


def test_sum_and_product_forms_agree(theta):
    assert theta_block_sum(ORDER).equal_to(theta, Fraction(1, 12) + ORDER)


def test_torsion_leading_coefficient():
    lead = theta_at_torsion(1, 3, 4).leading()[1]
    assert lead == CycElem.root(12, 2) - CycElem.root(12, 10)
    assert abs(lead.to_complex() - 2j * math.sin(math.pi / 3)) < 1e-12


@pytest.mark.parametrize("D", [3, 7])
def test_torsion_conjugate_pairs(D):
    for b in range(1, D):
        t1 = theta_at_torsion(b, D, ORDER)
        t2 = theta_at_torsion(D - b, D, ORDER)
        # Theta(1 - x) = Theta(x) and Theta(-x) = -Theta(x): conjugation flips the sign
        for (e1, c1), (e2, c2) in zip(t1.items(), t2.items()):
            assert e1 == e2 and c1.conj().value_eq(-c2)
        for _, c in (t1 * t2).items():
            assert c.conj().value_eq(c)


@pytest.mark.parametrize("D,b", [(3, 1), (3, 2), (7, 3)])
def test_specialization_matches_torsion(theta, D, b):
    direct = theta_at_torsion(b, D, ORDER)
    special = specialize_torsion(theta, b, D)
    assert special.equal_to(direct, Fraction(1, 12) + ORDER)


def test_torsion_power_matches_repeated_product():
    t = theta_at_torsion(1, 3, 4)
    p = theta_torsion_power(1, 3, 3, 4)
    cube = t * t * t
    for e in p.exponents():
        if e < cube.prec:
            assert p.coefficient(e).value_eq(cube.coefficient(e))


def test_series_against_numeric(theta):
    tau, z = 1.3j + 0.2, 0.17 + 0.05j
    # term by term with zeta^(1/2) = exp(pi i z)
    total = sum(
        cmath.exp(2j * math.pi * tau * float(e)) * sum(float(cf) * cmath.exp(1j * math.pi * z * k[0]) for k, cf in c.terms.items())
        for e, c in theta.items()
    )
    assert abs(total - theta_numeric(tau, z)) < 1e-4


def test_shift_identity():
    assert theta_shift_check(1, 5)
    assert theta_shift_check(2, 6)
    assert theta_shift_check(3, 5)


def test_transformation_law_numeric():
    assert theta_transform_numeric(2j, 0.3 + 0.1j, 0, 0) == 0
    assert theta_transform_numeric(2j, 0.3 + 0.1j, 1, 0) < 1e-9
    assert theta_transform_numeric(1j, 0.25, 0, 1) < 1e-9


@settings(max_examples=20, deadline=None)
@given(st.integers(-2, 2), st.integers(-3, 3), st.floats(-0.5, 0.5), st.floats(-0.2, 0.2))
def test_transformation_law_random(a, b, x, y):
    assert theta_transform_numeric(1.1j + 0.3, complex(x, y), a, b) < 1e-8
