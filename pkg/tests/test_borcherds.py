from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from unitary_borcherds.arith_local import weil_index_table
from unitary_borcherds.borcherds import (
    BoundaryData,
    b_kra_coeff,
    check_product_scaling,
    divisor_report,
    fj_index_I,
    fj_transform_check,
    leading_fj,
    mult_phi,
    p2_factor,
    quad_identity_sides,
    weyl_correction,
)
from unitary_borcherds.hermlat import HermLattice
from unitary_borcherds.modforms import eisenstein_Er
from unitary_borcherds.qseries import QExp
from unitary_borcherds.rings import CycElem, parse_fraction
from unitary_borcherds.weakforms import CuspConstants, PrincipalPart, cusp_constants, scaled_cusp


@pytest.fixture(scope="module")
def d3():
    """D = 3, n = 3, L_0 = O_k with c(-1) = 1, c(0) = 9."""
    L0 = HermLattice.diagonal(3, [1])
    bd = BoundaryData.standard(L0, 3)
    Er = eisenstein_Er(3, 3, 12)
    c = PrincipalPart((9, 1))
    cc = cusp_constants(c, Er, weil_index_table(3, 3, {3: -1}))
    return bd, c, cc


def zero_cusp(D):
    return CuspConstants(D, {1: Fraction(0), D: Fraction(0)}, {}, {1: Fraction(0), D: Fraction(0)}, Fraction(0))


def test_mult_examples():
    L1 = HermLattice.diagonal(3, [1])
    L2 = HermLattice.diagonal(3, [1, 1])
    assert mult_phi(L1, 3, PrincipalPart((0, 0, 0))) == (0, True)
    assert mult_phi(L1, 3, PrincipalPart((9, 1))) == (6, True)
    assert mult_phi(L2, 4, PrincipalPart((0, 1))) == (6, True)
    with pytest.raises(ValueError):
        mult_phi(L2, 3, PrincipalPart((0, 1)))


def test_b_kra_sums_to_mult():
    L = HermLattice.diagonal(3, [1, 1])
    c = PrincipalPart((0, 2, -1, 5))
    total = sum(b_kra_coeff(m, L, 4) * x for m, x in c.poles())
    assert total == mult_phi(L, 4, c)[0]
    # R(1) = 12, R(2) = 36, R(3) = 12 for O_k^2 with D = 3
    assert [b_kra_coeff(m, L, 4) for m in (1, 2, 3)] == [6, 36, 18]
    with pytest.raises(ValueError):
        b_kra_coeff(0, L, 4)


@settings(max_examples=30, deadline=None)
@given(st.lists(st.integers(-6, 6), min_size=3, max_size=3),
       st.lists(st.builds(Fraction, st.integers(-5, 5), st.integers(1, 4)), min_size=4, max_size=4))
def test_quadratic_identity_on_unit_lattice(cs, u):
    L = HermLattice.diagonal(3, [1, 1])
    lhs, rhs = quad_identity_sides(L, PrincipalPart((0, *cs)), u)
    assert lhs == rhs


def test_quadratic_identity_trivial_cases():
    L = HermLattice.diagonal(7, [1])
    assert quad_identity_sides(L, PrincipalPart((0, 0)), [1, 2]) == (0, 0)
    assert quad_identity_sides(L, PrincipalPart((0, 3, 1)), [0, 0]) == (0, 0)
    with pytest.raises(ValueError):
        quad_identity_sides(L, PrincipalPart((0, 1)), [1])


def test_quadratic_identity_detects_anisotropic_shells():
    # the norm-1 shell of diag(1, 2) lies in the first coordinate only
    L = HermLattice.diagonal(3, [1, 2])
    lhs, rhs = quad_identity_sides(L, PrincipalPart((0, 1)), [1, 0, 0, 0])
    assert lhs != rhs


def test_index_of_zero_is_zero(d3):
    bd, _, _ = d3
    assert fj_index_I(bd.L0, 3, PrincipalPart((0, 0)), zero_cusp(3), bd.full) == 0


@pytest.mark.parametrize("name", ["d3_n3", "d3_n4", "d7_n3"])
def test_index_equals_mult_on_corpus(instances, name):
    inst = instances[name]
    for c in inst.principal_parts:
        I = fj_index_I(inst.L0, inst.n, c, inst.cusp(c), inst.full)
        m, integral = mult_phi(inst.L0, inst.n, c)
        assert integral and I == m


def test_leading_fj_exponents(d3):
    bd, c, cc = d3
    fj = leading_fj(bd, c * 24, scaled_cusp(cc, 24), 2)
    assert fj.k == 864
    assert fj.exponents["eta"] == 72
    # six norm-one vectors, each Theta^24 starting at q^2
    assert fj.exponents["hor"] == 12 and len(fj.P_hor) == 6
    assert fj.raw_exponent == 192
    assert fj.weyl_correction == weyl_correction(bd.L0, c * 24) == 48
    assert fj.index == 144 == mult_phi(bd.L0, 3, c * 24)[0]
    assert fj.expand(2).valuation() == fj.raw_exponent


def test_leading_fj_trivial():
    L0 = HermLattice.diagonal(3, [1])
    bd = BoundaryData.standard(L0, 3)
    fj = leading_fj(bd, PrincipalPart((0, 0)), zero_cusp(3), 4)
    assert fj.k == 0 and fj.P_hor == [] and fj.index == 0
    assert fj.P_eta.coefficient(0) == 1 and all(fj.P_eta.coefficient(m) == 0 for m in range(1, 4))
    assert fj.P_vert.leading()[0] == 0 and fj.P_vert.leading()[1].rational_value() == 1


def test_leading_fj_requires_scaling(d3):
    bd, c, cc = d3
    with pytest.raises(ValueError):
        check_product_scaling(c, cc)
    with pytest.raises(ValueError):
        leading_fj(bd, c, cc, 2)
    with pytest.raises(ValueError):
        leading_fj(bd, c * 24, scaled_cusp(cc, 24), 0)


def test_fj_transform_zero_shift(d3):
    bd, c, _ = d3
    w0 = [complex(0.13, 0.04)]
    assert fj_transform_check(bd, c, 6, w0, [(0, 0)]) < 1e-14


@pytest.mark.parametrize("beta", [[(1, 0)], [(0, 1)], [(1, -2)], [(-1, 1)]])
def test_fj_transform_law(d3, beta):
    bd, c, _ = d3
    I = mult_phi(bd.L0, 3, c)[0]
    w0 = [complex(0.21, -0.07)]
    r25 = fj_transform_check(bd, c, I, w0, beta, 25)
    r50 = fj_transform_check(bd, c, I, w0, beta, 50)
    assert r25 < 1e-8
    assert r50 <= r25 + 1e-12
    # a wrong index breaks the law for a shift with nonzero tau part
    if beta[0][0]:
        assert fj_transform_check(bd, c, I + 1, w0, beta, 25) > 1e-3


def test_boundary_data_validates():
    bd = BoundaryData.standard(HermLattice.diagonal(7, [1]), 3)
    assert abs(2 * bd.tau.imag - 7 ** 0.5 / 7) < 1e-12
    p, q = bd.coords_in_b(bd.tau_b)
    assert (p, q) == (1, 0)


def test_p2_trivial_orders(d3):
    bd, c, cc = d3
    assert p2_factor(bd, c, cc, {}, 0, 2).is_zero()
    one = p2_factor(bd, c, cc, {}, 1, 2)
    assert sorted(one.exponents()) == [0]
    inner = one.coefficient(0)
    assert sorted(inner.exponents()) == [0]


def test_p2_constant_term_is_one(d3):
    bd, c, cc = d3
    mi = CycElem.root(12, -3)
    table = {1: QExp({m: Fraction(1) for m in range(40)}, 1, 40), 3: QExp({m: mi for m in range(40)}, 1, 40)}
    p2 = p2_factor(bd, c, cc, table, 2, 2)
    lead = p2.coefficient(0)
    assert sorted(lead.exponents()) == [0]
    assert 1 in p2.exponents()


def test_p2_needs_full_table(d3):
    bd, c, cc = d3
    with pytest.raises(ValueError):
        p2_factor(bd, c, cc, None, 2, 2)


def test_divisor_report_zero():
    L = HermLattice.diagonal(3, [1, 1, 1])
    rep = divisor_report(PrincipalPart((0, 0)), zero_cusp(3), [L], 3)
    assert parse_fraction(rep["k"]) == 0 and rep["ztot"] == {} and rep["exceptional"] == {"0": {}}


@pytest.mark.parametrize("n", [3, 4])
def test_divisor_report_unit_lattice(n):
    # <x, x> = 1 on O_k^n (D = 3) has 6n solutions, so the coefficient is 6n c(-1) / 2
    L = HermLattice.diagonal(3, [1] * n)
    rep = divisor_report(PrincipalPart((0, 2)), zero_cusp(3), [L], n)
    assert {m: parse_fraction(v) for m, v in rep["exceptional"]["0"].items()} == {"1": 6 * n}
    assert rep["ztot"] == {"1": 2}


def test_divisor_report_rejects_wrong_rank():
    with pytest.raises(ValueError):
        divisor_report(PrincipalPart((0, 1)), zero_cusp(3), [HermLattice.diagonal(3, [1])], 3)
