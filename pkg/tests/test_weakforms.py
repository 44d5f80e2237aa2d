from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from unitary_borcherds.modforms import HolForm, eisenstein_Er
from unitary_borcherds.qseries import QExp
from unitary_borcherds.weakforms import (
    PrincipalPart,
    VVTable,
    admissible_lattice,
    cusp_constants,
    is_admissible,
    pairing,
    scale_for_products,
    scaled_cusp,
    vv_coeff,
    vv_table,
)


def const_form(M):
    return HolForm(3, 3, QExp({0: 1}, 1, M + 1), {1: 1, 3: 0})


def test_no_conditions_gives_full_lattice():
    A = admissible_lattice(4, [])
    assert [b.c for b in A.basis] == [tuple(int(i == j) for j in range(5)) for i in range(5)]
    assert A.condition_rank == 0


def test_constant_functional_kills_c0():
    A = admissible_lattice(5, [const_form(5)])
    assert len(A.basis) == 5 and A.condition_rank == 1
    assert all(b(0) == 0 for b in A.basis)


def test_truncated_form_rejected():
    with pytest.raises(ValueError):
        admissible_lattice(6, [const_form(3)])


@pytest.mark.parametrize("name", ["d3_n3", "d3_n4", "d7_n3"])
def test_rank_nullity_and_annihilation(instances, name):
    inst = instances[name]
    A = inst.admissible
    assert len(A.basis) == A.M + 1 - A.condition_rank
    forms = inst.hol_span.forms()
    assert all(is_admissible(b, forms) for b in A.basis)
    assert A.complete and A.label == "admissible"


@settings(max_examples=25, deadline=None)
@given(st.lists(st.integers(-5, 5), min_size=9, max_size=9))
def test_integer_combinations_stay_admissible(instances, coeffs):
    inst = instances["d7_n3"]
    basis = inst.admissible.basis
    c = PrincipalPart((0,) * (inst.M + 1))
    for a, b in zip(coeffs, basis):
        c = c + b * a
    assert is_admissible(c, inst.hol_span.forms())


def test_d7_lattice_is_saturated(instances):
    # every small integer vector in the kernel lies in the Z-span of the basis
    inst = instances["d7_n3"]
    M = inst.M
    forms = inst.hol_span.forms()
    basis = inst.admissible.basis
    # the basis is echelon in the pole coordinates: leading entries at c(-M), c(-M+1), ...
    lead = {max(m for m in range(M + 1) if b(m)): b for b in basis}
    for c1 in range(-30, 31):
        for c2 in range(-3, 4):
            for c0 in range(-200, 201):
                c = PrincipalPart.from_dict({0: c0, 1: c1, 2: c2}, M)
                if not is_admissible(c, forms):
                    continue
                rest = c
                for m in sorted(lead, reverse=True):
                    b = lead[m]
                    q, r = divmod(rest(m), b(m))
                    assert r == 0
                    rest = rest + b * (-q)
                assert rest.is_zero()


def test_cusp_constants_of_zero():
    Er = eisenstein_Er(3, 3, 4)
    cc = cusp_constants(PrincipalPart((0, 0, 0)), Er, {3: _gamma3(3)})
    assert cc.k == 0 and all(v == 0 for v in cc.gc.values())


def _gamma3(n):
    from unitary_borcherds.arith_local import weil_index_table

    return weil_index_table(3, n, {3: -1})[3]


def test_cusp_constants_reject_inadmissible_constant():
    Er = eisenstein_Er(3, 3, 4)
    with pytest.raises(ArithmeticError):
        cusp_constants(PrincipalPart((5, 0)), Er, {3: _gamma3(3)})


def test_cusp_constants_d3_weight4(instances):
    inst = instances["d3_n4"]
    # e_1(1) = -3 and e_3(1) = 27 for weight 4, so c(0) = 72 and c_3(0) = -648
    c = PrincipalPart.from_dict({0: 72, 1: 24}, inst.M)
    cc = inst.cusp(c)
    assert cc.c_r0[3].rational_value() == -24 * 27
    assert cc.gc == {1: 72, 3: 648}
    assert cc.k == 720
    assert scale_for_products(c, cc) == 1


def test_scale_is_minimal(instances):
    for inst in instances.values():
        for c in inst.principal_parts:
            cc = inst.cusp(c)
            t = scale_for_products(c, cc)
            cs = scaled_cusp(cc, t)
            assert (c * t).scale24 and all(v % 24 == 0 for v in cs.gc.values()) and cs.k % 12 == 0
            for s in range(1, t):
                ss = scaled_cusp(cc, s)
                assert not ((c * s).scale24 and all(v % 24 == 0 for v in ss.gc.values()) and ss.k % 12 == 0)


def test_pairing_matches_residue(d3n3):
    c = d3n3.principal_parts[0]
    assert pairing(c, d3n3.Er[1]) == 0


def test_vv_coefficients(d3n3):
    c = d3n3.principal_parts[0]
    cc = d3n3.cusp(c)
    disc = d3n3.full.disc_group_cached()
    assert vv_coeff(-10, 0, c, cc, disc).rational_value() == 1
    assert vv_coeff(-9, 0, c, cc, disc).rational_value() == 0
    assert vv_coeff(0, 0, c, cc, disc).rational_value() == cc.k == 2592
    mu = next(i for i, r in enumerate(disc.r_mu) if r == 3 and disc.qvals[i] == 0)
    assert vv_coeff(0, mu, c, cc, disc).rational_value() == cc.gc[3] == 1944
    assert vv_coeff(-10, mu, c, cc, disc).rational_value() == 0
    nu = next(i for i, q in enumerate(disc.qvals) if q != 0)
    assert vv_coeff(0, nu, c, cc, disc).is_zero_value()
    with pytest.raises(ValueError):
        vv_coeff(1, 0, c, cc, disc)


@pytest.mark.parametrize("name", ["d3_n3", "d7_n3"])
def test_vv_support_and_integrality(instances, name):
    inst = instances[name]
    disc = inst.full.disc_group_cached()
    for c in inst.principal_parts:
        t = vv_table(c, inst.cusp(c), disc)
        for (m, mu), v in t.entries.items():
            assert (m + disc.qvals[mu]).denominator == 1
            if m < 0:
                assert disc.r_mu[mu] == 1 and Fraction(v).denominator == 1


def test_vv_scaling_equivariance(d3n3):
    disc = d3n3.full.disc_group_cached()
    c = d3n3.principal_parts[1]
    cc = d3n3.cusp(c)
    base = vv_table(c, cc, disc)
    scaled = vv_table(c * 5, scaled_cusp(cc, 5), disc)
    assert set(base.entries) == set(scaled.entries)
    assert all(scaled.entries[k] == 5 * v for k, v in base.entries.items())


def test_vv_table_round_trip(d3n3):
    c = d3n3.principal_parts[0]
    t = vv_table(c, d3n3.cusp(c), d3n3.full.disc_group_cached())
    text = t.serialize()
    assert VVTable.parse(text).serialize() == text
    assert t[Fraction(-10), 0] == 1


@settings(max_examples=50)
@given(st.lists(st.integers(-50, 50), min_size=1, max_size=12))
def test_principal_part_json_round_trip(xs):
    c = PrincipalPart(tuple(xs))
    assert PrincipalPart.from_json(c.to_json()) == c


def test_principal_part_validation():
    with pytest.raises(TypeError):
        PrincipalPart((1.5,))
    with pytest.raises(ValueError):
        PrincipalPart.from_json({"c": {"2": 1}})
    c = PrincipalPart.from_dict({1: 3})
    assert c(1) == 3 and c(5) == 0 and c.poles() == [(1, 3)]
    assert (c + PrincipalPart((1, 0, 2))).c == (1, 3, 2)
