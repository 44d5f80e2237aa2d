import itertools
import math
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from unitary_borcherds.arith_local import (
    check_discriminant,
    coset_count,
    coset_reps,
    gamma_r,
    hilbert_symbol,
    inv_p,
    kronecker,
    same_coset,
    weil_index,
    weil_index_table,
)
from unitary_borcherds.modforms import character, chi_parts
from unitary_borcherds.rings import FourthRoot

I, MINUS_ONE, MINUS_I = FourthRoot(1), FourthRoot(2), FourthRoot(3)


def _square_mod(d, m):
    return any((x * x - d) % m == 0 for x in range(m))


def test_kronecker_examples():
    assert kronecker(1, 5) == 1
    # 2 is inert in Q(sqrt -3) and split in Q(sqrt -7): x^2 = d mod 8 decides
    assert kronecker(-3, 2) == (1 if _square_mod(-3, 8) else -1) == -1
    assert kronecker(-7, 2) == (1 if _square_mod(-7, 8) else -1) == 1


def _hilbert_brute(a, b, p, k=3):
    """Primitive solution of a x^2 + b y^2 = z^2 mod p^k (p odd, valuations at most 1)."""
    m = p ** k
    for x, y, z in itertools.product(range(m), repeat=3):
        if (x % p or y % p or z % p) and (a * x * x + b * y * y - z * z) % m == 0:
            return 1
    return -1


def test_hilbert_examples():
    assert hilbert_symbol(3, 3, 3) == -1 == _hilbert_brute(3, 3, 3)
    for b in (2, 3, -5, Fraction(7, 3)):
        for p in (2, 3, 5, 7, "inf"):
            assert hilbert_symbol(1, b, p) == 1
            assert hilbert_symbol(b, -b, p) == 1


@pytest.mark.parametrize("a,b", [(2, 3), (-1, 3), (6, 5), (-3, 5), (10, 15)])
def test_hilbert_against_brute(a, b):
    for p in (3, 5):
        if a % (p * p) and b % (p * p):
            assert hilbert_symbol(a, b, p) == _hilbert_brute(a, b, p, 2 if p == 5 else 3)


nonzero = st.integers(-60, 60).filter(bool)
ratl = st.builds(Fraction, nonzero, st.integers(1, 12))
PLACES = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, "inf"]


@given(ratl, ratl, ratl)
def test_hilbert_bimultiplicative(a1, a2, b):
    for p in PLACES:
        assert hilbert_symbol(a1 * a2, b, p) == hilbert_symbol(a1, b, p) * hilbert_symbol(a2, b, p)


@given(ratl, ratl)
def test_hilbert_product_formula(a, b):
    primes = set()
    for x in (a.numerator, a.denominator, b.numerator, b.denominator, 2):
        x = abs(x)
        for p in range(2, x + 1):
            if x % p == 0 and all(p % q for q in range(2, int(p ** 0.5) + 1)):
                primes.add(p)
    assert math.prod(hilbert_symbol(a, b, p) for p in sorted(primes) + ["inf"]) == 1


def test_inv_p():
    assert inv_p(1, 3, 3) == 1
    assert inv_p(4, 7, 7) == 1
    # (2, -3)_3 = (2|3) = -1
    assert inv_p(2, 3, 3) == -1


def test_weil_index_examples():
    assert weil_index(3, 3, 3, 1) == MINUS_I
    assert weil_index(3, 4, 3, -1) == MINUS_ONE
    for p, D in [(3, 3), (7, 7), (3, 15), (5, 15)]:
        assert weil_index(p, 8, D, 1) == FourthRoot(0)


def test_gamma_r():
    table = {3: I, 5: MINUS_ONE}
    assert gamma_r(1, table) == FourthRoot(0)
    assert gamma_r(3, table) == I
    assert gamma_r(15, table) == MINUS_I


@given(st.sampled_from([3, 7, 11, 15, 19, 23, 35]), st.integers(3, 12), st.sampled_from([1, -1]))
def test_weil_index_fourth_root(D, n, inv):
    table = weil_index_table(D, n, {p: inv for p in (3, 5, 7, 11, 19, 23) if D % p == 0})
    for g in table.values():
        assert g ** 4 == FourthRoot(0)
        if n % 2 == 0:
            assert g.e in (0, 2)


@pytest.mark.parametrize("D", [3, 7, 15, 21, 35])
@pytest.mark.parametrize("k", [3, 4, 5])
def test_character_factors(D, k):
    chi = character(D, k)
    for r in [d for d in range(1, D + 1) if D % d == 0]:
        cr, cs = chi_parts(D, k, r)
        for a in range(-2 * D, 2 * D):
            if math.gcd(a, D) == 1:
                assert cr(a) * cs(a) == chi(a)


def _projective_line_size(D):
    pairs = sum(1 for c in range(D) for d in range(D) if math.gcd(math.gcd(c, d), D) == 1)
    units = sum(1 for u in range(D) if math.gcd(u, D) == 1)
    return pairs // units


@pytest.mark.parametrize("D,expected", [(1, 1), (3, 4), (7, 8), (15, 24), (21, 32)])
def test_coset_count(D, expected):
    assert coset_count(D) == expected
    if D > 1:
        assert _projective_line_size(D) == expected
        reps = coset_reps(D)
        assert len(reps) == expected
        assert all(a * d - b * c == 1 for a, b, c, d in reps)
        assert not any(same_coset(x, y, D) for i, x in enumerate(reps) for y in reps[i + 1:])


@pytest.mark.parametrize("D", [1, 2, 4, 5, 12, 27, -3])
def test_discriminant_rejected(D):
    with pytest.raises(ValueError):
        check_discriminant(D)
