"""Borcherds product bookkeeping at a boundary component: the multiplicity mult, the index I,
the quadratic identity, the leading Fourier-Jacobi coefficient and its transformation law,
the second product factor and the divisor coefficient report."""
from __future__ import annotations

import cmath
import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Mapping, Optional, Sequence, Tuple

from .arith_local import divisors
from .hermlat import FullLattice, HermLattice, OkElem, omega, sqrt_minus_D
from .jacobi import log_theta_numeric, theta_power, theta_torsion_power
from .qseries import QExp, eta_power, sigma1
from .rings import CycElem, GroupAlgebraElem, format_fraction
from .weakforms import CuspConstants, PrincipalPart, VVTable, vv_coeff


# multiplicities

def _rep_numbers(L0: HermLattice, M: int) -> Dict[int, int]:
    return L0.representation_numbers(M)


def b_kra_coeff(m: int, L0: HermLattice, n: int) -> Fraction:
    """(m / (n - 2)) #{x in L_0 : <x, x> = m}."""
    if m <= 0:
        raise ValueError("m must be positive")
    R = _rep_numbers(L0, m)[m]
    return Fraction(m * R, n - 2)


def mult_phi(L0: HermLattice, n: int, c: PrincipalPart) -> Tuple[Fraction, bool]:
    """sum_{m>0} m c(-m) R(m) / (n - 2), and whether it is an integer."""
    if L0.rank != n - 2:
        raise ValueError("L_0 must have rank n - 2")
    R = _rep_numbers(L0, c.M)
    val = sum((Fraction(m * x * R[m], n - 2) for m, x in c.poles()), Fraction(0))
    return val, val.denominator == 1


def weyl_correction(L0: HermLattice, c: PrincipalPart) -> Fraction:
    """2 sum_{m>0} c(-m) sum_{Q(x) < m} sigma_1(m - Q(x)).

    The difference between the tau-exponent of eta^(2k) P_0 P_1 and the index I.
    """
    R = _rep_numbers(L0, c.M)
    tot = Fraction(0)
    for m, x in c.poles():
        tot += x * sum((R[j] * sigma1(m - j) for j in range(m)), Fraction(0))
    return 2 * tot


def _torsion_coset_indices(F: FullLattice) -> List[Tuple[int, int]]:
    """(b, coset index of (b/D) f_{-1}) for b mod D."""
    D = F.D
    out = []
    for b in range(D):
        mu = [x * Fraction(b, D) for x in F.f_m1]
        out.append((b, F.disc_index_of(mu)))
    return out


def fj_index_I(L0: HermLattice, n: int, c: PrincipalPart, cusp: CuspConstants,
               F: Optional[FullLattice] = None) -> Fraction:
    """I = (1/12) sum_{b mod D} tilde c(0, (b/D) f_{-1}) - 2 sum_{m>0} c(-m) sum_{x in L_0} sigma_1(m - Q(x))."""
    F = F or FullLattice(L0, n)
    disc = F.disc_group_cached()
    order = 4 * F.D
    s0 = CycElem.zero(order)
    for b, mu in _torsion_coset_indices(F):
        s0 = s0 + vv_coeff(0, mu, c, cusp, disc)
    first = s0.rational_value()
    if first is None:
        raise ArithmeticError("constant terms of the lift are not rational")
    R = _rep_numbers(L0, c.M)
    second = Fraction(0)
    for m, x in c.poles():
        second += x * sum((R[j] * sigma1(m - j) for j in range(m + 1)), Fraction(0))
    return first / 12 - 2 * second


def quad_identity_sides(L0: HermLattice, c: PrincipalPart, u: Sequence[Fraction]) -> Tuple[Fraction, Fraction]:
    """Both sides of sum_x c(-Q(x)) [u, x]^2 = [u, u] / (2n - 4) sum_x c(-Q(x)) [x, x].

    u and x are given by coordinates in the Z-basis of the trace form; n - 2 is the rank of L_0.
    """
    T = L0.trace_gram()
    r2 = len(T)
    u = [Fraction(a) for a in u]
    if len(u) != r2:
        raise ValueError("sample vector has the wrong length")
    Tu = [sum(T[i][j] * u[j] for j in range(r2)) for i in range(r2)]
    uu = sum(u[i] * Tu[i] for i in range(r2))
    lhs = Fraction(0)
    rhs_sum = Fraction(0)
    for x, q in L0.enumerate(c.M):
        if q == 0:
            continue
        cx = c(int(q))
        if not cx:
            continue
        ux = sum(Tu[i] * x[i] for i in range(r2))
        lhs += cx * ux * ux
        rhs_sum += cx * 2 * q
    rhs = uu / r2 * rhs_sum  # 2n - 4 = 2 rank(L_0) is the real dimension
    return lhs, rhs


def quad_identity_check(L0: HermLattice, c: PrincipalPart, u_samples: Sequence[Sequence[Fraction]]) -> bool:
    return all(a == b for a, b in (quad_identity_sides(L0, c, u) for u in u_samples))


# boundary data

@dataclass
class BoundaryData:
    """A boundary component: L_0, n and the ideal b = Z tau_b + Z (here b = d^-1)."""

    L0: HermLattice
    n: int
    tau_b: OkElem
    N_b: Fraction
    full: FullLattice = field(repr=False)

    @classmethod
    def standard(cls, L0: HermLattice, n: int) -> "BoundaryData":
        D = L0.D
        delta = sqrt_minus_D(D)
        tau_b = (omega(D) / delta) * OkElem(-1, 0, D)
        bd = cls(L0, n, tau_b, Fraction(1, D), FullLattice(L0, n))
        bd.validate()
        return bd

    @property
    def D(self) -> int:
        return self.L0.D

    @property
    def tau(self) -> complex:
        return self.tau_b.to_complex()

    def coords_in_b(self, z: OkElem) -> Tuple[Fraction, Fraction]:
        """(p, q) with z = p tau_b + q."""
        t = self.tau_b
        if t.b == 0:
            raise ValueError("tau_b must not be rational")
        p = z.b / t.b
        q = z.a - p * t.a
        return p, q

    def validate(self) -> None:
        D = self.D
        if self.tau.imag <= 0:
            raise ValueError("tau_b must lie in the upper half plane")
        if abs(2 * self.tau.imag - math.sqrt(D) * float(self.N_b)) > 1e-12:
            raise ValueError("2 Im(tau_b) must equal sqrt(D) N(b)")
        for g in (self.tau_b, OkElem(1, 0, D)):
            p, q = self.coords_in_b(g * omega(D))
            if p.denominator != 1 or q.denominator != 1:
                raise ValueError("b is not closed under multiplication by omega")


# the leading Fourier-Jacobi coefficient

@dataclass
class HorFactor:
    x: Tuple[int, ...]  # Z-coordinates of x in L_0
    exponent: int
    m: int


@dataclass
class FJLeading:
    k: int
    scalar_tag: str
    P_eta: QExp
    P_vert: QExp
    P_hor: List[HorFactor]
    order: int
    exponents: Dict[str, Fraction]
    weyl_correction: Fraction
    kappa: int = 1

    @property
    def raw_exponent(self) -> Fraction:
        """Leading q-exponent of eta^(2k) P_vert P_hor."""
        return sum(self.exponents.values(), Fraction(0))

    @property
    def index(self) -> Fraction:
        """The Fourier-Jacobi index: raw exponent minus the sigma_1 correction."""
        return self.raw_exponent - self.weyl_correction

    def hor_series(self, order: Optional[int] = None) -> QExp:
        """P_hor as a q-series over the group algebra of Z-coordinate monomials (nonnegative exponents only)."""
        order = self.order if order is None else order
        rank = len(self.P_hor[0].x) if self.P_hor else 0
        out = QExp({0: GroupAlgebraElem.scalar(max(rank, 1), 1)}, 1, None)
        for f in self.P_hor:
            if f.exponent < 0:
                raise ValueError("P_hor has negative exponents; it is not a Laurent polynomial in zeta")
            lead, unit = theta_power(f.x, f.exponent, order)
            out = out * (unit * lead)
        return out

    def expand(self, order: Optional[int] = None) -> QExp:
        """psi_0 / (2 pi i)^k as one series (only when every P_hor exponent is nonnegative)."""
        hor = self.hor_series(order)
        rank = hor.leading()[1].rank
        cyc = (self.P_eta.map_coeffs(lambda c: CycElem.scalar(self.P_vert.leading()[1].order, c)) * self.P_vert)
        cyc_ga = cyc.map_coeffs(lambda c: GroupAlgebraElem.scalar(rank, c))
        return cyc_ga * hor

    def summary(self) -> dict:
        return {
            "k": format_fraction(self.k),
            "scalar": self.scalar_tag,
            "kappa": self.kappa,
            "exponents": {k: format_fraction(v) for k, v in self.exponents.items()},
            "raw_exponent": format_fraction(self.raw_exponent),
            "sigma1_correction": format_fraction(self.weyl_correction),
            "index": format_fraction(self.index),
            "hor_factors": len(self.P_hor),
        }


def check_product_scaling(c: PrincipalPart, cusp: CuspConstants) -> None:
    if any(x % 24 for x in c.c):
        raise ValueError("principal part must be scaled into 24 Z")
    if any(Fraction(v) % 24 for v in cusp.gc.values()):
        raise ValueError("gamma_r c_r(0) must lie in 24 Z")
    if Fraction(cusp.k) % 12:
        raise ValueError("weight k must lie in 12 Z")


def leading_fj(bd: BoundaryData, c: PrincipalPart, cusp: CuspConstants, order: int) -> FJLeading:
    """eta^(2k) P_vert P_hor with exponents read off the three factors' series."""
    if order < 1:
        raise ValueError("order must be >= 1")
    check_product_scaling(c, cusp)
    D = bd.D
    k = int(cusp.k)
    P_eta = eta_power(2 * k, order)
    ordc = 4 * D
    P_vert = QExp({0: CycElem.one(ordc)}, 1, None)
    vert_exp = Fraction(0)
    for r in divisors(D):
        e = int(cusp.gc[r])
        if e == 0:
            continue
        s = D // r
        for b in range(s, D, s):  # b != 0 with r b = 0 mod D
            th = theta_torsion_power(b, D, e, order)
            vert_exp += th.valuation()
            P_vert = (P_vert * th).map_coeffs(lambda x: x.reduce())
    hor: List[HorFactor] = []
    hor_exp = Fraction(0)
    unit_cache: Dict[int, Fraction] = {}
    for x, q in bd.L0.enumerate(c.M):
        m = int(q)
        if m == 0 or not c(m):
            continue
        e = c(m)
        hor.append(HorFactor(tuple(x), e, m))
        # leading term of Theta(tau, z)^e is q^(e/12) (zeta^(1/2) - zeta^(-1/2))^e
        if e not in unit_cache:
            _, unit = theta_power((1,), e, 1)
            unit_cache[e] = unit.valuation()
        hor_exp += unit_cache[e]
    exps = {"eta": P_eta.valuation(), "vert": vert_exp, "hor": hor_exp}
    return FJLeading(k, f"(2*pi*i)^{k}", P_eta, P_vert, hor, order, exps, weyl_correction(bd.L0, c))


# numerics of P_1 and the transformation law

def herm_complex(L0: HermLattice, u: Sequence[complex], x: Sequence[complex]) -> complex:
    """<u, x> = sum u_i G_ij conj(x_j) on complex coordinate vectors."""
    G = [[g.to_complex() for g in row] for row in L0.gram]
    r = L0.rank
    return sum(u[i] * G[i][j] * x[j].conjugate() for i in range(r) for j in range(r))


def _ok_vector(L0: HermLattice, xz: Sequence[int]) -> List[complex]:
    """Complex O_k-coordinates of a vector given by Z-coordinates (a_i, b_i) -> a_i + b_i omega."""
    w = omega(L0.D).to_complex()
    return [xz[2 * i] + xz[2 * i + 1] * w for i in range(L0.rank)]


def log_P1(L0: HermLattice, c: PrincipalPart, tau: complex, w0: Sequence[complex], terms: int = 25,
           vectors=None) -> complex:
    """A branch of log P_1(tau, w0) = sum c(-Q(x)) log Theta(tau, <w0, x>) by truncated products."""
    vectors = vectors if vectors is not None else [(x, int(q)) for x, q in L0.enumerate(c.M) if q]
    tot = 0j
    for x, m in vectors:
        e = c(m)
        if e:
            tot += e * log_theta_numeric(tau, herm_complex(L0, w0, _ok_vector(L0, x)), terms)
    return tot


def fj_transform_check(bd: BoundaryData, c: PrincipalPart, I, w0: Sequence[complex],
                       beta: Sequence[Tuple[int, int]], terms: int = 25) -> float:
    """|P_1(w0 + beta) / (P_1(w0) exp(I (pi<w0,beta>/v + pi<beta,beta>/(2v) - i pi<beta,beta>/N(b)))) - 1|.

    beta has coordinates (p_i, q_i) meaning beta_i = p_i tau_b + q_i in b.
    """
    L0 = bd.L0
    tau = bd.tau
    v = tau.imag
    bvec = [p * tau + q for p, q in beta]
    shifted = [a + b for a, b in zip(w0, bvec)]
    vectors = [(x, int(q)) for x, q in L0.enumerate(c.M) if q]
    bb = herm_complex(L0, bvec, bvec).real
    wb = herm_complex(L0, list(w0), bvec)
    expo = float(I) * (math.pi * wb / v + math.pi * bb / (2 * v) - 1j * math.pi * bb / float(bd.N_b))
    diff = log_P1(L0, c, tau, shifted, terms, vectors) - log_P1(L0, c, tau, w0, terms, vectors) - expo
    return abs(cmath.exp(diff) - 1)


# the second factor

def _delta_inv_vectors(L0: HermLattice, bound: Fraction):
    """(y, Q(y / delta)) for y in L_0 with Q(y) / D <= bound, y by Z-coordinates."""
    D = L0.D
    for y, q in L0.enumerate(int(bound * D)):
        yield y, q / D


def p2_factor(bd: BoundaryData, c: PrincipalPart, cusp: CuspConstants, full_table: Mapping[int, QExp],
              q2_order: int, q_order: int) -> QExp:
    """The product over x in d^-1 L_0, a in Z, b mod D, c > 0 of
    (1 - q2^c q^a e(b/D) zeta^(-x))^(2 tilde c(ac - Q(x), mu)),
    mu = -a e_{-1} - (b/D) f_{-1} + x + c e_1, truncated below q2^q2_order.

    The result is a q2-series whose coefficients are q-series over the group algebra of
    elliptic monomials indexed by delta x in L_0 (Z-coordinates), with cyclotomic coefficients.
    At q2-degree d the inner series is certified below q^(q_order + (d - 1) min(a_min, 0)).
    """
    F = bd.full
    D = bd.D
    disc = F.disc_group_cached()
    ordc = 4 * D
    rank = 2 * bd.L0.rank
    M = c.M
    one = GroupAlgebraElem.scalar(max(rank, 1), CycElem.one(ordc))
    # result[d] = dict a -> GroupAlgebraElem
    result: Dict[int, Dict[int, GroupAlgebraElem]] = {0: {0: one}}
    a_min_all = 0
    delta = sqrt_minus_D(D)
    for cc in range(1, q2_order):
        a_min = -(M // cc)
        a_min_all = min(a_min_all, a_min)
        for a in range(a_min, q_order):
            bound = Fraction(a * cc + M)
            if bound < 0:
                continue
            for y, qx in _delta_inv_vectors(bd.L0, bound):
                x_ok = [OkElem(y[2 * i], y[2 * i + 1], D) / delta for i in range(bd.L0.rank)]
                for b in range(D):
                    mu_vec = list(x_ok) + [
                        F.e_m1[bd.L0.rank] * OkElem(-a, 0, D) - F.f_m1[bd.L0.rank] * OkElem(Fraction(b, D), 0, D),
                        OkElem(cc, 0, D),
                    ]
                    mu = F.disc_index_of(mu_vec)
                    val = vv_coeff(a * cc - qx, mu, c, cusp, disc, full_table)
                    ev = val.rational_value() if isinstance(val, CycElem) else Fraction(val)
                    if ev is None or (2 * ev).denominator != 1:
                        raise ArithmeticError("P_2 exponent is not an integer")
                    e = int(2 * ev)
                    if e == 0:
                        continue
                    mono = GroupAlgebraElem.monomial(tuple(-2 * t for t in y) or (0,), CycElem.root(ordc, 4 * b))
                    result = _mul_binomial(result, cc, a, mono, e, q2_order, one)
    terms = {}
    for d, inner in sorted(result.items()):
        if d >= q2_order:
            continue
        prec = q_order + (d - 1) * a_min_all if d > 0 else None
        terms[d] = QExp({a: g for a, g in inner.items() if prec is None or a < prec}, 1, prec)
    return QExp(terms, 1, q2_order)


def _mul_binomial(result, cc, a, mono, e, q2_order, one):
    """Multiply by (1 - q2^cc q^a mono)^e, truncated in q2."""
    out: Dict[int, Dict[int, GroupAlgebraElem]] = {}
    j = 0
    binom = Fraction(1)
    pw = one
    while cc * j < q2_order:
        coef = binom * (-1) ** j
        if coef:
            for d, inner in result.items():
                dd = d + cc * j
                if dd >= q2_order:
                    continue
                tgt = out.setdefault(dd, {})
                for aa, g in inner.items():
                    key = aa + a * j
                    t = g * pw * coef
                    tgt[key] = tgt[key] + t if key in tgt else t
        j += 1
        binom = binom * (e - j + 1) / j
        pw = pw * mono
    return out


# divisor report

def divisor_report(c: PrincipalPart, cusp: CuspConstants, L_s_list: Sequence[HermLattice], n: int) -> dict:
    """Coefficients of the divisor formulas as exact rationals."""
    for L in L_s_list:
        if L.rank != n or not L.is_self_dual():
            raise ValueError("exceptional lattices must be self-dual of rank n")
    exc = {}
    for i, L in enumerate(L_s_list):
        R = L.representation_numbers(c.M)
        exc[str(i)] = {str(m): format_fraction(Fraction(x * R[m], 2)) for m, x in c.poles()}
    return {
        "k": format_fraction(cusp.k),
        "vertical": {str(r): format_fraction(v) for r, v in sorted(cusp.gc.items())},
        "ztot": {str(m): x for m, x in c.poles()},
        "exceptional": exc,
    }


def divisor_report_json(report: dict) -> str:
    return json.dumps(report, indent=2, sort_keys=True) + "\n"
