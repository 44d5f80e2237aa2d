"""Holomorphic modular forms of weight k on Gamma_0(D) with quadratic character.

The character is chi = chi_{-D}^k (trivial for even k). For r | D, s = D/r it factors
as chi_r * chi_s with chi_r(a) = (a|r) when chi is nontrivial.

Cusp normalization: the q-expansion of f at the cusp r is chi_r(beta) chi_s(alpha) (f|_k W_r)
with W_r = [[r alpha, beta], [D gamma, r delta]], r alpha delta - s beta gamma = 1.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Dict, List, Optional, Sequence, Tuple

from .arith_local import (
    check_discriminant,
    cusp_matrix,
    divisors,
    factor,
    jacobi,
    kronecker,
    prime_divisors,
)
from .linalg import rational_rank
from .qseries import QExp
from .rings import CycElem, FourthRoot, coeff_to_complex, parse_fraction


# characters

class QuadChar:
    """chi_{-D}^e restricted to a divisor r of D (e in {0, 1}); value 0 off the units."""

    def __init__(self, r: int, nontrivial: bool):
        self.r = r
        self.nontrivial = nontrivial and r > 1

    def __call__(self, a: int) -> int:
        if self.r == 1:
            return 1
        if math.gcd(a, self.r) != 1:
            return 0
        return jacobi(a, self.r) if self.nontrivial else 1

    def __repr__(self):
        return f"chi_{self.r}" + ("" if self.nontrivial else "(trivial)")


def character(D: int, k: int) -> QuadChar:
    return QuadChar(D, k % 2 == 1)


def chi_parts(D: int, k: int, r: int) -> Tuple[QuadChar, QuadChar]:
    return QuadChar(r, k % 2 == 1), QuadChar(D // r, k % 2 == 1)


# Bernoulli numbers and polynomials

@lru_cache(maxsize=None)
def bernoulli(n: int) -> Fraction:
    """B_n with B_1 = -1/2."""
    B = [Fraction(1)]
    for m in range(1, n + 1):
        B.append(-sum(math.comb(m + 1, j) * B[j] for j in range(m)) / (m + 1))
    return B[n]


def bernoulli_poly(n: int, x: Fraction) -> Fraction:
    return sum(math.comb(n, j) * bernoulli(j) * x ** (n - j) for j in range(n + 1))


def gen_bernoulli(k: int, chi, f: int) -> Fraction:
    """B_{k,chi} = f^(k-1) sum_{a=1}^f chi(a) B_k(a/f) for chi of modulus f."""
    return Fraction(f) ** (k - 1) * sum(chi(a) * bernoulli_poly(k, Fraction(a, f)) for a in range(1, f + 1))


# cyclotomic constants in Q[X]/(X^(4D) - 1)

def gauss_sum(chi: QuadChar, m: int, D: int) -> CycElem:
    """sum_{j mod s} chi(j) e(m j / s), s = chi.r, in order 4D."""
    order = 4 * D
    s = chi.r
    tot = CycElem.zero(order)
    step = order // s
    for j in range(s):
        c = chi(j) if s > 1 else 1
        if c:
            tot = tot + CycElem.root(order, step * m * j, c)
    return tot


def sqrt_cyc(r: int, D: int) -> CycElem:
    """sqrt(r) for r | D squarefree odd, as a cyclotomic element: g(chi_r) or -i g(chi_r)."""
    if r == 1:
        return CycElem.one(4 * D)
    g = gauss_sum(QuadChar(r, True), 1, D)
    if r % 4 == 1:
        return g
    return g * CycElem.root(4 * D, -D)  # times -i


def half_power(r: int, k: int, D: int) -> CycElem:
    """r^(k/2)."""
    if k % 2 == 0:
        return CycElem.scalar(4 * D, Fraction(r) ** (k // 2))
    return sqrt_cyc(r, D) * (Fraction(r) ** ((k - 1) // 2))


# Atkin-Lehner data

@dataclass(frozen=True)
class ALData:
    r: int
    D: int
    alpha: int
    beta: int
    gamma: int
    delta: int

    @classmethod
    def for_cusp(cls, r: int, D: int) -> "ALData":
        if D % r:
            raise ValueError(f"{r} does not divide {D}")
        a, b, g, d = cusp_matrix(r, D)
        return cls(r, D, a, b, g, d)

    @property
    def s(self) -> int:
        return self.D // self.r

    @property
    def R(self):
        return ((self.alpha, self.beta), (self.s * self.gamma, self.r * self.delta))

    @property
    def W(self):
        return ((self.r * self.alpha, self.beta), (self.D * self.gamma, self.r * self.delta))

    def check(self) -> bool:
        (a, b), (c, d) = self.R
        (A, B), (C, E) = self.W
        return a * d - b * c == 1 and A * E - B * C == self.r


# forms

@dataclass
class HolForm:
    """A holomorphic form: its expansion at infinity and its constant terms at every cusp."""

    weight: int
    D: int
    series: QExp
    cusp_consts: Dict[int, object]
    label: str = ""

    def coefficient(self, m: int):
        return self.series.coefficient(m)

    def is_cuspidal(self) -> bool:
        return all(_is_zero_value(c) for c in self.cusp_consts.values())


def _is_zero_value(c) -> bool:
    if isinstance(c, CycElem):
        return c.is_zero_value()
    return c == 0


def _value_rational(c):
    if isinstance(c, CycElem):
        return c.rational_value()
    return Fraction(c)


# Eisenstein series

def eis_pair_qexp(psi: QuadChar, phi: QuadChar, k: int, order: int) -> QExp:
    """sum_m sum_{d|m} psi(m/d) phi(d) d^(k-1) q^m, constant -B_{k,phi}/(2k) when psi has modulus 1."""
    if k <= 2:
        raise ValueError("weight must exceed 2")
    if psi(-1) * phi(-1) != (-1) ** k:
        raise ValueError("character parity mismatch")
    terms = {}
    if psi.r == 1:
        terms[0] = -gen_bernoulli(k, phi, phi.r) / (2 * k)
    for m in range(1, order):
        terms[m] = Fraction(sum(psi(m // d) * phi(d) * d ** (k - 1) for d in divisors(m)))
    return QExp(terms, 1, order)


def _kappa(D: int, k: int, r: int) -> CycElem:
    """E_r = delta_{r,1} + kappa_r sum_N B_r(N) q^N with B_r(N) = sum_{xm=N} chi_r(x) m^(k-1) G_s(m)."""
    order = 4 * D
    s = D // r
    chi = character(D, k)
    chir, chis = chi_parts(D, k, r)
    hp = half_power(r, k, D)
    if chi.nontrivial:
        gchi = gauss_sum(chi, 1, D)
        # 1/g(chi) = chi(-1) g(chi) / D
        inv_g = gchi * Fraction(chi(-1), D)
        Bk = gen_bernoulli(k, chi, D)
        return hp * inv_g * (Fraction(-2 * k) * chir(s) / Bk)
    euler = Fraction(1)
    for p in prime_divisors(D):
        euler *= 1 - Fraction(1, p ** k)
    return hp * (Fraction(-2 * k) / (Fraction(D) ** k * bernoulli(k) * euler))


def eis_basis_coeff(D: int, k: int, r: int, N: int, _gs_cache={}) -> CycElem:
    """B_r(N) = sum_{x m = N} chi_r(x) m^(k-1) G_s(m)."""
    chir, chis = chi_parts(D, k, r)
    s = D // r
    tot = CycElem.zero(4 * D)
    for m in divisors(N):
        x = N // m
        c = chir(x)
        if not c:
            continue
        key = (D, k, r, m % s)
        g = _gs_cache.get(key)
        if g is None:
            g = gauss_sum(chis, m % s, D)
            _gs_cache[key] = g
        if g.is_zero():
            continue
        tot = tot + g * (c * m ** (k - 1))
    return tot


def eis_pair_basis(D: int, k: int, order: int) -> Dict[int, HolForm]:
    """F_r = sum_N B_r(N) q^N + const, with closed-form constant terms delta_{rs}/kappa_r at the cusps."""
    out = {}
    for r in divisors(D):
        kap = _kappa(D, k, r)
        terms = {N: eis_basis_coeff(D, k, r, N) for N in range(1, order)}
        const = kap.inverse()
        if r == 1:
            terms[0] = const
        consts = {s: (const if s == r else CycElem.zero(4 * D)) for s in divisors(D)}
        out[r] = HolForm(k, D, QExp(terms, 1, order), consts, f"F_{r}")
    return out


def solve_linear(A: List[List[CycElem]], b: List[CycElem]) -> List[CycElem]:
    """Solve A x = b over the cyclotomic field (value-level Gaussian elimination)."""
    n = len(A)
    M = [list(row) + [bb] for row, bb in zip(A, b)]
    for c in range(n):
        piv = next((r for r in range(c, n) if not M[r][c].is_zero_value()), None)
        if piv is None:
            raise ArithmeticError("singular constant-term matrix: incomplete Eisenstein basis")
        M[c], M[piv] = M[piv], M[c]
        inv = M[c][c].inverse()
        M[c] = [(x * inv).reduce() for x in M[c]]
        for r in range(n):
            if r != c and not M[r][c].is_zero_value():
                f = M[r][c]
                M[r] = [(x - f * y).reduce() for x, y in zip(M[r], M[c])]
    return [row[n] for row in M]


def solve_Er(D: int, k: int, r: int, order: int) -> HolForm:
    """The Eisenstein series with constant term 1 at the cusp r and 0 at the other cusps."""
    if k <= 2:
        raise ValueError("weight must exceed 2")
    basis = eis_pair_basis(D, k, order)
    cusps = divisors(D)
    A = [[basis[j].cusp_consts[s] for j in cusps] for s in cusps]
    rhs = [CycElem.scalar(4 * D, int(s == r)) for s in cusps]
    x = solve_linear(A, rhs)
    series = None
    for coef, j in zip(x, cusps):
        term = basis[j].series.scale(coef)
        series = term if series is None else series + term
    series = series.map_coeffs(lambda c: c.reduce())
    consts = {s: CycElem.scalar(4 * D, int(s == r)) for s in cusps}
    return HolForm(k, D, series, consts, f"E_{r}")


def eisenstein_Er(D: int, k: int, order: int) -> Dict[int, HolForm]:
    return {r: solve_Er(D, k, r, order) for r in divisors(D)}


def rationalize(form: HolForm) -> HolForm:
    """Replace cyclotomic coefficients by rationals when every coefficient is rational."""
    terms = {}
    for e, c in form.series.items():
        v = _value_rational(c)
        if v is None:
            raise ValueError(f"coefficient at q^{e} is not rational")
        terms[int(e)] = v
    consts = {r: _value_rational(c) for r, c in form.cusp_consts.items()}
    return HolForm(form.weight, form.D, QExp(terms, 1, form.series.prec), consts, form.label)


# numeric slash evaluation

def slash_constant_numeric(series: QExp, D: int, k: int, r: int, Y: float = 0.5, npts: int = 48,
                           tol: float = 1e-30) -> complex:
    """Constant term of chi_r(beta) chi_s(alpha) (f|_k W_r), f given by its q-expansion at infinity.

    Averages the slashed function over a unit horizontal segment at height Y.
    The series must be long enough that its tail at the smallest Im(W_r tau) is below tol;
    a ValueError is raised otherwise.
    """
    al = ALData.for_cusp(r, D)
    chir, chis = chi_parts(D, k, r)
    if r == 1:
        return complex(coeff_to_complex(series.coefficient(0)))
    (A, B), (C, E) = al.W
    eps = chir(al.beta) * chis(al.alpha)
    coeffs = [(float(e), coeff_to_complex(c)) for e, c in series.items()]
    x0 = -E / C
    min_im = r * Y / (C * C * (0.25 + Y * Y))
    emax = float(series.prec)
    cmax = max(abs(c) for _, c in coeffs)
    tail = cmax * (emax + 1) ** (k + 1) * math.exp(-2 * math.pi * min_im * emax)
    if tail > tol:
        raise ValueError(f"series too short for numeric slash at r={r}: tail {tail:.2e}")
    tot = 0j
    for j in range(npts):
        tau = complex(x0 - 0.5 + (j + 0.5) / npts, Y)
        w = (A * tau + B) / (C * tau + E)
        q = cmath.exp(2j * math.pi * w)
        f = sum(c * q ** e for e, c in coeffs)
        tot += eps * r ** (k / 2) * (C * tau + E) ** (-k) * f
    return tot / npts


def slash_order_needed(D: int, k: int, r: int, Y: float = 0.5, digits: float = 30.0) -> int:
    if r == 1:
        return 1
    al = ALData.for_cusp(r, D)
    C = al.W[1][0]
    min_im = r * Y / (C * C * (0.25 + Y * Y))
    m = 10
    while (m + 1) ** (2 * k + 2) * math.exp(-2 * math.pi * min_im * m) > 10 ** (-digits):
        m += 10
    return m


# theta series of rank-n lattices and their constants at the cusps

def theta_cusp_constants(D: int, n: int) -> Dict[int, CycElem]:
    """Constant terms of the theta series of a self-dual hermitian lattice of rank n at the cusps.

    For prime D, Poisson summation gives theta|W_D = i^(-n) theta_{L'}(D tau), so with the
    character normalization chi(-1) the constant at the cusp D is i^n.
    """
    if len(prime_divisors(D)) != 1:
        raise NotImplementedError("theta constants at intermediate cusps need prime D; import a cusp basis")
    order = 4 * D
    return {1: CycElem.one(order), D: FourthRoot(n).to_cyc(order)}


def theta_cusp_projection(theta: QExp, D: int, n: int, Er: Dict[int, HolForm]) -> HolForm:
    """theta - sum_r c_r(theta) E_r, a cusp form."""
    consts = theta_cusp_constants(D, n)
    g = theta.map_coeffs(lambda c: CycElem.scalar(4 * D, c))
    for r, c in consts.items():
        g = g - Er[r].series.truncate(theta.prec).scale(c)
    g = g.map_coeffs(lambda c: c.reduce())
    form = HolForm(n, D, g, {r: CycElem.zero(4 * D) for r in divisors(D)}, "theta cusp part")
    try:
        return rationalize(form)
    except ValueError:
        return form


# dimensions

def dim_and_sturm(k: int, D: int, nontrivial: Optional[bool] = None) -> Tuple[int, int, int]:
    """(dim M_k(D, chi), dim S_k(D, chi), Sturm bound) for squarefree D and chi = chi_{-D}^k.

    Cohen-Oesterle formula; valid for k >= 2.
    """
    if k < 2:
        raise ValueError("weight must be >= 2")
    if nontrivial is None:
        nontrivial = k % 2 == 1
    chi = QuadChar(D, nontrivial)
    if chi(-1) != (-1) ** k:
        return 0, 0, 0
    index = 1
    for p in prime_divisors(D):
        index *= p + 1
    lam = 1
    for p in prime_divisors(D):
        lam *= 2  # r_p = 1 for squarefree level
    if k % 2 == 1:
        e4 = Fraction(0)
    elif k % 4 == 2:
        e4 = Fraction(-1, 4)
    else:
        e4 = Fraction(1, 4)
    if k % 3 == 1:
        e3 = Fraction(0)
    elif k % 3 == 2:
        e3 = Fraction(-1, 3)
    else:
        e3 = Fraction(1, 3)
    s4 = sum(chi(x) for x in range(D) if (x * x + 1) % D == 0) if D > 1 else 1
    s3 = sum(chi(x) for x in range(D) if (x * x + x + 1) % D == 0) if D > 1 else 1
    val = Fraction(k - 1, 12) * index - Fraction(lam, 2) + e4 * s4 + e3 * s3
    if k == 2 and not nontrivial:
        val += 1  # dim M_0 = 1
    assert val.denominator == 1
    dim_s = int(val)
    ncusps = len(divisors(D))
    eis = ncusps - 1 if (k == 2 and not nontrivial) else ncusps
    sturm = (k * index) // 12 + 1
    return dim_s + eis, dim_s, sturm


# interchange of basis files

def export_basis(forms: Sequence[HolForm], D: int, k: int) -> str:
    chunks = []
    for f in forms:
        cc = ",".join(f"{r}:{_serialize_scalar(c)}" for r, c in sorted(f.cusp_consts.items()))
        head = [f"weight={k}", f"level={D}", f"character=kronecker:-{D}", f"cusp_constants= {cc}"]
        chunks.append("\n".join(head) + "\n" + f.series.serialize())
    return "\n".join(chunks)


def _serialize_scalar(c) -> str:
    if isinstance(c, CycElem):
        return c.serialize()
    c = Fraction(c)
    return f"{c.numerator}/{c.denominator}"


def import_basis(text: str, cuspidal: bool = True) -> List[HolForm]:
    """Parse basis forms; with cuspidal=True any form with a nonzero declared constant is rejected."""
    forms = []
    blocks = []
    cur: List[str] = []
    for ln in text.splitlines():
        if ln.startswith("weight=") and cur:
            blocks.append(cur)
            cur = []
        if ln.strip():
            cur.append(ln)
    if cur:
        blocks.append(cur)
    for blk in blocks:
        head = {}
        i = 0
        while i < len(blk) and not blk[i].startswith("qexp "):
            key, val = blk[i].split("=", 1)
            head[key.strip()] = val.strip()
            i += 1
        for key in ("weight", "level", "character", "cusp_constants"):
            if key not in head:
                raise ValueError(f"basis file block lacks '{key}='")
        k = int(head["weight"])
        D = int(head["level"])
        if head["character"] != f"kronecker:-{D}":
            raise ValueError("character header must be kronecker:-D")
        consts = _parse_consts(head["cusp_constants"])
        series = QExp.parse("\n".join(blk[i:]))
        if series.normalized().N != 1:
            raise ValueError("basis forms must have integer exponents")
        if set(consts) != set(divisors(D)):
            raise ValueError("cusp constants must be declared for every r | D")
        c0 = series.coefficient(0)
        if not _values_equal(c0, consts[1]):
            raise ValueError("constant at the cusp 1 disagrees with the q^0 coefficient")
        form = HolForm(k, D, series, consts, "imported")
        if cuspidal and not form.is_cuspidal():
            raise ValueError("form with nonzero cusp constants cannot enter the cuspidal slot")
        forms.append(form)
    return forms


def _values_equal(a, b) -> bool:
    if isinstance(a, CycElem) or isinstance(b, CycElem):
        order = a.order if isinstance(a, CycElem) else b.order
        aa = a if isinstance(a, CycElem) else CycElem.scalar(order, a)
        bb = b if isinstance(b, CycElem) else CycElem.scalar(order, b)
        return aa.value_eq(bb)
    return Fraction(a) == Fraction(b)


def _parse_consts(text: str) -> Dict[int, object]:
    from .rings import parse_coeff

    out = {}
    parts = text.strip().split(",")
    i = 0
    while i < len(parts):
        item = parts[i].strip()
        if not item:
            i += 1
            continue
        r, v = item.split(":", 1)
        if v.startswith("cyc:"):
            order = int(v.split(":")[1])
            # a cyclotomic value spans `order` comma-separated coordinates
            v = ",".join([v] + [p.strip() for p in parts[i + 1:i + order]])
            i += order
        else:
            i += 1
        out[int(r)] = parse_coeff(v)
    return out


# the holomorphic span used by the modularity criterion

@dataclass
class HolSpan:
    D: int
    k: int
    order: int
    E1: HolForm
    cusp_forms: List[HolForm]
    dim_cusp: int
    complete: bool
    sources: List[str] = field(default_factory=list)

    def forms(self) -> List[HolForm]:
        return [self.E1] + list(self.cusp_forms)

    def coefficient_rows(self, M: int) -> List[List[object]]:
        return [[f.series.coefficient(m) for m in range(M + 1)] for f in self.forms()]


def _rank_rational(rows: List[List[Fraction]]) -> int:
    return rational_rank(rows)


def holomorphic_span(D: int, k: int, order: int, theta_lattices=(), imported: Sequence[HolForm] = ()) -> HolSpan:
    """E_1 plus cusp forms from theta series of rank-k lattices and imported forms.

    Theta series enter through their cusp projections; a reduced basis is kept.
    """
    check_discriminant(D)
    Er = eisenstein_Er(D, k, order)
    E1 = Er[1]
    try:
        E1 = rationalize(E1)
    except ValueError:
        pass
    _, dim_s, sturm = dim_and_sturm(k, D)
    candidates: List[HolForm] = []
    sources = []
    for L in theta_lattices:
        if L.rank != k or L.D != D:
            raise ValueError("theta lattices must have rank equal to the weight and the same D")
        if dim_s == 0:
            continue  # the cusp projection vanishes
        th = L.theta_series(order)
        candidates.append(theta_cusp_projection(th, D, k, Er))
        sources.append(f"theta(rank {L.rank})")
    for f in imported:
        if f.weight != k or f.D != D:
            raise ValueError("imported form has the wrong weight or level")
        candidates.append(f)
        sources.append("imported")
    basis: List[HolForm] = []
    rows: List[List[Fraction]] = []
    for f in candidates:
        row = _real_rows(f, order)
        trial = rows + row
        if _rank_rational(trial) > (_rank_rational(rows) if rows else 0):
            rows = trial
            basis.append(f)
    cusp_rank = _rank_rational(rows) if rows else 0
    return HolSpan(D, k, order, E1, basis, dim_s, cusp_rank >= dim_s and order >= sturm, sources)


def _real_rows(f: HolForm, order: int) -> List[List[Fraction]]:
    """Rational coordinate rows of a form's coefficients (one row per cyclotomic coordinate)."""
    coeffs = [f.series.coefficient(m) for m in range(order)]
    if all(not isinstance(c, CycElem) for c in coeffs):
        return [[Fraction(c) for c in coeffs]]
    order4 = next(c.order for c in coeffs if isinstance(c, CycElem))
    red = [
        (c.reduced_coords() if isinstance(c, CycElem) else CycElem.scalar(order4, c).reduced_coords())
        for c in coeffs
    ]
    return [[r[t] for r in red] for t in range(len(red[0]))]
