"""Principal parts of weakly holomorphic forms of weight 2 - n on Gamma_0(D) with character chi,
their constant terms at the cusps, and the coefficients of the vector-valued lift."""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import lcm
from typing import Dict, List, Mapping, Optional, Sequence, Tuple

from .arith_local import divisors, gamma_r
from .hermlat import DiscGroup
from .linalg import hermite_reduce, integer_kernel, rational_rank
from .modforms import HolForm, HolSpan
from .qseries import QExp
from .rings import CycElem, FourthRoot, format_fraction, parse_coeff, serialize_coeff


@dataclass(frozen=True)
class PrincipalPart:
    """c[m] = c(-m) for 0 <= m <= M."""

    c: Tuple[int, ...]

    def __post_init__(self):
        if not all(isinstance(x, int) for x in self.c):
            raise TypeError("principal part entries must be integers")

    @classmethod
    def from_dict(cls, d: Mapping[int, int], M: Optional[int] = None) -> "PrincipalPart":
        """d maps m >= 0 to c(-m)."""
        if M is None:
            M = max(d) if d else 0
        return cls(tuple(int(d.get(m, 0)) for m in range(M + 1)))

    @property
    def M(self) -> int:
        return len(self.c) - 1

    def __call__(self, m: int) -> int:
        """c(-m) for m >= 0."""
        return self.c[m] if 0 <= m < len(self.c) else 0

    def poles(self):
        return [(m, self.c[m]) for m in range(1, len(self.c)) if self.c[m]]

    @property
    def scale24(self) -> bool:
        return all(x % 24 == 0 for x in self.c)

    def is_zero(self) -> bool:
        return not any(self.c)

    def __mul__(self, t: int) -> "PrincipalPart":
        return PrincipalPart(tuple(t * x for x in self.c))

    __rmul__ = __mul__

    def __add__(self, other: "PrincipalPart") -> "PrincipalPart":
        M = max(self.M, other.M)
        return PrincipalPart(tuple(self(m) + other(m) for m in range(M + 1)))

    def to_json(self) -> dict:
        return {"c": {str(-m): x for m, x in enumerate(self.c) if x}, "M": self.M}

    @classmethod
    def from_json(cls, obj) -> "PrincipalPart":
        d = {-int(k): int(v) for k, v in obj["c"].items()}
        if any(m < 0 for m in d):
            raise ValueError("principal parts only carry c(m) for m <= 0")
        return cls.from_dict(d, obj.get("M"))


def pairing(c: PrincipalPart, form: HolForm):
    """sum_{m >= 0} c(-m) d(m)."""
    tot = 0
    for m, x in enumerate(c.c):
        if x:
            tot = tot + form.series.coefficient(m) * x
    return tot


def _is_zero(v) -> bool:
    return v.is_zero_value() if isinstance(v, CycElem) else v == 0


def _condition_rows(form: HolForm, M: int) -> List[List[Fraction]]:
    coeffs = [form.series.coefficient(m) for m in range(M + 1)]
    cyc = [c for c in coeffs if isinstance(c, CycElem)]
    if not cyc:
        return [[Fraction(c) for c in coeffs]]
    order = cyc[0].order
    red = [(c if isinstance(c, CycElem) else CycElem.scalar(order, c)).reduced_coords() for c in coeffs]
    return [[r[t] for r in red] for t in range(len(red[0]))]


@dataclass
class AdmissibleBasis:
    basis: List[PrincipalPart]
    M: int
    complete: bool
    condition_rank: int

    @property
    def label(self) -> str:
        return "admissible" if self.complete else "superset candidates"


def admissible_lattice(M: int, forms: Sequence[HolForm], complete: bool = True) -> AdmissibleBasis:
    """Z-basis of integer principal parts (c(0), ..., c(-M)) annihilating every supplied form."""
    rows: List[List[Fraction]] = []
    for f in forms:
        prec = f.series.prec
        if prec is not None and prec <= M:
            raise ValueError(f"holomorphic form known only below q^{prec}; need order > {M}")
        rows.extend(_condition_rows(f, M))
    if rows:
        # echelonize from the highest pole down so that c(0) is the last dependent entry
        ker = integer_kernel(rows, M + 1)
        kernel = [v[::-1] for v in hermite_reduce([v[::-1] for v in ker])]
    else:
        kernel = [[int(i == j) for j in range(M + 1)] for i in range(M + 1)]
    rank = rational_rank(rows) if rows else 0
    assert len(kernel) == M + 1 - rank
    return AdmissibleBasis([PrincipalPart(tuple(v)) for v in kernel], M, complete, rank)


def admissible_from_span(M: int, span: HolSpan) -> AdmissibleBasis:
    if span.order <= max(M, 0):
        raise ValueError("holomorphic span truncated below the pole order")
    return admissible_lattice(M, span.forms(), complete=span.complete)


def is_admissible(c: PrincipalPart, forms: Sequence[HolForm]) -> bool:
    return all(_is_zero(pairing(c, f)) for f in forms)


# cusp constants

@dataclass
class CuspConstants:
    D: int
    c_r0: Dict[int, object]  # r -> CycElem or Fraction
    gamma: Dict[int, FourthRoot]
    gc: Dict[int, Fraction]  # r -> gamma_r c_r(0), rational
    k: Fraction

    def weight(self) -> Fraction:
        return self.k

    def to_json(self) -> dict:
        return {
            "D": self.D,
            "k": format_fraction(self.k),
            "gamma_c_r0": {str(r): format_fraction(v) for r, v in sorted(self.gc.items())},
            "c_r0": {str(r): serialize_coeff(v) for r, v in sorted(self.c_r0.items())},
        }


def cusp_constants(c: PrincipalPart, Er: Mapping[int, HolForm], gamma_table: Mapping[int, FourthRoot]) -> CuspConstants:
    """c_r(0) = -sum_{m>0} c(-m) e_r(m); gamma_r c_r(0) must be rational and k = sum_r gamma_r c_r(0)."""
    D = max(Er)
    order = 4 * D
    c_r0 = {}
    gc = {}
    gam = {}
    for r, E in Er.items():
        if E.series.prec is not None and E.series.prec <= c.M:
            raise ValueError("Eisenstein series truncated below the pole order")
        tot = CycElem.zero(order)
        for m, x in c.poles():
            e = E.series.coefficient(m)
            tot = tot - (e if isinstance(e, CycElem) else CycElem.scalar(order, e)) * x
        tot = tot.reduce()
        c_r0[r] = tot
        g = gamma_r(r, dict(gamma_table))
        gam[r] = g
        val = (g.to_cyc(order) * tot).rational_value()
        if val is None:
            raise ArithmeticError(f"gamma_{r} c_{r}(0) is not rational: Eisenstein normalization mismatch")
        gc[r] = val
    if gc[1] != c(0):
        raise ArithmeticError(f"c_1(0) = {gc[1]} differs from c(0) = {c(0)}: principal part is not admissible")
    k = sum(gc.values(), Fraction(0))
    return CuspConstants(D, c_r0, gam, gc, k)


def scale_for_products(c: PrincipalPart, cusp: CuspConstants) -> int:
    """Smallest t > 0 with t c(-m) and t gamma_r c_r(0) in 24 Z and t k in 12 Z."""
    den = 1
    for v in list(cusp.gc.values()) + [cusp.k]:
        den = lcm(den, Fraction(v).denominator)
    t = den
    while True:
        ok = all((t * x) % 24 == 0 for x in c.c)
        ok = ok and all((t * v) % 24 == 0 for v in cusp.gc.values())
        ok = ok and (t * cusp.k) % 12 == 0
        if ok:
            return t
        t += den


def scaled_cusp(cusp: CuspConstants, t: int) -> CuspConstants:
    return CuspConstants(
        cusp.D,
        {r: v * t for r, v in cusp.c_r0.items()},
        dict(cusp.gamma),
        {r: v * t for r, v in cusp.gc.items()},
        cusp.k * t,
    )


# the vector-valued lift

def vv_coeff(m, mu: int, c: PrincipalPart, cusp: CuspConstants, disc: DiscGroup,
             full_table: Optional[Mapping[int, QExp]] = None):
    """tilde c(m, mu) = sum_{r_mu | r | D} gamma_r c_r(m r).

    For m < 0 only the r = 1 term survives (holomorphy at the other cusps), for m = 0 it
    uses the constants c_r(0), and for m > 0 a table of expansions at every cusp is required.
    """
    m = Fraction(m)
    D = disc.D
    order = 4 * D
    if (m + disc.qvals[mu]).denominator != 1:
        return CycElem.zero(order)
    rmu = disc.r_mu[mu]
    if m < 0:
        if m.denominator != 1:
            return CycElem.zero(order)
        return CycElem.scalar(order, c(-int(m)) if rmu == 1 else 0)
    if m == 0:
        tot = CycElem.zero(order)
        for r in divisors(D):
            if r % rmu == 0:
                tot = tot + CycElem.scalar(order, cusp.gc[r])
        return tot
    if full_table is None:
        raise ValueError("positive-index coefficients need full expansions at every cusp")
    tot = CycElem.zero(order)
    for r in divisors(D):
        if r % rmu:
            continue
        if r not in full_table:
            raise ValueError(f"missing expansion at the cusp {r}")
        ser = full_table[r]
        if ser.prec is not None and m * r >= ser.prec:
            raise ValueError(f"expansion at the cusp {r} too short for index {m * r}")
        val = ser.coefficient(m * r)
        val = val if isinstance(val, CycElem) else CycElem.scalar(order, val)
        tot = tot + cusp.gamma[r].to_cyc(order) * val
    return tot.reduce()


@dataclass
class VVTable:
    D: int
    m_min: Fraction
    m_max: Fraction
    entries: Dict[Tuple[Fraction, int], object] = field(default_factory=dict)

    def __getitem__(self, key):
        m, mu = key
        return self.entries.get((Fraction(m), mu), 0)

    def serialize(self) -> str:
        lines = [f"vvtable D={self.D} m_min={format_fraction(self.m_min)} m_max={format_fraction(self.m_max)}"]
        for (m, mu), v in sorted(self.entries.items()):
            lines.append(f"{format_fraction(m)} {mu} : {serialize_coeff(v)}")
        return "\n".join(lines) + "\n"

    @classmethod
    def parse(cls, text: str) -> "VVTable":
        from .rings import parse_fraction

        lines = [ln for ln in text.splitlines() if ln.strip()]
        head = dict(tok.split("=") for tok in lines[0].split()[1:])
        t = cls(int(head["D"]), parse_fraction(head["m_min"]), parse_fraction(head["m_max"]))
        for ln in lines[1:]:
            key, val = ln.split(":", 1)
            m, mu = key.split()
            t.entries[(parse_fraction(m), int(mu))] = parse_coeff(val.strip())
        return t


def _rational_or_cyc(v):
    if isinstance(v, CycElem):
        r = v.rational_value()
        return r if r is not None else v.reduce()
    return v


def vv_table(c: PrincipalPart, cusp: CuspConstants, disc: DiscGroup, m_max=0,
             full_table: Optional[Mapping[int, QExp]] = None) -> VVTable:
    """All nonzero tilde c(m, mu) with -M <= m <= m_max."""
    D = disc.D
    t = VVTable(D, Fraction(-c.M), Fraction(m_max))
    for mu in range(len(disc)):
        q = disc.qvals[mu]
        m = Fraction(-c.M) + (-q) % 1  # smallest m >= -M with m + Q(mu) integral
        while m <= m_max:
            v = vv_coeff(m, mu, c, cusp, disc, full_table)
            if not _is_zero(v):
                t.entries[(m, mu)] = _rational_or_cyc(v)
            m += 1
    return t


def import_full_expansions(texts: Mapping[int, str]) -> Dict[int, QExp]:
    """Expansions c_r(m) of f at every cusp r, one interchange-format series per cusp."""
    return {int(r): QExp.parse(t) for r, t in texts.items()}
