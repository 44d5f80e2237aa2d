"""Hermitian O_k-lattices for k = Q(sqrt(-D)), D = 3 mod 4.

Elements of k are a + b*omega with omega = (1 + sqrt(-D))/2 and rational a, b;
O_k is the set with integral a, b. Hermitian forms are linear in the first slot.
"""
from __future__ import annotations

import cmath
import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from .arith_local import check_discriminant, prime_divisors
from .qseries import QExp


class OkElem:
    """a + b*omega in k; integral when a, b are integers."""

    __slots__ = ("a", "b", "D")

    def __init__(self, a, b, D: int):
        self.a = Fraction(a)
        self.b = Fraction(b)
        self.D = D

    @property
    def _c(self) -> Fraction:
        # omega^2 = omega - c
        return Fraction(1 + self.D, 4)

    def is_integral(self) -> bool:
        return self.a.denominator == 1 and self.b.denominator == 1

    def __add__(self, o):
        o = self._co(o)
        return OkElem(self.a + o.a, self.b + o.b, self.D)

    __radd__ = __add__

    def __neg__(self):
        return OkElem(-self.a, -self.b, self.D)

    def __sub__(self, o):
        return self + (-self._co(o))

    def __rsub__(self, o):
        return (-self) + o

    def _co(self, o) -> "OkElem":
        if isinstance(o, OkElem):
            if o.D != self.D:
                raise ValueError("field mismatch")
            return o
        if isinstance(o, (int, Fraction)):
            return OkElem(o, 0, self.D)
        raise TypeError

    def __mul__(self, o):
        try:
            o = self._co(o)
        except TypeError:
            return NotImplemented
        a, b, c, d = self.a, self.b, o.a, o.b
        cc = self._c
        return OkElem(a * c - b * d * cc, a * d + b * c + b * d, self.D)

    __rmul__ = __mul__

    def conj(self) -> "OkElem":
        return OkElem(self.a + self.b, -self.b, self.D)

    def norm(self) -> Fraction:
        return self.a * self.a + self.a * self.b + self.b * self.b * self._c

    def trace(self) -> Fraction:
        return 2 * self.a + self.b

    def inverse(self) -> "OkElem":
        n = self.norm()
        if n == 0:
            raise ZeroDivisionError
        c = self.conj()
        return OkElem(c.a / n, c.b / n, self.D)

    def __truediv__(self, o):
        return self * self._co(o).inverse()

    def is_rational(self) -> bool:
        return self.b == 0

    def to_complex(self) -> complex:
        return complex(float(self.a) + float(self.b) / 2, float(self.b) * math.sqrt(self.D) / 2)

    def __eq__(self, o):
        if isinstance(o, (int, Fraction)):
            o = OkElem(o, 0, self.D)
        return isinstance(o, OkElem) and (self.a, self.b, self.D) == (o.a, o.b, o.D)

    def __hash__(self):
        return hash((self.a, self.b, self.D))

    def __repr__(self):
        return f"({self.a}+{self.b}w)"


def omega(D: int) -> OkElem:
    return OkElem(0, 1, D)


def sqrt_minus_D(D: int) -> OkElem:
    """delta = sqrt(-D) = 2 omega - 1."""
    return OkElem(-1, 2, D)


def _mat_det_field(M):
    """Determinant over a field (entries support +,-,*,/)."""
    M = [list(r) for r in M]
    n = len(M)
    det = None
    sign = 1
    for i in range(n):
        piv = None
        for r in range(i, n):
            if not _is_zero(M[r][i]):
                piv = r
                break
        if piv is None:
            return M[0][0] * 0 if n else 1
        if piv != i:
            M[i], M[piv] = M[piv], M[i]
            sign = -sign
        p = M[i][i]
        det = p if det is None else det * p
        for r in range(i + 1, n):
            if not _is_zero(M[r][i]):
                f = M[r][i] / p
                M[r] = [x - f * y for x, y in zip(M[r], M[i])]
    return det * sign if det is not None else 1


def _is_zero(x) -> bool:
    if isinstance(x, OkElem):
        return x.a == 0 and x.b == 0
    return x == 0


def rational_ldl(T):
    """LDL^T of a symmetric rational matrix without pivoting; returns (L, d) or raises if not positive definite."""
    n = len(T)
    L = [[Fraction(0)] * n for _ in range(n)]
    d = [Fraction(0)] * n
    for j in range(n):
        s = Fraction(T[j][j]) - sum(L[j][k] ** 2 * d[k] for k in range(j))
        if s <= 0:
            raise ValueError("form is not positive definite")
        d[j] = s
        L[j][j] = Fraction(1)
        for i in range(j + 1, n):
            L[i][j] = (Fraction(T[i][j]) - sum(L[i][k] * L[j][k] * d[k] for k in range(j))) / s
    return L, d


def rational_inverse(T):
    n = len(T)
    A = [[Fraction(x) for x in row] + [Fraction(int(i == j)) for j in range(n)] for i, row in enumerate(T)]
    for c in range(n):
        piv = next((r for r in range(c, n) if A[r][c] != 0), None)
        if piv is None:
            raise ZeroDivisionError("singular matrix")
        A[c], A[piv] = A[piv], A[c]
        p = A[c][c]
        A[c] = [x / p for x in A[c]]
        for r in range(n):
            if r != c and A[r][c] != 0:
                f = A[r][c]
                A[r] = [x - f * y for x, y in zip(A[r], A[c])]
    return [row[n:] for row in A]


def inertia(T) -> Tuple[int, int, int]:
    """(positive, negative, zero) counts of a symmetric rational matrix by exact congruence diagonalization."""
    A = [[Fraction(x) for x in row] for row in T]
    n = len(A)
    pos = neg = 0
    active = list(range(n))
    while active:
        # pick a nonzero diagonal pivot, or create one from an off-diagonal entry
        i = next((k for k in active if A[k][k] != 0), None)
        if i is None:
            pair = next(((k, l) for k in active for l in active if k != l and A[k][l] != 0), None)
            if pair is None:
                break
            k, l = pair
            # row/col k += row/col l makes A[k][k] = 2 A[k][l] + A[l][l] = 2 A[k][l] != 0
            for c in range(n):
                A[k][c] += A[l][c]
            for r in range(n):
                A[r][k] += A[r][l]
            i = k
        p = A[i][i]
        if p > 0:
            pos += 1
        else:
            neg += 1
        for r in active:
            if r != i and A[r][i] != 0:
                f = A[r][i] / p
                for c in range(n):
                    A[r][c] -= f * A[i][c]
        for r in active:
            if r != i:
                A[i][r] = Fraction(0)
                A[r][i] = Fraction(0)
        active.remove(i)
    return pos, neg, n - pos - neg


class HermLattice:
    """Free hermitian O_k-lattice given by its Gram matrix on an O_k-basis."""

    def __init__(self, D: int, gram: Sequence[Sequence[OkElem]], positive: bool = True):
        check_discriminant(D)
        self.D = D
        self.rank = len(gram)
        self.gram = [[_to_ok(x, D) for x in row] for row in gram]
        for row in self.gram:
            if len(row) != self.rank:
                raise ValueError("Gram matrix must be square")
        for i in range(self.rank):
            for j in range(self.rank):
                if self.gram[j][i] != self.gram[i][j].conj():
                    raise ValueError("Gram matrix is not conjugate-symmetric")
                if not self.gram[i][j].is_integral():
                    raise ValueError("Gram entries must lie in O_k")
        self.positive = positive
        self._tg = None
        if positive and self.rank:
            rational_ldl(self.trace_gram())

    @classmethod
    def diagonal(cls, D: int, entries: Sequence[int]) -> "HermLattice":
        r = len(entries)
        g = [[OkElem(entries[i] if i == j else 0, 0, D) for j in range(r)] for i in range(r)]
        return cls(D, g)

    # file format

    def to_json(self) -> dict:
        return {
            "D": self.D,
            "rank": self.rank,
            "gram": [[[int(x.a), int(x.b)] for x in row] for row in self.gram],
        }

    @classmethod
    def from_json(cls, data: dict) -> "HermLattice":
        D = int(data["D"])
        rank = int(data["rank"])
        gram = [[OkElem(a, b, D) for a, b in row] for row in data["gram"]]
        if len(gram) != rank:
            raise ValueError("rank does not match the Gram matrix")
        return cls(D, gram)

    @classmethod
    def load(cls, path) -> "HermLattice":
        with open(path) as fh:
            return cls.from_json(json.load(fh))

    # forms

    def hdet(self) -> Fraction:
        """Determinant of the hermitian Gram matrix (a rational number)."""
        if self.rank == 0:
            return Fraction(1)
        d = _mat_det_field(self.gram)
        if not d.is_rational():
            raise ArithmeticError("hermitian determinant should be rational")
        return d.a

    def zbasis_elems(self) -> List[Tuple[int, OkElem]]:
        """Z-basis {v_i, omega v_i} as (index i, scalar) pairs, ordered v_1, omega v_1, v_2, ..."""
        out = []
        for i in range(self.rank):
            out.append((i, OkElem(1, 0, self.D)))
            out.append((i, omega(self.D)))
        return out

    def trace_gram(self) -> List[List[int]]:
        """Gram matrix of [x, y] = Tr <x, y> on the Z-basis {v_i, omega v_i}."""
        if self._tg is None:
            zb = self.zbasis_elems()
            T = []
            for i, s in zb:
                row = []
                for j, t in zb:
                    v = (s * self.gram[i][j] * t.conj()).trace()
                    assert v.denominator == 1
                    row.append(int(v))
                T.append(row)
            self._tg = T
        return [list(r) for r in self._tg]

    def coords_to_k(self, x: Sequence[int]) -> List[OkElem]:
        """Z-coordinates (length 2r) to O_k-coordinates."""
        return [OkElem(x[2 * i], x[2 * i + 1], self.D) for i in range(self.rank)]

    def herm(self, x: Sequence[OkElem], y: Sequence[OkElem]) -> OkElem:
        tot = OkElem(0, 0, self.D)
        for i in range(self.rank):
            for j in range(self.rank):
                tot = tot + x[i] * self.gram[i][j] * y[j].conj()
        return tot

    def Q(self, x: Sequence[int]) -> Fraction:
        """Q(x) = <x, x> for Z-coordinates x."""
        T = self.trace_gram()
        n = len(T)
        return Fraction(sum(x[i] * T[i][j] * x[j] for i in range(n) for j in range(n)), 2)

    def bilinear(self, x: Sequence, y: Sequence) -> Fraction:
        """[x, y] for rational Z-coordinate vectors."""
        T = self.trace_gram()
        n = len(T)
        return sum(Fraction(x[i]) * T[i][j] * Fraction(y[j]) for i in range(n) for j in range(n))

    def is_self_dual(self) -> bool:
        T = self.trace_gram()
        n = len(T)
        if n == 0:
            return True
        d = _mat_det_field([[Fraction(x) for x in row] for row in T])
        if d == 0:
            raise ZeroDivisionError("singular Gram matrix")
        if abs(d) != self.D ** self.rank:
            return False
        Ti = rational_inverse(T)
        return all((self.D * x).denominator == 1 for row in Ti for x in row)

    # enumeration

    def enumerate(self, bound) -> List[Tuple[Tuple[int, ...], Fraction]]:
        """(Z-coordinates, Q(x)) for all x with Q(x) <= bound, sorted; cached per lattice."""
        bound = Fraction(bound)
        cache = self.__dict__.setdefault("_enum_cache", {})
        for b, pts in cache.items():
            if b >= bound:
                return [pq for pq in pts if pq[1] <= bound] if b > bound else list(pts)
        pts = fincke_pohst(self.trace_gram(), bound * 2, half=True)
        cache.clear()
        cache[bound] = pts
        return list(pts)

    def representation_numbers(self, bound: int) -> Dict[int, int]:
        """m -> #{x : Q(x) = m} for 0 <= m <= bound."""
        counts = {m: 0 for m in range(int(bound) + 1)}
        for _, q in self.enumerate(bound):
            assert q.denominator == 1, "Q must be integral on an O_k-valued hermitian lattice"
            counts[int(q)] += 1
        return counts

    def theta_series(self, order: int) -> QExp:
        counts = self.representation_numbers(order - 1)
        return QExp({m: Fraction(c) for m, c in counts.items()}, 1, order)

    def disc_group(self) -> "DiscGroup":
        if not self.is_self_dual():
            raise ValueError("lattice is not self-dual")
        return DiscGroup.build(self.D, self.gram)


def _to_ok(x, D):
    if isinstance(x, OkElem):
        return x
    if isinstance(x, (list, tuple)):
        return OkElem(x[0], x[1], D)
    return OkElem(x, 0, D)


def fincke_pohst(T, bound2, half: bool = False):
    """All integer x with x^T T x <= bound2 (T positive definite, exact rational arithmetic).

    Returns (x, value) pairs in lexicographic order, value = x^T T x (halved when half=True).
    """
    n = len(T)
    if n == 0:
        return [((), Fraction(0))]
    L, d = rational_ldl(T)
    bound2 = Fraction(bound2)
    # float search with a slack; candidates are filtered by the exact value below
    Lf = [[float(a) for a in row] for row in L]
    df = [float(a) for a in d]
    slack = 1e-7 * (1.0 + float(bound2))
    out = []
    x = [0] * n

    def rec(j, remaining):
        c = -sum(Lf[i][j] * x[i] for i in range(j + 1, n))
        rad = math.sqrt(max(remaining, 0.0) / df[j])
        for v in range(math.ceil(c - rad - 1e-9), math.floor(c + rad + 1e-9) + 1):
            t = df[j] * (v - c) ** 2
            if t <= remaining:
                x[j] = v
                if j == 0:
                    out.append(tuple(x))
                else:
                    rec(j - 1, remaining - t)
        x[j] = 0

    rec(n - 1, float(bound2) + slack)
    integral = all(Fraction(a).denominator == 1 for row in T for a in row)
    res = []
    if integral and out:
        X = np.array(out, dtype=np.int64)
        Ti = np.array([[int(a) for a in row] for row in T], dtype=np.int64)
        vals = np.einsum("ij,jk,ik->i", X, Ti, X)
        for v, val in zip(out, vals.tolist()):
            if val <= bound2:
                res.append((v, Fraction(val, 2) if half else Fraction(val)))
    else:
        for v in out:
            val = Fraction(sum(v[i] * T[i][j] * v[j] for i in range(n) for j in range(n)))
            if val <= bound2:
                res.append((v, val / 2 if half else val))
    res.sort()
    return res


@dataclass
class DiscGroup:
    """Cosets of d^-1 L / L for a free self-dual lattice, mu = sum_i (a_i / delta) v_i."""

    D: int
    reps: List[Tuple[int, ...]]
    qvals: List[Fraction]
    r_mu: List[int]

    @classmethod
    def build(cls, D: int, gram) -> "DiscGroup":
        r = len(gram)
        reps, qvals, rmu = [], [], []
        for idx in range(D ** r):
            a = []
            t = idx
            for _ in range(r):
                a.append(t % D)
                t //= D
            a = tuple(a)
            reps.append(a)
            qvals.append(disc_q(D, gram, a))
            rmu.append(disc_r_mu(D, a))
        return cls(D, reps, qvals, rmu)

    def __len__(self):
        return len(self.reps)

    def index(self, a: Sequence[int]) -> int:
        t = 0
        for x in reversed([x % self.D for x in a]):
            t = t * self.D + x
        return t


def disc_q(D: int, gram, a: Sequence[int]) -> Fraction:
    """Q(mu) mod 1 for mu = sum_i (a_i/delta) v_i: equals a^T G a / D."""
    r = len(a)
    tot = OkElem(0, 0, D)
    for i in range(r):
        for j in range(r):
            tot = tot + gram[i][j] * a[i] * a[j]
    assert tot.is_rational()
    return (tot.a / D) % 1


def disc_r_mu(D: int, a: Sequence[int]) -> int:
    r = 1
    for p in prime_divisors(D):
        if any(x % p for x in a):
            r *= p
    return r


# the hyperbolic extension L = L_{-1} + L_0 + L_1

class FullLattice:
    """L_0 + hyperbolic plane with O_k-basis (v_1..v_r, v, w), <v,v> = <w,w> = 0, <v,w> = 1.

    Distinguished vectors (as k-coordinate vectors in this basis):
      e_{-1} = conj(omega) v, f_{-1} = delta v, e_1 = w, f_1 = (D + delta)/(2D) w.
    """

    def __init__(self, L0: HermLattice, n: int):
        if L0.rank != n - 2:
            raise ValueError("L_0 must have rank n - 2")
        if not L0.is_self_dual():
            raise ValueError("L_0 must be self-dual")
        self.L0 = L0
        self.n = n
        self.D = D = L0.D
        r = L0.rank
        z = OkElem(0, 0, D)
        one = OkElem(1, 0, D)
        g = [[L0.gram[i][j] if i < r and j < r else z for j in range(n)] for i in range(n)]
        g[r][r + 1] = one
        g[r + 1][r] = one
        self.gram = g
        self.lattice = HermLattice(D, g, positive=False)
        delta = sqrt_minus_D(D)
        self.e_m1 = self._vec({r: omega(D).conj()})
        self.f_m1 = self._vec({r: delta})
        self.e_1 = self._vec({r + 1: one})
        self.f_1 = self._vec({r + 1: (OkElem(D, 0, D) + delta) * OkElem(Fraction(1, 2 * D), 0, D)})

    def _vec(self, entries: Dict[int, OkElem]) -> List[OkElem]:
        z = OkElem(0, 0, self.D)
        return [entries.get(i, z) for i in range(self.n)]

    def herm(self, x, y) -> OkElem:
        return self.lattice.herm(x, y)

    def bil(self, x, y) -> Fraction:
        return self.herm(x, y).trace()

    def Qk(self, x) -> Fraction:
        v = self.herm(x, x)
        assert v.is_rational()
        return v.a

    def audit(self) -> Dict[str, bool]:
        D = self.D
        r = self.L0.rank
        checks = {}
        checks["[e-1,e1]=1"] = self.bil(self.e_m1, self.e_1) == 1
        checks["[f-1,f1]=1"] = self.bil(self.f_m1, self.f_1) == 1
        checks["[e-1,f1]=0"] = self.bil(self.e_m1, self.f_1) == 0
        checks["[f-1,e1]=0"] = self.bil(self.f_m1, self.e_1) == 0
        iso = [self.e_m1, self.f_m1, self.e_1, self.f_1]
        checks["isotropic"] = all(self.Qk(x) == 0 for x in iso)
        checks["[L-1,L-1]=0"] = all(self.bil(x, y) == 0 for x in iso[:2] for y in iso[:2])
        ok = True
        for i in range(r):
            for s in (OkElem(1, 0, D), omega(D)):
                u = self._vec({i: s})
                ok &= all(self.bil(x, u) == 0 for x in iso)
        checks["L0 orthogonal"] = ok
        # L_{-1} = Z e_{-1} + Z f_{-1} is the Z-span of {v, omega v}: unimodular change of basis
        checks["L-1 spans O_k v"] = _zspan_det(self.e_m1[r], self.f_m1[r]) in (1, -1)
        # d^-1 L_1 = Z e_1 + Z f_1 spans delta^-1 O_k w; L_1 = Z e_1 + D Z f_1 spans O_k w
        dinv = sqrt_minus_D(D).inverse()
        checks["d^-1 L1 = Z e1 + Z f1"] = _zspan_det(self.e_1[r + 1] / dinv, self.f_1[r + 1] / dinv) in (1, -1)
        checks["L1 = Z e1 + D Z f1"] = _zspan_det(self.e_1[r + 1], self.f_1[r + 1] * D) in (1, -1)
        return checks

    def trace_gram(self) -> List[List[int]]:
        return self.lattice.trace_gram()

    def signature(self) -> Tuple[int, int]:
        p, q, z = inertia(self.trace_gram())
        if z:
            raise ArithmeticError("degenerate trace form")
        return p, q

    def det(self) -> Fraction:
        """Hermitian determinant of the full lattice: -det(L_0)."""
        return self.lattice.hdet()

    def disc_group(self) -> DiscGroup:
        return DiscGroup.build(self.D, self.gram)

    def disc_index_of(self, mu: Sequence[OkElem]) -> int:
        """Coset index of mu in d^-1 L / L (mu given by k-coordinates)."""
        delta = sqrt_minus_D(self.D)
        a = []
        for x in mu:
            y = x * delta
            if not y.is_integral():
                raise ValueError("vector is not in d^-1 L")
            # y in O_k, class of y mod delta O_k is represented by an integer t with y = t mod delta
            a.append(_int_mod_delta(y, self.D))
        return DiscGroup.index(self.disc_group_cached(), a)

    _dg = None

    def disc_group_cached(self) -> DiscGroup:
        if self._dg is None:
            self._dg = self.disc_group()
        return self._dg


def _zspan_det(x: OkElem, y: OkElem) -> Fraction:
    """Determinant of (x, y) in the Z-basis (1, omega)."""
    return x.a * y.b - x.b * y.a


def _int_mod_delta(y: OkElem, D: int) -> int:
    """Integer t with y = t mod delta O_k (omega = (1+delta)/2 = 1/2 = (D+1)/2 mod delta)."""
    t = (int(y.a) + int(y.b) * ((D + 1) // 2)) % D
    return t


def hyperbolic_extend(L0: HermLattice, n: int) -> FullLattice:
    return FullLattice(L0, n)


def brute_representation_numbers(L: HermLattice, bound: int) -> Dict[int, int]:
    """Naive box scan counting x with Q(x) = m, m <= bound (oracle for small rank).

    The box comes from x_i^2 <= 2 bound (T^-1)_ii; the scan loops over the leading half of
    the coordinates and evaluates the trailing half as one numpy grid.
    """
    import itertools

    T = L.trace_gram()
    n = len(T)
    Ti = rational_inverse(T)
    radius = [math.isqrt(int(2 * bound * Ti[i][i]) + 1) + 1 for i in range(n)]
    h = n // 2
    Tn = np.array(T, dtype=np.int64)
    B = np.array(list(itertools.product(*[range(-r, r + 1) for r in radius[h:]])), dtype=np.int64)
    qb = np.einsum("ij,jk,ik->i", B, Tn[h:, h:], B)
    cross = Tn[:h, h:] @ B.T
    counts = np.zeros(2 * bound + 1, dtype=np.int64)
    for a in itertools.product(*[range(-r, r + 1) for r in radius[:h]]):
        av = np.array(a, dtype=np.int64)
        q2 = int(av @ Tn[:h, :h] @ av) + 2 * (av @ cross) + qb
        q2 = q2[q2 <= 2 * bound]
        counts += np.bincount(q2, minlength=2 * bound + 1)
    # Q takes integral values on an integral hermitian lattice
    return {m: int(counts[2 * m]) for m in range(bound + 1)}
