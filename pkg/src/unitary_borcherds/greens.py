"""Green function constituents: beta(v) = Gamma(0, v), the majorant R(x, z) and the truncated
lattice sum Xi(m, v, z) = sum_{Q(x) = m} beta(2 pi v R(x, z))."""
from __future__ import annotations

import math
import random
from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

import numpy as np

from .hermlat import FullLattice

EULER_GAMMA = 0.57721566490153286061


def beta(v: float) -> float:
    """Gamma(0, v) = int_1^oo e^(-v t) dt / t for v > 0."""
    if not v > 0:
        raise ValueError("beta needs v > 0")
    if v <= 1.0:
        # E_1(v) = -gamma - log v - sum_{k>=1} (-v)^k / (k k!)
        s = 0.0
        term = 1.0
        k = 1
        while True:
            term *= -v / k
            add = term / k
            s += add
            if abs(add) < 1e-17 * max(abs(s), 1e-300):
                break
            k += 1
        return -EULER_GAMMA - math.log(v) - s
    # modified Lentz for E_1(v) = e^-v / (v + 1 - 1/(v + 3 - 4/(v + 5 - ...)))
    tiny = 1e-300
    b = v + 1.0
    c = 1.0 / tiny
    d = 1.0 / b
    h = d
    for i in range(1, 1000):
        a = -float(i * i)
        b += 2.0
        d = 1.0 / (a * d + b)
        c = b + a / c
        delta = c * d
        h *= delta
        if abs(delta - 1.0) < 1e-16:
            break
    return h * math.exp(-v)


def tilde_gamma0(t: float) -> float:
    """Gamma(0, t) for t > 0, extended by 0 at t = 0."""
    if t < 0:
        raise ValueError("t must be nonnegative")
    if t == 0:
        return 0.0
    return beta(t)


class DivisorProximityError(ArithmeticError):
    """The point lies (numerically) on the divisor: some x with Q(x) = m has R(x, z) ~ 0."""


@dataclass
class DomainPoint:
    """A negative vector w in V(C), by complex coordinates in the O_k-basis of the full lattice."""

    F: FullLattice
    w: np.ndarray

    def __post_init__(self):
        self.w = np.asarray(self.w, dtype=complex)
        if self.w.shape != (self.F.n,):
            raise ValueError("coordinate vector has the wrong length")
        nw = self.norm()
        if not nw < 0:
            raise ValueError(f"<w, w> = {nw} must be negative")

    def gram(self) -> np.ndarray:
        return np.array([[g.to_complex() for g in row] for row in self.F.gram])

    def norm(self) -> float:
        G = self.gram()
        return float((self.w @ G @ self.w.conj()).real)

    @classmethod
    def generic(cls, F: FullLattice, seed: int = 0, scale: float = 0.1) -> "DomainPoint":
        """v - w_h plus a small random perturbation (v, w_h the hyperbolic basis vectors)."""
        rng = random.Random(seed)
        n = F.n
        w = np.zeros(n, dtype=complex)
        for i in range(n):
            w[i] = complex(rng.uniform(-scale, scale), rng.uniform(-scale, scale))
        w[n - 2] += 1.0
        w[n - 1] -= 1.0
        return cls(F, w)

    @classmethod
    def from_tube(cls, F: FullLattice, tau: complex, w0: Sequence[complex], xi: complex) -> "DomainPoint":
        """w = -xi e_{-1} + (tau xi - Q(w0)) f_{-1} + w0 + tau e_1 + f_1."""
        n = F.n
        r = n - 2
        G0 = np.array([[F.gram[i][j].to_complex() for j in range(r)] for i in range(r)])
        w0 = np.asarray(w0, dtype=complex)
        qw0 = complex(w0 @ G0 @ w0.conj()) if r else 0j
        w = np.zeros(n, dtype=complex)
        w[:r] = w0
        w = w + (-xi) * _vec(F.e_m1) + (tau * xi - qw0) * _vec(F.f_m1) + tau * _vec(F.e_1) + _vec(F.f_1)
        return cls(F, w)


def _vec(v) -> np.ndarray:
    return np.array([x.to_complex() for x in v])


def _zbasis(F: FullLattice) -> np.ndarray:
    """Complex O_k-coordinates of the Z-basis (v_i, omega v_i) of the full lattice, one row each."""
    n = F.n
    om = complex(0.5, math.sqrt(F.D) / 2)
    rows = []
    for i in range(n):
        for s in (1.0, om):
            e = np.zeros(n, dtype=complex)
            e[i] = s
            rows.append(e)
    return np.array(rows)


def r_majorant(x: Sequence[int], z: DomainPoint) -> float:
    """R(x, z) = -2 |<x, w>|^2 / <w, w> for x given by Z-coordinates."""
    U = _zbasis(z.F)
    xv = np.asarray(x, dtype=float) @ U
    G = z.gram()
    h = complex(xv @ G @ z.w.conj())
    return -2.0 * abs(h) ** 2 / z.norm()


def majorant_matrix(z: DomainPoint) -> Tuple[np.ndarray, np.ndarray]:
    """(T/2, Rmat): Q(x) = x^T (T/2) x and R(x, z) = x^T Rmat x on Z-coordinates."""
    T = np.array(z.F.trace_gram(), dtype=float)
    U = _zbasis(z.F)
    c = U @ z.gram() @ z.w.conj()
    Rmat = -2.0 * np.real(np.outer(c, c.conj())) / z.norm()
    return T / 2.0, Rmat


def _enumerate_float(P: np.ndarray, bound: float) -> List[Tuple[int, ...]]:
    """Integer x with x^T P x <= bound (P positive definite), by Fincke-Pohst with a small slack."""
    n = len(P)
    try:
        Lc = np.linalg.cholesky(P)
    except np.linalg.LinAlgError as exc:
        raise ArithmeticError("majorant form is not positive definite") from exc
    # q(x) = sum_j d_j (x_j + sum_{i>j} mu_ij x_i)^2 from P = R^T R with R upper triangular
    R = Lc.T
    d = np.diag(R) ** 2
    mu = R / np.diag(R)[:, None]
    out = []
    x = [0] * n
    slack = 1e-9 * (1.0 + bound)

    def rec(j, remaining):
        cen = -sum(mu[j][i] * x[i] for i in range(j + 1, n))
        rad = math.sqrt(max(remaining, 0.0) / d[j])
        for v in range(math.ceil(cen - rad), math.floor(cen + rad) + 1):
            t = d[j] * (v + sum(mu[j][i] * x[i] for i in range(j + 1, n))) ** 2
            if t <= remaining:
                x[j] = v
                if j == 0:
                    out.append(tuple(x))
                else:
                    rec(j - 1, remaining - t)
        x[j] = 0

    # coordinates are eliminated from the last one down
    rec(n - 1, bound + slack)
    return out


@dataclass
class XiResult:
    value: float
    tail: float
    count: int
    min_R: float


def _shell_terms(m: int, v: float, z: DomainPoint, bound: float):
    Qh, Rmat = majorant_matrix(z)
    P = Qh + Rmat
    T = np.array(z.F.trace_gram(), dtype=np.int64)
    pts = _enumerate_float(P, bound)
    if not pts:
        return []
    X = np.array(pts, dtype=np.int64)
    q2 = np.einsum("ij,jk,ik->i", X, T, X)
    sel = X[q2 == 2 * m]
    out = []
    for x in sel:
        if not x.any():
            continue
        xf = x.astype(float)
        R = float(xf @ Rmat @ xf)
        maj = m + R
        if maj <= 0:
            raise ArithmeticError("majorant not positive on a nonzero vector")
        if maj <= bound:
            out.append((R, maj))
    return out


def xi_green(m: int, v: float, z: DomainPoint, bound: float, threshold: float = 1e-10,
             safety: float = 4.0) -> XiResult:
    """Truncated Xi(m, v, z) over x != 0 with Q(x) = m and Q(x) + R(x, z) <= bound, with a tail estimate."""
    if not v > 0:
        raise ValueError("v must be positive")
    terms = _shell_terms(m, v, z, bound)
    if not terms:
        return XiResult(0.0, _tail_estimate([], m, v, bound, z.F.n, safety), 0, math.inf)
    Rs = sorted(r for r, _ in terms)
    if Rs[0] < threshold:
        raise DivisorProximityError(f"R(x, z) = {Rs[0]:.3e} below {threshold}: z lies on the divisor")
    vals = sorted(beta(2 * math.pi * v * r) for r in Rs)
    value = math.fsum(vals)
    tail = _tail_estimate([mj for _, mj in terms], m, v, bound, z.F.n, safety)
    return XiResult(value, tail, len(terms), Rs[0])


def _tail_estimate(majs: List[float], m: int, v: float, bound: float, n: int, safety: float) -> float:
    """safety * int_bound^oo beta(2 pi v (t - m)) dN(t) with N(t) ~ C t^p fitted to the counts.

    The growth exponent p is n - 1 (the shell Q = m is a hyperboloid of real dimension 2n - 1
    in signature (2n - 2, 2)); C is the largest ratio N(t) / t^p over the enumerated range.
    """
    p = n - 1
    if majs:
        ms = sorted(majs)
        C = max((i + 1) / t ** p for i, t in enumerate(ms))
    else:
        C = 1.0 / max(bound, 1.0) ** p
    a = 2 * math.pi * v
    # integrate on a geometric grid in s = t - m beyond bound - m
    s0 = max(bound - m, 1e-12)
    grid = s0 * np.exp(np.linspace(0.0, math.log(1e3 + 1e3 / (a * s0)), 4000))
    t = grid + m
    dens = C * p * t ** (p - 1)
    f = np.array([math.exp(-a * s) / (a * s) for s in grid]) * dens
    integral = float(np.sum(0.5 * (f[1:] + f[:-1]) * np.diff(grid)))
    return safety * integral
