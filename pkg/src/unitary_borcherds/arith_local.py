"""Local arithmetic: Kronecker/Jacobi symbols, Hilbert symbols, local invariants,
Weil indices and coset data for Gamma_0(D)."""
from __future__ import annotations

import math
from fractions import Fraction
from typing import Dict, List, Tuple, Union

from .rings import FourthRoot

Place = Union[int, str]  # a prime or "inf"


def factor(n: int) -> Dict[int, int]:
    n = abs(int(n))
    out: Dict[int, int] = {}
    p = 2
    while p * p <= n:
        while n % p == 0:
            out[p] = out.get(p, 0) + 1
            n //= p
        p += 1 if p == 2 else 2
    if n > 1:
        out[n] = out.get(n, 0) + 1
    return out


def prime_divisors(n: int) -> List[int]:
    return sorted(factor(n))


def divisors(n: int) -> List[int]:
    n = abs(n)
    out = [1]
    for p, e in factor(n).items():
        out = [d * p ** k for d in out for k in range(e + 1)]
    return sorted(out)


def is_squarefree(n: int) -> bool:
    return all(e == 1 for e in factor(n).values())


def check_discriminant(D: int) -> None:
    """D must be a squarefree positive integer with D = 3 mod 4 (so -D is a fundamental discriminant)."""
    if D <= 0 or D % 4 != 3 or not is_squarefree(D):
        raise ValueError(f"D={D} must be positive, squarefree and 3 mod 4")


def jacobi(a: int, n: int) -> int:
    """Jacobi symbol (a|n) for odd positive n."""
    if n <= 0 or n % 2 == 0:
        raise ValueError("n must be odd and positive")
    a %= n
    result = 1
    while a:
        while a % 2 == 0:
            a //= 2
            if n % 8 in (3, 5):
                result = -result
        a, n = n, a
        if a % 4 == 3 and n % 4 == 3:
            result = -result
        a %= n
    return result if n == 1 else 0


def kronecker(a: int, n: int) -> int:
    """Kronecker symbol (a|n) for arbitrary integers."""
    if n == 0:
        return 1 if abs(a) == 1 else 0
    result = 1
    if n < 0:
        n = -n
        if a < 0:
            result = -result
    v = 0
    while n % 2 == 0:
        n //= 2
        v += 1
    if v:
        if a % 2 == 0:
            return 0
        if v % 2 and a % 8 in (3, 5):
            result = -result
    if n == 1:
        return result
    return result * jacobi(a, n)


def _split_rational(x: Fraction, p: int) -> Tuple[int, int]:
    """x = p^v * u with u a p-adic unit integer (after clearing square denominators)."""
    x = Fraction(x)
    if x == 0:
        raise ValueError("Hilbert symbol of zero")
    n = x.numerator * x.denominator  # same square class
    v = 0
    while n % p == 0:
        n //= p
        v += 1
    return v, n


def hilbert_symbol(a, b, p: Place) -> int:
    """Hilbert symbol (a,b)_p of nonzero rationals at a prime p or at "inf"."""
    a, b = Fraction(a), Fraction(b)
    if a == 0 or b == 0:
        raise ValueError("Hilbert symbol of zero")
    if p in ("inf", 0, None):
        return -1 if (a < 0 and b < 0) else 1
    p = int(p)
    alpha, u = _split_rational(a, p)
    beta, v = _split_rational(b, p)
    if p == 2:
        eps = lambda x: ((x - 1) // 2) % 2
        omg = lambda x: ((x * x - 1) // 8) % 2
        e = eps(u) * eps(v) + alpha * omg(v) + beta * omg(u)
        return -1 if e % 2 else 1
    sign = -1 if (alpha * beta * ((p - 1) // 2)) % 2 else 1
    return sign * jacobi(u, p) ** beta * jacobi(v, p) ** alpha


def inv_p(det, D: int, p: Place) -> int:
    """Local invariant (det V, -D)_p of a hermitian space."""
    return hilbert_symbol(det, -D, p)


def eps_p(p: int) -> FourthRoot:
    return FourthRoot(0 if p % 4 == 1 else 1)


def weil_index(p: int, n: int, D: int, invariant: int) -> FourthRoot:
    """gamma_p = eps_p^(-n) (D,p)_p^n inv_p for an odd prime p | D."""
    if D % p:
        raise ValueError(f"{p} does not divide {D}")
    h = hilbert_symbol(D, p, p)
    if invariant not in (1, -1):
        raise ValueError("invariant must be +-1")
    sign = h ** n * invariant
    return eps_p(p) ** (-n) * FourthRoot(0 if sign == 1 else 2)


def weil_index_table(D: int, n: int, invariants: Dict[int, int]) -> Dict[int, FourthRoot]:
    """Weil indices gamma_p for every prime p | D."""
    out = {}
    for p in prime_divisors(D):
        if p not in invariants:
            raise ValueError(f"missing local invariant at p={p}")
        out[p] = weil_index(p, n, D, invariants[p])
    return out


def gamma_r(r: int, table: Dict[int, FourthRoot]) -> FourthRoot:
    g = FourthRoot(0)
    for p in prime_divisors(r):
        g = g * table[p]
    return g


def coset_count(D: int) -> int:
    """|Gamma_0(D) \\ SL_2(Z)| for squarefree D."""
    out = 1
    for p in prime_divisors(D):
        out *= p + 1
    return out


def egcd(a: int, b: int) -> Tuple[int, int, int]:
    x0, y0, x1, y1 = 1, 0, 0, 1
    while b:
        q, a, b = a // b, b, a % b
        x0, x1 = x1, x0 - q * x1
        y0, y1 = y1, y0 - q * y1
    return a, x0, y0


def cusp_matrix(r: int, D: int) -> Tuple[int, int, int, int]:
    """Integers (alpha, beta, gamma, delta) with r*alpha*delta - s*beta*gamma = 1, s = D/r.

    R_r = [[alpha, beta], [s gamma, r delta]] in SL_2(Z) and
    W_r = [[r alpha, beta], [D gamma, r delta]] is the Atkin-Lehner matrix.
    """
    s = D // r
    if r == 1:
        return 1, 0, 0, 1
    if r == D:
        return 0, -1, 1, 0
    g, x, y = egcd(r, s)  # r x + s y = 1
    return 1, -y, 1, x


def coset_reps(D: int) -> List[Tuple[int, int, int, int]]:
    """Right coset representatives of Gamma_0(D) in SL_2(Z): R_r T^c for r | D, c mod r."""
    reps = []
    for r in divisors(D):
        a, b, g, d = cusp_matrix(r, D)
        s = D // r
        top = (a, b)
        bot = (s * g, r * d)
        for c in range(r):
            reps.append((top[0], top[0] * c + top[1], bot[0], bot[0] * c + bot[1]))
    return reps


def same_coset(A, B, D: int) -> bool:
    """Whether A B^-1 lies in Gamma_0(D)."""
    a, b, c, d = A
    e, f, g, h = B
    # B^-1 = [[h, -f], [-g, e]]
    lower_left = c * h - d * g
    return lower_left % D == 0
