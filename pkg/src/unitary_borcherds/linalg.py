"""Small exact linear algebra over Q and Z."""
from __future__ import annotations

from fractions import Fraction
from math import gcd
from typing import List, Sequence


def rational_rank(rows: Sequence[Sequence]) -> int:
    M = [[Fraction(x) for x in r] for r in rows]
    if not M:
        return 0
    rank = 0
    ncols = len(M[0])
    for c in range(ncols):
        piv = next((i for i in range(rank, len(M)) if M[i][c] != 0), None)
        if piv is None:
            continue
        M[rank], M[piv] = M[piv], M[rank]
        p = M[rank][c]
        for i in range(rank + 1, len(M)):
            if M[i][c] != 0:
                f = M[i][c] / p
                M[i] = [a - f * b for a, b in zip(M[i], M[rank])]
        rank += 1
        if rank == len(M):
            break
    return rank


def _clear_denominators(row: Sequence[Fraction]) -> List[int]:
    den = 1
    for x in row:
        den = den * x.denominator // gcd(den, x.denominator)
    return [int(x * den) for x in row]


def integer_kernel(conditions: Sequence[Sequence], n: int) -> List[List[int]]:
    """A Z-basis of {c in Z^n : sum_j A[i][j] c_j = 0 for every condition row A[i]}.

    Row reduction of [A^T | I] by unimodular integer operations (Hermite style);
    the identity rows attached to zero rows of A^T span the saturated kernel.
    """
    A = [_clear_denominators([Fraction(x) for x in row]) for row in conditions]
    A = [r for r in A if any(r)]
    m = len(A)
    rows = [[A[i][j] for i in range(m)] + [int(j == k) for k in range(n)] for j in range(n)]
    r0 = 0
    for col in range(m):
        while True:
            nz = [i for i in range(r0, n) if rows[i][col] != 0]
            if not nz:
                break
            piv = min(nz, key=lambda i: abs(rows[i][col]))
            rows[r0], rows[piv] = rows[piv], rows[r0]
            done = True
            for i in range(r0 + 1, n):
                if rows[i][col]:
                    q = rows[i][col] // rows[r0][col]
                    rows[i] = [a - q * b for a, b in zip(rows[i], rows[r0])]
                    if rows[i][col]:
                        done = False
            if done:
                r0 += 1
                break
        if r0 == n:
            break
    basis = [row[m:] for row in rows if not any(row[:m])]
    return [_normalize_sign(b) for b in basis]


def _normalize_sign(v: List[int]) -> List[int]:
    for x in v:
        if x:
            return v if x > 0 else [-y for y in v]
    return v


def hermite_reduce(basis: Sequence[Sequence[int]]) -> List[List[int]]:
    """Row-style Hermite normal form of an integer basis (deterministic presentation)."""
    rows = [list(b) for b in basis]
    if not rows:
        return []
    n = len(rows[0])
    r0 = 0
    pivots = []
    for col in range(n):
        while True:
            nz = [i for i in range(r0, len(rows)) if rows[i][col] != 0]
            if not nz:
                break
            piv = min(nz, key=lambda i: abs(rows[i][col]))
            rows[r0], rows[piv] = rows[piv], rows[r0]
            clean = True
            for i in range(r0 + 1, len(rows)):
                if rows[i][col]:
                    q = rows[i][col] // rows[r0][col]
                    rows[i] = [a - q * b for a, b in zip(rows[i], rows[r0])]
                    if rows[i][col]:
                        clean = False
            if clean:
                if rows[r0][col] < 0:
                    rows[r0] = [-a for a in rows[r0]]
                pivots.append((r0, col))
                r0 += 1
                break
        if r0 == len(rows):
            break
    for r, col in pivots:
        p = rows[r][col]
        for i in range(r):
            q = rows[i][col] // p
            if q:
                rows[i] = [a - q * b for a, b in zip(rows[i], rows[r])]
    return [r for r in rows if any(r)]
