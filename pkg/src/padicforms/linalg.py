"""Small exact linear algebra over F_p, Z/p^K and Q (pure Python, tiny sizes)."""

from __future__ import annotations

from fractions import Fraction
from typing import Sequence

from .arith import valuation
from .errors import NotAUnit


def row_echelon_mod_p(rows: Sequence[Sequence[int]], p: int) -> tuple[int, list[int]]:
    """Rank of a matrix over F_p and the pivot columns of its echelon form."""
    M = [[v % p for v in row] for row in rows]
    if not M:
        return 0, []
    ncols = len(M[0])
    rank = 0
    pivots = []
    for col in range(ncols):
        piv = next((r for r in range(rank, len(M)) if M[r][col]), None)
        if piv is None:
            continue
        M[rank], M[piv] = M[piv], M[rank]
        inv = pow(M[rank][col], -1, p)
        M[rank] = [v * inv % p for v in M[rank]]
        for r in range(len(M)):
            if r != rank and M[r][col]:
                c = M[r][col]
                M[r] = [(a - c * b) % p for a, b in zip(M[r], M[rank])]
        pivots.append(col)
        rank += 1
        if rank == len(M):
            break
    return rank, pivots


def rank_mod_p(rows: Sequence[Sequence[int]], p: int) -> int:
    return row_echelon_mod_p(rows, p)[0]


def solve_fraction(A: Sequence[Sequence[int]], b: Sequence[int]) -> list[Fraction]:
    """Solve the square system A x = b exactly over Q (A must be invertible)."""
    n = len(A)
    M = [[Fraction(v) for v in row] + [Fraction(bi)] for row, bi in zip(A, b)]
    for col in range(n):
        piv = next((r for r in range(col, n) if M[r][col] != 0), None)
        if piv is None:
            raise ZeroDivisionError("singular matrix")
        M[col], M[piv] = M[piv], M[col]
        pv = M[col][col]
        M[col] = [v / pv for v in M[col]]
        for r in range(n):
            if r != col and M[r][col] != 0:
                c = M[r][col]
                M[r] = [a - c * b for a, b in zip(M[r], M[col])]
    return [M[r][n] for r in range(n)]


def det(A: Sequence[Sequence[int]]) -> int:
    """Exact integer determinant (Bareiss)."""
    n = len(A)
    if n == 0:
        return 1
    M = [list(map(int, row)) for row in A]
    sign = 1
    prev = 1
    for k in range(n - 1):
        if M[k][k] == 0:
            swap = next((r for r in range(k + 1, n) if M[r][k]), None)
            if swap is None:
                return 0
            M[k], M[swap] = M[swap], M[k]
            sign = -sign
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                M[i][j] = (M[i][j] * M[k][k] - M[i][k] * M[k][j]) // prev
        prev = M[k][k]
    return sign * M[n - 1][n - 1]


def fraction_mod(x: Fraction, p: int, K: int) -> int:
    """Image of a p-integral rational in Z/p^K."""
    x = Fraction(x)
    if x == 0:
        return 0
    num, den = x.numerator, x.denominator
    vd = valuation(den, p)
    if vd:
        if num % p**vd:
            raise NotAUnit(f"{x} is not p-integral for p = {p}")
        num //= p**vd
        den //= p**vd
    mod = p**K
    return num * pow(den, -1, mod) % mod
