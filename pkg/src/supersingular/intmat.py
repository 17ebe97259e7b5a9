"""Exact integer and rational matrix routines.

Matrices are tuples (or lists) of rows of Python ints; nothing here ever
touches floating point.  Only the handful of normal forms the lattice code
needs are provided: Bareiss determinants, row-style Hermite normal form,
integer kernels and Smith invariant factors.
"""
from __future__ import annotations

from fractions import Fraction
from math import gcd
from typing import Sequence

Matrix = tuple[tuple[int, ...], ...]


def as_matrix(rows: Sequence[Sequence[int]]) -> Matrix:
    return tuple(tuple(int(x) for x in row) for row in rows)


def identity(n: int) -> Matrix:
    return tuple(tuple(1 if i == j else 0 for j in range(n)) for i in range(n))


def transpose(a: Sequence[Sequence], ncols: int | None = None) -> tuple:
    if not a:
        return tuple(() for _ in range(ncols or 0))
    return tuple(zip(*a))


def matmul(a: Sequence[Sequence], b: Sequence[Sequence]) -> tuple:
    bt = transpose(b)
    return tuple(tuple(sum(x * y for x, y in zip(row, col)) for col in bt) for row in a)


def matvec(a: Sequence[Sequence], v: Sequence) -> tuple:
    return tuple(sum(x * y for x, y in zip(row, v)) for row in a)


def columns(a: Sequence[Sequence], ncols: int) -> list[tuple]:
    return [tuple(row[j] for row in a) for j in range(ncols)]


def from_columns(cols: Sequence[Sequence], nrows: int) -> tuple:
    if not cols:
        return tuple(() for _ in range(nrows))
    return tuple(zip(*cols))


def gram_of(basis_cols: Sequence[Sequence[int]], gram: Sequence[Sequence[int]]) -> Matrix:
    """Gram matrix of the vectors ``basis_cols`` under ``gram``."""
    images = [matvec(gram, v) for v in basis_cols]
    return tuple(tuple(sum(x * y for x, y in zip(u, w)) for w in images) for u in basis_cols)


def det(a: Sequence[Sequence[int]]) -> int:
    """Fraction-free (Bareiss) determinant."""
    n = len(a)
    if n == 0:
        return 1
    m = [list(row) for row in a]
    sign = 1
    prev = 1
    for k in range(n - 1):
        if m[k][k] == 0:
            for i in range(k + 1, n):
                if m[i][k] != 0:
                    m[k], m[i] = m[i], m[k]
                    sign = -sign
                    break
            else:
                return 0
        pivot = m[k][k]
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                m[i][j] = (m[i][j] * pivot - m[i][k] * m[k][j]) // prev
        prev = pivot
    return sign * m[n - 1][n - 1]


def inverse(a: Sequence[Sequence[int]]) -> tuple[tuple[Fraction, ...], ...]:
    """Exact inverse over the rationals.  Raises ZeroDivisionError if singular."""
    n = len(a)
    m = [[Fraction(x) for x in row] + [Fraction(int(i == j)) for j in range(n)]
         for i, row in enumerate(a)]
    for col in range(n):
        piv = next((r for r in range(col, n) if m[r][col] != 0), None)
        if piv is None:
            raise ZeroDivisionError("singular matrix")
        m[col], m[piv] = m[piv], m[col]
        inv = 1 / m[col][col]
        m[col] = [x * inv for x in m[col]]
        for r in range(n):
            if r != col and m[r][col] != 0:
                f = m[r][col]
                m[r] = [x - f * y for x, y in zip(m[r], m[col])]
    return tuple(tuple(row[n:]) for row in m)


def solve(a: Sequence[Sequence], b: Sequence) -> tuple[Fraction, ...] | None:
    """Solve ``a x = b`` exactly for a full-column-rank ``a``; None if inconsistent."""
    rows = len(a)
    ncols = len(a[0]) if rows else 0
    m = [[Fraction(x) for x in row] + [Fraction(b[i])] for i, row in enumerate(a)]
    pivots = []
    r = 0
    for c in range(ncols):
        piv = next((i for i in range(r, rows) if m[i][c] != 0), None)
        if piv is None:
            continue
        m[r], m[piv] = m[piv], m[r]
        inv = 1 / m[r][c]
        m[r] = [x * inv for x in m[r]]
        for i in range(rows):
            if i != r and m[i][c] != 0:
                f = m[i][c]
                m[i] = [x - f * y for x, y in zip(m[i], m[r])]
        pivots.append(c)
        r += 1
    if any(m[i][ncols] != 0 for i in range(r, rows)):
        return None
    if len(pivots) < ncols:
        raise ValueError("matrix is not of full column rank")
    x = [Fraction(0)] * ncols
    for i, c in enumerate(pivots):
        x[c] = m[i][ncols]
    return tuple(x)


def rational_rank(a: Sequence[Sequence]) -> int:
    m = [[Fraction(x) for x in row] for row in a]
    if not m:
        return 0
    rank = 0
    for c in range(len(m[0])):
        piv = next((i for i in range(rank, len(m)) if m[i][c] != 0), None)
        if piv is None:
            continue
        m[rank], m[piv] = m[piv], m[rank]
        for i in range(rank + 1, len(m)):
            if m[i][c] != 0:
                f = m[i][c] / m[rank][c]
                m[i] = [x - f * y for x, y in zip(m[i], m[rank])]
        rank += 1
    return rank


def _echelon(rows: list[list[int]], ncols: int) -> list[list[int]]:
    """Integer row echelon form by unimodular row operations (in place)."""
    r = 0
    for c in range(ncols):
        while True:
            nz = [i for i in range(r, len(rows)) if rows[i][c] != 0]
            if not nz:
                break
            best = min(nz, key=lambda i: abs(rows[i][c]))
            rows[r], rows[best] = rows[best], rows[r]
            done = True
            for i in range(r + 1, len(rows)):
                if rows[i][c] != 0:
                    q = rows[i][c] // rows[r][c]
                    rows[i] = [x - q * y for x, y in zip(rows[i], rows[r])]
                    if rows[i][c] != 0:
                        done = False
            if done:
                break
        if any(rows[i][c] != 0 for i in range(r, len(rows))):
            r += 1
            if r == len(rows):
                break
    return rows


def hnf(rows: Sequence[Sequence[int]], ncols: int | None = None) -> Matrix:
    """Row Hermite normal form: nonzero rows only, positive pivots, reduced above."""
    if ncols is None:
        ncols = len(rows[0]) if rows else 0
    m = _echelon([list(r) for r in rows], ncols)
    m = [row for row in m if any(row)]
    for i, row in enumerate(m):
        c = next(j for j, x in enumerate(row) if x != 0)
        if row[c] < 0:
            m[i] = row = [-x for x in row]
        for k in range(i):
            q = m[k][c] // row[c]
            if q:
                m[k] = [x - q * y for x, y in zip(m[k], row)]
    return as_matrix(m)


def kernel(a: Sequence[Sequence[int]], ncols: int) -> Matrix:
    """Integer basis (in Hermite form, as rows) of ``{x in Z^ncols : a x = 0}``."""
    nrows = len(a)
    aug = [[a[i][j] for i in range(nrows)] + [int(j == k) for k in range(ncols)]
           for j in range(ncols)]
    aug = _echelon(aug, nrows)
    ker = [row[nrows:] for row in aug if not any(row[:nrows])]
    return hnf(ker, ncols) if ker else ()


def left_kernel(a: Sequence[Sequence[int]], ncols: int) -> Matrix:
    """Integer basis of ``{y : y^T a = 0}`` where ``a`` has ``len(a)`` rows."""
    return kernel(transpose(a, ncols), len(a))


def smith_invariants(a: Sequence[Sequence[int]]) -> tuple[int, ...]:
    """Invariant factors d1 | d2 | ... of a square integer matrix (zeros for rank loss)."""
    m = [list(row) for row in a]
    n = len(m)
    cols = len(m[0]) if n else 0
    out = []
    t = 0
    while t < min(n, cols):
        nz = [(abs(m[i][j]), i, j) for i in range(t, n) for j in range(t, cols) if m[i][j]]
        if not nz:
            break
        _, i, j = min(nz)
        m[t], m[i] = m[i], m[t]
        for row in m:
            row[t], row[j] = row[j], row[t]
        while True:
            changed = False
            for i in range(t + 1, n):
                if m[i][t]:
                    q = m[i][t] // m[t][t]
                    m[i] = [x - q * y for x, y in zip(m[i], m[t])]
                    if m[i][t]:
                        m[t], m[i] = m[i], m[t]
                        changed = True
            for j in range(t + 1, cols):
                if m[t][j]:
                    q = m[t][j] // m[t][t]
                    for row in m:
                        row[j] -= q * row[t]
                    if m[t][j]:
                        for row in m:
                            row[t], row[j] = row[j], row[t]
                        changed = True
            if changed:
                continue
            piv = m[t][t]
            bad = next(((i, j) for i in range(t + 1, n) for j in range(t + 1, cols)
                        if m[i][j] % piv), None)
            if bad is None:
                break
            m[t] = [x + y for x, y in zip(m[t], m[bad[0]])]
        out.append(abs(m[t][t]))
        t += 1
    out.extend([0] * (min(n, cols) - len(out)))
    return tuple(out)


def lcm(a: int, b: int) -> int:
    return a // gcd(a, b) * b if a and b else 0


def is_integral(fracs) -> bool:
    return all(Fraction(x).denominator == 1 for x in fracs)
