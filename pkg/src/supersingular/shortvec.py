"""Vectors of a given norm in a definite lattice (Fincke-Pohst with exact arithmetic).

The positive definite form A is written as
``sum_i d_i (x_i + sum_{j>i} mu_ij x_j)^2`` with rational d, mu.  Clearing
denominators row by row and then globally gives integers E, M, W, R with
``sum_i W_i (E_i x_i + sum_{j>i} M_ij x_j)^2 == R`` exactly when
``x^T A x == |t|``; the kernels enumerate that integer problem.
"""
from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from math import isqrt

from . import _kernels, intmat
from .errors import LatticeError
from .intmat import lcm
from .lattice import IntegerLattice, signature


@dataclass(frozen=True)
class ScaledCholesky:
    n: int
    E: tuple[int, ...]
    M: tuple[tuple[int, ...], ...]
    W: tuple[int, ...]
    scale: int                 # R = scale * target norm
    coord_bounds: tuple[int, ...]


def scaled_cholesky(a) -> ScaledCholesky:
    n = len(a)
    q = [[Fraction(x) for x in row] for row in a]
    for i in range(n):
        if q[i][i] <= 0:
            raise LatticeError("form is not positive definite")
        for j in range(i + 1, n):
            q[j][i] = q[i][j]
            q[i][j] = q[i][j] / q[i][i]
        for k in range(i + 1, n):
            for l in range(k, n):
                q[k][l] -= q[k][i] * q[i][l]
    E, M, coef = [], [], []
    for i in range(n):
        c = 1
        for j in range(i + 1, n):
            c = lcm(c, q[i][j].denominator)
        E.append(c)
        M.append(tuple(int(q[i][j] * c) if j > i else 0 for j in range(n)))
        coef.append(q[i][i] / (c * c))
    S = 1
    for f in coef:
        S = lcm(S, f.denominator)
    W = tuple(int(f * S) for f in coef)
    inv = intmat.inverse(a)
    # Cauchy-Schwarz: x_j^2 <= norm * (A^-1)_jj, recorded per unit norm
    bounds = tuple(int(inv[j][j].numerator // inv[j][j].denominator) + 1 for j in range(n))
    return ScaledCholesky(n, tuple(E), tuple(M), W, S, bounds)


def _top_range(ch: ScaledCholesky, R: int) -> tuple[int, int]:
    i = ch.n - 1
    U = isqrt(R // ch.W[i])
    return -(U // ch.E[i]), U // ch.E[i]


def _fits(ch: ScaledCholesky, norm: int) -> bool:
    R = ch.scale * norm
    X = [isqrt(norm * b) + 1 for b in ch.coord_bounds]
    worst = max((sum(abs(ch.M[i][j]) * X[j] for j in range(ch.n)) + ch.E[i] * X[i])
                for i in range(ch.n))
    return _kernels.fits_int64(R, worst, max(ch.W))


def _run(args):
    ch, R, lo, hi, backend, safe = args
    with _kernels.use_backend(backend):
        return _kernels.short_vectors(ch.n, ch.E, ch.M, ch.W, R, lo, hi, safe_int64=safe)


def vectors_of_norm(a, norm: int, workers: int = 1) -> list[tuple[int, ...]]:
    """All integer x with x^T a x == norm for a positive definite integer matrix a, sorted."""
    n = len(a)
    if n == 0 or norm <= 0:
        return []
    ch = scaled_cholesky(a)
    R = ch.scale * norm
    safe = _fits(ch, norm)
    lo, hi = _top_range(ch, R)
    if workers > 1 and hi > lo:
        span = hi - lo + 1
        step = -(-span // workers)
        jobs = [(ch, R, s, min(s + step - 1, hi), _kernels.BACKEND, safe)
                for s in range(lo, hi + 1, step)]
        with ProcessPoolExecutor(max_workers=workers) as ex:
            found = [v for part in ex.map(_run, jobs) for v in part]
    else:
        found = _kernels.short_vectors(n, ch.E, ch.M, ch.W, R, None, None, safe_int64=safe)
    return sorted(found)


def definite_sign(L: IntegerLattice) -> int:
    """+1 for positive definite, -1 for negative definite; LatticeError otherwise."""
    plus, minus = signature(L)
    if minus == 0:
        return 1
    if plus == 0:
        return -1
    raise LatticeError(f"lattice of signature ({plus},{minus}) is indefinite")


def enumerate_norm_vectors(L: IntegerLattice, t: int, workers: int = 1) -> list[tuple[int, ...]]:
    """Every v in L with <v, v> = t, for negative definite L and t < 0, sorted."""
    if L.rank == 0:
        return []
    if definite_sign(L) != -1:
        raise LatticeError("norm enumeration needs a negative definite lattice")
    if t >= 0:
        raise LatticeError("target norm must be negative")
    a = [[-x for x in row] for row in L.gram]
    return vectors_of_norm(a, -t, workers)


def has_minus_two_root(L: IntegerLattice) -> bool:
    return bool(enumerate_norm_vectors(L, -2)) if L.rank else False
