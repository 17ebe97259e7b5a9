"""Brute-force re-computations used to certify the optimized code.

Nothing here calls the enumerators, the group search or the finite-field
module of the package: the oracle carries its own rational elimination, its
own polynomial arithmetic for F_{p^m} and plain box or Grassmannian scans.
Costs are exponential on purpose; budgets guard against runaway inputs.
"""
from __future__ import annotations

from fractions import Fraction
from itertools import combinations, product
from math import gcd, isqrt

import numpy as np

from .errors import CapExceeded, DomainError

BOX_BUDGET = 10 ** 9
SCAN_BUDGET = 10 ** 6


# -- rational helpers -----------------------------------------------------------

def _inverse_diagonal(a):
    """Diagonal of a^-1 by Gauss-Jordan over Q."""
    n = len(a)
    m = [[Fraction(x) for x in row] + [Fraction(int(i == j)) for j in range(n)]
         for i, row in enumerate(a)]
    for c in range(n):
        piv = next((r for r in range(c, n) if m[r][c] != 0), None)
        if piv is None:
            raise DomainError("singular Gram matrix")
        m[c], m[piv] = m[piv], m[c]
        f = m[c][c]
        m[c] = [x / f for x in m[c]]
        for r in range(n):
            if r != c and m[r][c] != 0:
                g = m[r][c]
                m[r] = [x - g * y for x, y in zip(m[r], m[c])]
    return [m[i][n + i] for i in range(n)]


def _det(a):
    m = [[Fraction(x) for x in row] for row in a]
    n, d = len(m), Fraction(1)
    for c in range(n):
        piv = next((r for r in range(c, n) if m[r][c] != 0), None)
        if piv is None:
            return 0
        if piv != c:
            m[c], m[piv] = m[piv], m[c]
            d = -d
        d *= m[c][c]
        for r in range(c + 1, n):
            f = m[r][c] / m[c][c]
            m[r] = [x - f * y for x, y in zip(m[r], m[c])]
    return int(d)


def minors_gcd(matrix) -> int:
    """gcd of the maximal minors of an n x r integer matrix (1 iff the columns are primitive)."""
    n = len(matrix)
    r = len(matrix[0]) if n else 0
    g = 0
    for rows in combinations(range(n), r):
        g = gcd(g, _det([[matrix[i][j] for j in range(r)] for i in rows]))
    return abs(g)


# -- box-roots ------------------------------------------------------------------

def box_roots(gram, norm: int, budget: int = BOX_BUDGET) -> list[tuple[int, ...]]:
    """Every x with x^T gram x == norm, found by scanning a coordinate box.

    The box comes from |x_j|^2 <= |norm| * (A^-1)_jj for the definite form
    A = +-gram.  The quadratic form is evaluated block-wise with numpy:
    the first half of the coordinates against all of the second half.
    """
    n = len(gram)
    if n == 0 or norm == 0:
        return []
    sign = 1 if norm > 0 else -1
    a = [[sign * x for x in row] for row in gram]
    diag = _inverse_diagonal(a)
    if any(d <= 0 for d in diag):
        raise DomainError("box search needs a definite form of the same sign as the norm")
    t = abs(norm)
    bounds = [isqrt(int(t * d)) for d in diag]
    size = 1
    for b in bounds:
        size *= 2 * b + 1
    if size > budget:
        raise CapExceeded(f"box of {size} points exceeds the oracle budget {budget}")
    h = n // 2
    A = np.array(a, dtype=np.int64)
    # product() of no ranges yields one empty tuple, so h == 0 gives a 1 x 0 block
    left = np.array(list(product(*[range(-b, b + 1) for b in bounds[:h]])),
                    dtype=np.int64).reshape(-1 if h else 1, h)
    right = np.array(list(product(*[range(-b, b + 1) for b in bounds[h:]])),
                     dtype=np.int64).reshape(-1, n - h)
    A11, A12, A22 = A[:h, :h], A[:h, h:], A[h:, h:]
    q_left = np.einsum("ij,jk,ik->i", left, A11, left)
    q_right = np.einsum("ij,jk,ik->i", right, A22, right)
    cross = left @ A12
    found = []
    step = max(1, 4_000_000 // max(1, len(right)))
    for s in range(0, len(left), step):
        tot = q_left[s:s + step, None] + 2 * (cross[s:s + step] @ right.T) + q_right[None, :]
        for i, j in zip(*np.nonzero(tot == t)):
            found.append(tuple(int(x) for x in left[s + i]) + tuple(int(x) for x in right[j]))
    return sorted(found)


# -- F_{p^m} by explicit polynomials -----------------------------------------------

def _poly_divides(g, f, p):
    """Does the monic polynomial g divide f (coefficient lists, low degree first)?"""
    f = list(f)
    dg = len(g) - 1
    for k in range(len(f) - 1, dg - 1, -1):
        c = f[k] % p
        if c:
            for i in range(dg + 1):
                f[k - dg + i] = (f[k - dg + i] - c * g[i]) % p
    return all(x % p == 0 for x in f[:dg])


def _irreducible(low, p):
    f = list(low) + [1]
    m = len(low)
    for d in range(1, m // 2 + 1):
        for cs in product(range(p), repeat=d):
            if _poly_divides(list(cs) + [1], f, p):
                return False
    return True


def oracle_modulus(p: int, m: int) -> tuple[int, ...]:
    """Monic irreducible of degree m with the smallest code c0 + c1 p + ..."""
    for code in range(p ** m):
        low = tuple((code // p ** i) % p for i in range(m))
        if m == 1 or _irreducible(low, p):
            return low
    raise DomainError(f"no irreducible polynomial of degree {m} over F_{p}")


class PolyField:
    """F_{p^m} with elements as integer codes; multiplication tabulated from polynomials."""

    def __init__(self, p: int, m: int):
        self.p, self.m, self.q = p, m, p ** m
        self.modulus = oracle_modulus(p, m)
        q = self.q
        self.mul = [[self._polymul(a, b) for b in range(q)] for a in range(q)]
        self.add = [[self._enc([(x + y) % p for x, y in zip(self.coeffs(a), self.coeffs(b))])
                     for b in range(q)] for a in range(q)]
        self.neg = [self._enc([(-x) % p for x in self.coeffs(a)]) for a in range(q)]
        self.inv = [0] * q
        for a in range(1, q):
            self.inv[a] = next(b for b in range(1, q) if self.mul[a][b] == 1)
        self.frob = [self._power(a, p) for a in range(q)]

    def coeffs(self, a):
        return tuple((a // self.p ** i) % self.p for i in range(self.m))

    def _enc(self, cs):
        return sum(c * self.p ** i for i, c in enumerate(cs))

    def _polymul(self, a, b):
        p, m = self.p, self.m
        x, y = self.coeffs(a), self.coeffs(b)
        res = [0] * (2 * m)
        for i in range(m):
            for j in range(m):
                res[i + j] += x[i] * y[j]
        for k in range(2 * m - 1, m - 1, -1):
            c = res[k] % p
            res[k] = 0
            for i in range(m):
                res[k - m + i] -= c * self.modulus[i]
        return self._enc([r % p for r in res[:m]])

    def _power(self, a, e):
        r = 1
        for _ in range(e):
            r = self._polymul(r, a)
        return r

    def dot(self, u, gram, v):
        s = 0
        for i, x in enumerate(u):
            if not x:
                continue
            for j, y in enumerate(v):
                g = gram[i][j] % self.p
                if y and g:
                    s = self.add[s][self.mul[self.mul[x][y]][g]]
        return s

    def rref(self, rows, ncols):
        m = [list(r) for r in rows]
        r = 0
        for c in range(ncols):
            piv = next((i for i in range(r, len(m)) if m[i][c]), None)
            if piv is None:
                continue
            m[r], m[piv] = m[piv], m[r]
            iv = self.inv[m[r][c]]
            m[r] = [self.mul[iv][x] for x in m[r]]
            for i in range(len(m)):
                if i != r and m[i][c]:
                    f = self.neg[m[i][c]]
                    m[i] = [self.add[x][self.mul[f][y]] for x, y in zip(m[i], m[r])]
            r += 1
        return tuple(tuple(row) for row in m[:r])

    def rank(self, rows, ncols):
        return len(self.rref(rows, ncols))

    def as_coeffs(self, rows):
        return tuple(tuple(self.coeffs(x) for x in row) for row in rows)


# -- iso-subspaces ------------------------------------------------------------------

def iso_subspaces(p: int, gram, k: int | None = None, first_only: bool = False):
    """All k-dimensional totally isotropic subspaces of F_p^n (default k = n/2), as RREF rows.

    Exhaustive: isotropic vectors are listed and grown into isotropic sets
    one orthogonal vector at a time; spans are deduplicated by their RREF.
    """
    n = len(gram)
    k = n // 2 if k is None else k
    if k == 0:
        return [()]
    V = np.array(list(product(range(p), repeat=n)), dtype=np.int64)[1:]
    G = np.array(gram, dtype=np.int64) % p
    B = (V @ G @ V.T) % p
    iso = np.nonzero(np.diagonal(B) == 0)[0]
    F = PolyField(p, 1)
    found = set()

    def grow(chosen):
        if len(chosen) == k:
            found.add(F.rref([tuple(int(x) for x in V[i]) for i in chosen], n))
            return first_only
        ok = iso[np.all(B[np.ix_(iso, chosen)] == 0, axis=1)] if chosen else iso
        for j in ok:
            if chosen and j <= chosen[-1]:
                continue
            rows = [tuple(int(x) for x in V[i]) for i in chosen + [int(j)]]
            if F.rank(rows, n) == len(rows) and grow(chosen + [int(j)]):
                return True
        return False

    grow([])
    return sorted(found)


# -- gen-census ----------------------------------------------------------------------

def _rref_cells(n, k, q, budget):
    total = 0
    cells = []
    for piv in combinations(range(n), k):
        free = [(r, c) for r in range(k) for c in range(piv[r] + 1, n) if c not in piv]
        total += q ** len(free)
        cells.append((piv, free))
    if total > budget:
        raise CapExceeded(f"Grassmannian has {total} points, above the oracle budget {budget}")
    return cells


def gen_census(p: int, m: int, gram, budget: int = SCAN_BUDGET) -> dict:
    """Scan every half-dimensional subspace of F_{p^m}^n and sort them by type.

    Returns sorted lists (RREF rows of coefficient tuples) under the keys
    ``isotropic``, ``characteristic`` and ``strict``.
    """
    n = len(gram)
    if n % 2:
        raise DomainError("ambient dimension must be even")
    k = n // 2
    F = PolyField(p, m)
    out = {"isotropic": [], "characteristic": [], "strict": []}
    for piv, free in _rref_cells(n, k, F.q, budget):
        for vals in product(range(F.q), repeat=len(free)):
            rows = [[0] * n for _ in range(k)]
            for r, c in enumerate(piv):
                rows[r][c] = 1
            for (r, c), x in zip(free, vals):
                rows[r][c] = x
            if any(F.dot(rows[a], gram, rows[b]) for a in range(k) for b in range(a, k)):
                continue
            key = F.as_coeffs(rows)
            out["isotropic"].append(key)
            img = [[F.frob[x] for x in row] for row in rows]
            if F.rank(rows + img, n) != k + 1:
                continue
            out["characteristic"].append(key)
            span = F.rref(rows, n)
            while True:
                bigger = F.rref(list(span) + [[F.frob[x] for x in row] for row in span], n)
                if len(bigger) == len(span):
                    break
                span = bigger
            if len(span) == n:
                out["strict"].append(key)
    return {key: sorted(v) for key, v in out.items()}


# -- group-expand ---------------------------------------------------------------------

def _matmul(a, b):
    return tuple(tuple(sum(a[i][k] * b[k][j] for k in range(len(b))) for j in range(len(b[0])))
                 for i in range(len(a)))


def group_expand(gram, cap: int = 10 ** 6) -> list:
    """Every isometry of a definite lattice: columns drawn from box-search vectors of matching norm."""
    n = len(gram)
    if n == 0:
        return [()]
    cands = {}
    for i in range(n):
        t = gram[i][i]
        if t not in cands:
            cands[t] = box_roots(gram, t)
    G = np.array(gram, dtype=np.int64)
    pools = [np.array(cands[gram[i][i]], dtype=np.int64) for i in range(n)]
    out = []

    def extend(cols):
        i = len(cols)
        if i == n:
            out.append(tuple(tuple(int(c[r]) for c in cols) for r in range(n)))
            if len(out) > cap:
                raise CapExceeded(f"more than {cap} isometries")
            return
        pool = pools[i]
        keep = np.ones(len(pool), dtype=bool)
        for j, c in enumerate(cols):
            keep &= (pool @ (G @ c)) == gram[i][j]
        for v in pool[keep]:
            extend(cols + [v])

    extend([])
    return sorted(out)


def closure(generators, cap: int = 10 ** 6) -> list:
    """Group generated by ``generators``: multiply the whole set by itself until it stops growing."""
    gens = [tuple(tuple(r) for r in g) for g in generators]
    if not gens:
        return []
    n = len(gens[0])
    ident = tuple(tuple(int(i == j) for j in range(n)) for i in range(n))
    group = {ident, *gens}
    while True:
        new = {_matmul(a, b) for a in group for b in gens} | group
        if len(new) > cap:
            raise CapExceeded(f"group has more than {cap} elements")
        if new == group:
            return sorted(group)
        group = new


# -- orbit-brute -------------------------------------------------------------------------

def orbit_brute(elements, lifts, pivots, p: int, m: int, rows) -> list:
    """Orbit of a subspace of pN^v/pN (x) F_{p^m} under a fully listed group.

    ``lifts`` are lattice vectors whose classes form the basis of pN^v/pN and
    ``pivots`` the coordinates reading classes back off; ``rows`` are basis
    rows (field codes) of the subspace.  Each element g acts through
    g(lift_i) mod p; results are returned as sorted RREF row tuples.
    """
    F = PolyField(p, m)
    d = len(lifts)
    orbit = set()
    for g in elements:
        act = []
        for lift in lifts:
            img = [sum(g[r][c] * lift[c] for c in range(len(lift))) for r in range(len(g))]
            act.append([img[c] % p for c in pivots])
        new_rows = []
        for row in rows:
            out = [0] * d
            for i, x in enumerate(row):
                if x:
                    for r in range(d):
                        if act[i][r]:
                            out[r] = F.add[out[r]][F.mul[x][act[i][r]]]
            new_rows.append(out)
        orbit.add(F.rref(new_rows, d))
    return sorted(orbit)


# -- F_p form isometries ----------------------------------------------------------------

def form_isometries(p: int, gram) -> list:
    """All matrices over F_p preserving ``gram`` (columns are images of basis vectors)."""
    n = len(gram)
    V = np.array(list(product(range(p), repeat=n)), dtype=np.int64)
    G = np.array(gram, dtype=np.int64) % p
    norms = np.einsum("ij,jk,ik->i", V, G, V) % p
    out = []

    def extend(cols):
        i = len(cols)
        if i == n:
            M = np.array(cols).T
            if _det(M.tolist()) % p == 0:
                return
            out.append(tuple(tuple(int(x) for x in r) for r in M))
            return
        keep = norms == gram[i][i] % p
        for j, c in enumerate(cols):
            keep &= ((V @ (G @ c)) % p) == gram[i][j] % p
        for v in V[keep]:
            extend(cols + [v])

    extend([])
    return sorted(out)


def stabilizer_brute(ambient_gram, gamma_matrix, complement_gram, inclusion_matrix,
                     cap: int = 10 ** 6) -> list:
    """Isometries of N fixing gamma: every isometry of K, extended by the identity, kept if integral.

    The extension B diag(I, g) B^-1 is formed over Q, with B the columns of
    gamma followed by the columns of the inclusion of K.
    """
    n = len(ambient_gram)
    r = len(gamma_matrix[0]) if gamma_matrix and gamma_matrix[0] else 0
    B = [list(gamma_matrix[i][:r]) + list(inclusion_matrix[i]) for i in range(n)]
    Binv = _rational_inverse(B)
    out = []
    for g in group_expand(complement_gram, cap) if n > r else [()]:
        blk = [[Fraction(int(i == j)) if i < r and j < r else Fraction(0) for j in range(n)]
               for i in range(n)]
        for i in range(n - r):
            for j in range(n - r):
                blk[r + i][r + j] = Fraction(g[i][j])
        phi = _qmul(_qmul(B, blk), Binv)
        if all(x.denominator == 1 for row in phi for x in row):
            out.append(tuple(tuple(int(x) for x in row) for row in phi))
    return sorted(out)


def _qmul(a, b):
    return [[sum(Fraction(a[i][k]) * b[k][j] for k in range(len(b))) for j in range(len(b[0]))]
            for i in range(len(a))]


def _rational_inverse(a):
    n = len(a)
    m = [[Fraction(x) for x in row] + [Fraction(int(i == j)) for j in range(n)]
         for i, row in enumerate(a)]
    for c in range(n):
        piv = next(r for r in range(c, n) if m[r][c] != 0)
        m[c], m[piv] = m[piv], m[c]
        f = m[c][c]
        m[c] = [x / f for x in m[c]]
        for r in range(n):
            if r != c and m[r][c] != 0:
                g = m[r][c]
                m[r] = [x - g * y for x, y in zip(m[r], m[c])]
    return [row[n:] for row in m]
