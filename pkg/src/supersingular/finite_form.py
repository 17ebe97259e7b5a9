"""Symmetric forms over F_p, subspaces of V (x) F_{p^m}, and generatrices.

Subspaces are stored by their reduced row echelon form (leading entries 1,
rows ordered by pivot column) with field elements encoded as in
:mod:`supersingular.gf`.  Two subspaces are equal exactly when these
matrices are equal, and the lexicographic order on the flattened matrix is
the canonical order used for sorting and orbit minima.

Frobenius acts entrywise.  Since it fixes 0 and 1, the entrywise image of
an RREF matrix is again in RREF, so no re-reduction is needed.
"""
from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from itertools import combinations
from typing import Iterable, Sequence

from . import _kernels
from .errors import CapExceeded, FormError, ValidationError
from .gf import GF, TABLE_LIMIT, field as gf_field, is_prime

Rows = tuple[tuple[int, ...], ...]

DEFAULT_GRASSMANNIAN_CAP = 10 ** 8
FILTERS = ("isotropic", "characteristic", "strict")


# -- linear algebra over a GF -----------------------------------------------

def rref(F: GF, rows: Iterable[Sequence[int]], ncols: int) -> tuple[Rows, list[int]]:
    m = [list(r) for r in rows]
    pivots: list[int] = []
    r = 0
    for c in range(ncols):
        piv = next((i for i in range(r, len(m)) if m[i][c]), None)
        if piv is None:
            continue
        m[r], m[piv] = m[piv], m[r]
        inv = F.inv(m[r][c])
        m[r] = [F.mul(inv, x) for x in m[r]]
        for i in range(len(m)):
            if i != r and m[i][c]:
                f = F.neg(m[i][c])
                m[i] = [F.add(x, F.mul(f, y)) for x, y in zip(m[i], m[r])]
        pivots.append(c)
        r += 1
    return tuple(tuple(row) for row in m[:r]), pivots


def nullspace(F: GF, rows: Sequence[Sequence[int]], ncols: int) -> Rows:
    """Basis (RREF) of {x : r . x = 0 for every row r} (plain dot product)."""
    red, pivots = rref(F, rows, ncols)
    free = [c for c in range(ncols) if c not in pivots]
    basis = []
    for f in free:
        v = [0] * ncols
        v[f] = 1
        for row, pc in zip(red, pivots):
            v[pc] = F.neg(row[f])
        basis.append(v)
    return rref(F, basis, ncols)[0]


def rank(F: GF, rows: Sequence[Sequence[int]], ncols: int) -> int:
    if not rows:
        return 0
    if F.addt is not None:
        return _kernels.gf_rank([list(r) for r in rows], ncols, F.addt, F.mult, F.negt, F.invt)
    return len(rref(F, rows, ncols)[0])


def det_mod_p(gram: Sequence[Sequence[int]], p: int) -> int:
    n = len(gram)
    m = [[x % p for x in row] for row in gram]
    d = 1
    for c in range(n):
        piv = next((i for i in range(c, n) if m[i][c]), None)
        if piv is None:
            return 0
        if piv != c:
            m[c], m[piv] = m[piv], m[c]
            d = -d
        d = d * m[c][c] % p
        inv = pow(m[c][c], -1, p)
        for i in range(c + 1, n):
            if m[i][c]:
                f = m[i][c] * inv % p
                m[i] = [(x - f * y) % p for x, y in zip(m[i], m[c])]
    return d % p


# -- the ambient space --------------------------------------------------------

@dataclass(frozen=True)
class FiniteQuadraticSpace:
    """Symmetric bilinear form over F_p, entries stored in 0..p-1."""

    p: int
    gram: Rows

    def __post_init__(self):
        if self.p % 2 == 0 or not is_prime(self.p):
            raise FormError(f"p must be an odd prime, got {self.p}")
        g = tuple(tuple(int(x) % self.p for x in row) for row in self.gram)
        n = len(g)
        if any(len(r) != n for r in g):
            raise FormError("Gram matrix must be square")
        if any(g[i][j] != g[j][i] for i in range(n) for j in range(i)):
            raise FormError("Gram matrix must be symmetric")
        object.__setattr__(self, "gram", g)

    @property
    def dim(self) -> int:
        return len(self.gram)

    @property
    def det(self) -> int:
        return det_mod_p(self.gram, self.p)

    def to_json(self) -> dict:
        return {"p": self.p, "dim": self.dim, "gram": [list(r) for r in self.gram]}

    @classmethod
    def from_json(cls, d: dict) -> "FiniteQuadraticSpace":
        try:
            return cls(d["p"], d["gram"])
        except (KeyError, TypeError) as exc:
            raise ValidationError(f"form needs 'p' and 'gram' ({exc})") from exc


def parse_gram(text: str) -> tuple[tuple[int, ...], ...]:
    """``"1,0;0,1"`` -> ((1, 0), (0, 1))."""
    try:
        rows = tuple(tuple(int(x) for x in r.split(",")) for r in text.strip().split(";") if r.strip())
    except ValueError as exc:
        raise ValidationError(f"cannot parse Gram matrix {text!r}") from exc
    return rows


def is_nondegenerate(V: FiniteQuadraticSpace) -> bool:
    return V.det != 0


def _neutral_by_discriminant(V: FiniteQuadraticSpace) -> bool:
    sigma = V.dim // 2
    val = (-1) ** sigma * V.det % V.p
    return pow(val, (V.p - 1) // 2, V.p) == 1


def is_neutral(V: FiniteQuadraticSpace, cross_check: bool = True) -> bool:
    """Does V contain a totally isotropic subspace of half its dimension?

    Decided by the discriminant: neutral iff (-1)^(dim/2) det is a square.
    For dim <= 4 the answer is cross-checked against an exhaustive search.
    """
    if V.dim % 2:
        raise FormError("neutrality needs an even-dimensional space")
    if not is_nondegenerate(V):
        raise FormError("neutrality needs a nondegenerate form")
    if V.dim == 0:
        return True
    answer = _neutral_by_discriminant(V)
    if cross_check and V.dim <= 4:
        found = bool(_isotropic_rrefs(V, 1, V.dim // 2, limit_one=True))
        if found != answer:
            raise AssertionError(f"neutrality criterion disagrees with search on {V}")
    return answer


# -- subspaces ----------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class Subspace:
    """Subspace of V (x) F_{p^m}, canonical RREF ``rows`` of field codes."""

    ambient: FiniteQuadraticSpace
    m: int
    rows: Rows

    def __post_init__(self):
        F = self.field
        n = self.ambient.dim
        rows = tuple(tuple(int(x) for x in r) for r in self.rows)
        for r in rows:
            if len(r) != n or any(not 0 <= x < F.q for x in r):
                raise FormError("subspace rows must be ambient-length vectors of field codes")
        red, _ = rref(F, rows, n)
        if red != rows:
            raise FormError("subspace rows are not in reduced row echelon form; use Subspace.span")
        object.__setattr__(self, "rows", rows)

    @classmethod
    def span(cls, ambient: FiniteQuadraticSpace, m: int, vectors: Iterable[Sequence[int]]):
        F = gf_field(ambient.p, m)
        vecs = [tuple(int(x) for x in v) for v in vectors]
        for v in vecs:
            if len(v) != ambient.dim or any(not 0 <= x < F.q for x in v):
                raise FormError("vectors must be ambient-length tuples of field codes")
        return cls(ambient, m, rref(F, vecs, ambient.dim)[0])

    def __eq__(self, other):
        if not isinstance(other, Subspace):
            return NotImplemented
        return (self.ambient, self.m, self.rows) == (other.ambient, other.m, other.rows)

    def __hash__(self):
        return hash((self.ambient, self.m, self.rows))

    @property
    def field(self) -> GF:
        return gf_field(self.ambient.p, self.m)

    @property
    def dim(self) -> int:
        return len(self.rows)

    @property
    def sigma(self) -> int:
        return self.ambient.dim // 2

    def key(self) -> tuple:
        return tuple(x for r in self.rows for x in r)

    def __lt__(self, other: "Subspace") -> bool:
        return (self.dim, self.key()) < (other.dim, other.key())

    def pivots(self) -> list[int]:
        return [next(i for i, x in enumerate(r) if x) for r in self.rows]

    def pair(self, u: Sequence[int], v: Sequence[int]) -> int:
        F = self.field
        g = self.ambient.gram
        acc = 0
        for i, a in enumerate(u):
            if not a:
                continue
            for j, b in enumerate(v):
                if b and g[i][j]:
                    acc = F.add(acc, F.mul(F.mul(a, g[i][j] % F.p), b))
        return acc

    def is_totally_isotropic(self) -> bool:
        return all(self.pair(u, v) == 0
                   for i, u in enumerate(self.rows) for v in self.rows[i:])

    def frobenius(self, times: int = 1) -> "Subspace":
        F = self.field
        times %= self.m
        if times == 0:
            return self
        fr = F.frob
        rows = []
        for r in self.rows:
            r = list(r)
            for _ in range(times):
                r = [fr[x] for x in r]
            rows.append(tuple(r))
        return Subspace(self.ambient, self.m, tuple(rows))

    def plus(self, other: "Subspace") -> "Subspace":
        return Subspace.span(self.ambient, self.m, self.rows + other.rows)

    def meet(self, other: "Subspace") -> "Subspace":
        F = self.field
        n = self.ambient.dim
        if not self.rows or not other.rows:
            return Subspace(self.ambient, self.m, ())
        a = nullspace(F, self.rows, n)
        b = nullspace(F, other.rows, n)
        return Subspace(self.ambient, self.m, nullspace(F, a + b, n))

    def contains(self, v: Sequence[int]) -> bool:
        return rank(self.field, list(self.rows) + [tuple(v)], self.ambient.dim) == self.dim

    def is_whole(self) -> bool:
        return self.dim == self.ambient.dim

    def is_rational(self) -> bool:
        return all(x < self.ambient.p for r in self.rows for x in r)

    def rational_rows(self) -> Rows | None:
        """The rows as F_p vectors if the subspace is defined over F_p."""
        return self.rows if self.is_rational() else None

    def apply(self, matrix: Sequence[Sequence[int]]) -> "Subspace":
        """Image under a linear map given by its matrix (columns = images of basis vectors)."""
        F = self.field
        n = self.ambient.dim
        out = []
        for r in self.rows:
            img = [0] * n
            for k, a in enumerate(r):
                if a:
                    for i in range(n):
                        c = matrix[i][k]
                        if c:
                            img[i] = F.add(img[i], F.mul(a, c))
            out.append(img)
        return Subspace.span(self.ambient, self.m, out)

    def to_json(self) -> dict:
        F = self.field
        d = self.ambient.to_json()
        d["m"] = self.m
        d["basis"] = [[list(F.coeffs(x)) for x in r] for r in self.rows]
        return d

    @classmethod
    def from_json(cls, d: dict) -> "Subspace":
        try:
            V = FiniteQuadraticSpace(d["p"], d["gram"])
            m = d["m"]
            basis = d["basis"]
        except (KeyError, TypeError, FormError) as exc:
            raise ValidationError(f"bad subspace object ({exc})") from exc
        if d.get("dim", V.dim) != V.dim:
            raise ValidationError("'dim' does not match the Gram matrix")
        F = gf_field(V.p, m)
        try:
            vecs = [[F.from_coeffs(c) for c in r] for r in basis]
        except (TypeError, ValueError) as exc:
            raise ValidationError(f"bad field element in basis ({exc})") from exc
        return cls.span(V, m, vecs)

    def __repr__(self):
        return f"Subspace(p={self.ambient.p}, m={self.m}, rows={self.rows})"


class Generatrix(Subspace):
    """A subspace of exactly half the ambient dimension."""

    def __post_init__(self):
        super().__post_init__()
        if self.ambient.dim % 2 or self.dim != self.ambient.dim // 2:
            raise FormError(
                f"a generatrix has dimension {self.ambient.dim // 2} in a "
                f"{self.ambient.dim}-dimensional space, got {self.dim}")

    @classmethod
    def of(cls, S: Subspace) -> "Generatrix":
        return cls(S.ambient, S.m, S.rows)

    def frobenius(self, times: int = 1) -> "Generatrix":
        return Generatrix.of(super().frobenius(times))

    def apply(self, matrix) -> "Generatrix":
        return Generatrix.of(super().apply(matrix))

    @classmethod
    def from_json(cls, d: dict) -> "Generatrix":
        S = Subspace.from_json(d)
        try:
            return cls.of(S)
        except FormError as exc:
            raise ValidationError(str(exc)) from exc


def zero_subspace(V: FiniteQuadraticSpace, m: int = 1) -> Subspace:
    return Subspace(V, m, ())


# -- characteristic predicates ---------------------------------------------------

def frobenius_image(G: Subspace) -> Subspace:
    return G.frobenius(1)


def is_totally_isotropic(G: Subspace) -> bool:
    return G.is_totally_isotropic()


def _check_half_dim(G: Subspace):
    if G.ambient.dim % 2 or G.dim != G.ambient.dim // 2:
        raise FormError(f"expected a subspace of dimension {G.ambient.dim // 2}, got {G.dim}")


def is_characteristic(G: Subspace) -> bool:
    """Totally isotropic, half-dimensional, and dim(G + FG) = dim G + 1."""
    _check_half_dim(G)
    if not G.is_totally_isotropic():
        return False
    return G.plus(G.frobenius()).dim == G.dim + 1


def frobenius_span(G: Subspace) -> Subspace:
    """The stable value of S <- S + F(S) starting from S = G."""
    S = G
    for _ in range(G.ambient.dim + 1):
        nxt = S.plus(S.frobenius())
        if nxt.dim == S.dim:
            return S
        S = nxt
    return S


def is_strictly_characteristic(G: Subspace) -> bool:
    """Characteristic and the Frobenius translates of G span everything.

    Returns False for inputs that are not characteristic at all.
    """
    return is_characteristic(G) and frobenius_span(G).is_whole()


def rational_part(G: Subspace) -> Subspace:
    """G intersected with V (x) F_p: the meet of all Frobenius translates of G."""
    S = G
    for i in range(1, G.m):
        S = S.meet(G.frobenius(i))
    if not S.is_rational():
        raise AssertionError("Frobenius-stable subspace with irrational RREF")
    return Subspace(G.ambient, G.m, S.rows)


def artin_invariant_of_generatrix(G: Subspace) -> int:
    if not is_characteristic(G):
        raise FormError("Artin invariant is only defined for characteristic generatrices")
    return G.sigma - rational_part(G).dim


def _as_vector_subspace(G: Subspace, vecs) -> Subspace:
    return Subspace.span(G.ambient, G.m, vecs)


@dataclass(frozen=True)
class Chain:
    x0: tuple[int, ...]
    vectors: tuple[tuple[int, ...], ...]     # x_0, F x_0, ..., F^(2 sigma - 1) x_0
    pairing: Rows                            # <F^sigma x_i, x_j> for i, j < sigma
    is_basis: bool
    pairing_ok: bool


def chain_vector(G: Subspace) -> Chain:
    """The line meet_{i < sigma} F^-i(G) and its Frobenius chain.

    ``pairing`` holds <F^sigma x_i, x_j> for 0 <= i, j < sigma: the pairing
    between G (spanned by x_0..x_{sigma-1}) and F^sigma G.  It is checked to
    be diagonal with nonzero diagonal; with sigma = 1 this is <F x_0, x_0> != 0.
    """
    if not is_strictly_characteristic(G):
        raise FormError("chain vector needs a strictly characteristic generatrix")
    F = G.field
    sigma = G.sigma
    S = G
    for i in range(1, sigma):
        S = S.meet(G.frobenius(-i))
    if S.dim != 1:
        raise FormError(f"meet of Frobenius preimages has dimension {S.dim}, expected 1")
    x0 = S.rows[0]                       # RREF row: first nonzero coordinate is 1
    vecs = [x0]
    for _ in range(2 * sigma - 1):
        vecs.append(tuple(F.frob[x] for x in vecs[-1]))
    is_basis = rank(F, vecs, G.ambient.dim) == G.ambient.dim
    pairing = tuple(tuple(G.pair(vecs[sigma + i], vecs[j]) for j in range(sigma))
                    for i in range(sigma))
    pairing_ok = all((pairing[i][j] != 0) == (i == j) for i in range(sigma) for j in range(sigma))
    if not is_basis:
        raise FormError("Frobenius chain of x0 is not a basis; enlarge the field")
    return Chain(x0, tuple(vecs), pairing, is_basis, pairing_ok)


# -- enumeration ----------------------------------------------------------------

def gaussian_binomial(n: int, k: int, q: int) -> int:
    if k < 0 or k > n:
        return 0
    num = den = 1
    for i in range(k):
        num *= q ** (n - i) - 1
        den *= q ** (i + 1) - 1
    return num // den


def _isotropic_rrefs(V: FiniteQuadraticSpace, m: int, k: int, pivot_sets=None, limit_one=False):
    F = gf_field(V.p, m)
    if F.addt is None:
        raise CapExceeded(f"field of order {F.q} exceeds the table limit {TABLE_LIMIT}")
    n = V.dim
    if pivot_sets is None:
        pivot_sets = list(combinations(range(n), k))
    if k == 0:
        return [()]
    gram = [list(r) for r in V.gram]
    if limit_one:
        for ps in pivot_sets:
            found = _kernels.isotropic_rref(F.q, n, k, F.addt, F.mult, gram, [ps])
            if found:
                return found[:1]
        return []
    return _kernels.isotropic_rref(F.q, n, k, F.addt, F.mult, gram, pivot_sets)


def _scan_chunk(args):
    V, m, k, pivot_sets, backend = args
    with _kernels.use_backend(backend):
        return _isotropic_rrefs(V, m, k, pivot_sets)


def enumerate_generatrices(V: FiniteQuadraticSpace, m: int, filter: str = "characteristic",
                           cap: int = DEFAULT_GRASSMANNIAN_CAP, workers: int = 1) -> list[Generatrix]:
    """All half-dimensional subspaces of V (x) F_{p^m} passing ``filter``, sorted.

    The scan visits only totally isotropic RREF matrices but is budgeted by
    the size of the full Grassmannian.  With ``workers > 1`` the pivot
    patterns are split across processes; the merged result is sorted, so the
    output does not depend on the split.
    """
    if filter not in FILTERS:
        raise FormError(f"unknown filter {filter!r}; expected one of {FILTERS}")
    if V.dim % 2:
        raise FormError("generatrices need an even-dimensional space")
    if m < 1:
        raise FormError("extension degree must be positive")
    k = V.dim // 2
    F = gf_field(V.p, m)
    total = gaussian_binomial(V.dim, k, F.q)
    if total > cap:
        raise CapExceeded(f"Grassmannian has {total} points, above the cap {cap}")
    pivot_sets = list(combinations(range(V.dim), k))
    if workers > 1 and len(pivot_sets) > 1:
        chunks = [pivot_sets[i::workers] for i in range(workers)]
        with ProcessPoolExecutor(max_workers=workers) as ex:
            parts = ex.map(_scan_chunk, [(V, m, k, c, _kernels.BACKEND) for c in chunks if c])
            flat = [g for part in parts for g in part]
    else:
        flat = _isotropic_rrefs(V, m, k, pivot_sets)
    n = V.dim
    out = []
    for codes in sorted(flat):
        G = Generatrix(V, m, tuple(tuple(codes[i * n:(i + 1) * n]) for i in range(k)))
        if filter == "characteristic" and not is_characteristic(G):
            continue
        if filter == "strict" and not is_strictly_characteristic(G):
            continue
        out.append(G)
    return out
