"""Integer lattices, embeddings and their exact invariants.

Basis conventions (fixed, so every Gram matrix below is reproducible):

* ``U``  -- hyperbolic plane, Gram ``[[0, 1], [1, 0]]``.
* ``A1`` -- ``[[2]]``.
* ``A2``, ``D4``, ``E8`` -- positive definite Cartan matrices in the
  simple-root basis.  For ``E8`` the simple roots are numbered as in
  Bourbaki (1-3-4-5-6-7-8 a chain, 2 attached to 4).
* ``twist(L, n)`` multiplies the Gram matrix by ``n``; ``L(-1)`` in the
  usual notation is ``twist(L, -1)``.
* ``sum(L, M, ...)`` is the orthogonal (block diagonal) sum.

So ``sum(U, twist(E8, -1))`` is the even unimodular lattice of signature
(1, 9) and ``twist(A2, -1)`` is ``[[-2, 1], [1, -2]]``.
"""
from __future__ import annotations

import re
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from math import gcd
from typing import Sequence

from . import intmat
from .errors import ExpressionError, LatticeError, ValidationError
from .finite_form import FiniteQuadraticSpace, Subspace
from .gf import is_prime

Matrix = intmat.Matrix


@dataclass(frozen=True)
class IntegerLattice:
    """Free Z-module with a nondegenerate symmetric integral Gram matrix."""

    gram: Matrix
    label: str | None = field(default=None, compare=False)

    def __post_init__(self):
        g = intmat.as_matrix(self.gram)
        object.__setattr__(self, "gram", g)
        n = len(g)
        if any(len(row) != n for row in g):
            raise LatticeError("Gram matrix must be square")
        if any(g[i][j] != g[j][i] for i in range(n) for j in range(i)):
            raise LatticeError("Gram matrix must be symmetric")
        if intmat.det(g) == 0:
            raise LatticeError("Gram matrix is degenerate")

    @property
    def rank(self) -> int:
        return len(self.gram)

    @cached_property
    def det(self) -> int:
        return intmat.det(self.gram)

    @property
    def is_even(self) -> bool:
        return all(self.gram[i][i] % 2 == 0 for i in range(self.rank))

    def pair(self, u: Sequence[int], v: Sequence[int]) -> int:
        return sum(u[i] * self.gram[i][j] * v[j]
                   for i in range(self.rank) for j in range(self.rank) if u[i] and v[j])

    def norm(self, v: Sequence[int]) -> int:
        return self.pair(v, v)

    def is_isometry(self, q: Sequence[Sequence[int]]) -> bool:
        """Does the matrix ``q`` (columns = images of basis vectors) preserve the form?"""
        qt = intmat.transpose(q, self.rank)
        return intmat.matmul(intmat.matmul(qt, self.gram), q) == self.gram

    def to_json(self) -> dict:
        d = {"rank": self.rank, "gram": [list(r) for r in self.gram]}
        if self.label is not None:
            d["label"] = self.label
        return d

    @classmethod
    def from_json(cls, d: dict) -> "IntegerLattice":
        try:
            gram = d["gram"]
            rank = d["rank"]
        except (KeyError, TypeError) as exc:
            raise ValidationError(f"lattice needs 'rank' and 'gram' ({exc})") from exc
        if not isinstance(rank, int) or rank != len(gram):
            raise ValidationError(f"rank {rank!r} does not match Gram size {len(gram)}")
        if any(not isinstance(x, int) or isinstance(x, bool) for row in gram for x in row):
            raise ValidationError("Gram entries must be integers")
        try:
            return cls(gram, d.get("label"))
        except LatticeError as exc:
            raise ValidationError(str(exc)) from exc

    def __repr__(self):
        name = f" {self.label!r}" if self.label else ""
        return f"<IntegerLattice{name} rank={self.rank} det={self.det}>"


@dataclass(frozen=True)
class LatticeEmbedding:
    """Form-compatible injection; column ``i`` of ``matrix`` is the image of source basis vector ``i``."""

    source: IntegerLattice
    target: IntegerLattice
    matrix: Matrix

    def __post_init__(self):
        m = intmat.as_matrix(self.matrix)
        object.__setattr__(self, "matrix", m)
        if len(m) != self.target.rank or any(len(r) != self.source.rank for r in m):
            raise LatticeError(
                f"embedding matrix must be {self.target.rank}x{self.source.rank}")
        mt = intmat.transpose(m, self.source.rank)
        if intmat.matmul(intmat.matmul(mt, self.target.gram), m) != self.source.gram:
            raise LatticeError("embedding does not respect the bilinear forms")
        # form compatibility plus nondegenerate source already forces injectivity

    @property
    def columns(self) -> list[tuple[int, ...]]:
        return intmat.columns(self.matrix, self.source.rank)

    def to_json(self) -> dict:
        return {"source": self.source.to_json(), "target": self.target.to_json(),
                "matrix": [list(r) for r in self.matrix]}

    @classmethod
    def from_json(cls, d: dict, resolve=None) -> "LatticeEmbedding":
        def lat(x):
            if isinstance(x, str):
                if resolve is None:
                    raise ValidationError(f"unresolved lattice reference {x!r}")
                return resolve(x)
            return IntegerLattice.from_json(x)

        try:
            src, tgt, mat = lat(d["source"]), lat(d["target"]), d["matrix"]
        except (KeyError, TypeError) as exc:
            raise ValidationError(f"embedding needs source/target/matrix ({exc})") from exc
        if src.rank == 0:
            mat = [[] for _ in range(tgt.rank)]
        try:
            return cls(src, tgt, mat)
        except LatticeError as exc:
            raise ValidationError(str(exc)) from exc


@dataclass(frozen=True)
class DiscriminantData:
    elementary_divisors: tuple[int, ...]
    group_order: int
    p: int
    p_elementary: bool
    p_length: int


# -- construction ---------------------------------------------------------

_STANDARD = {
    "U": ((0, 1), (1, 0)),
    "A1": ((2,),),
    "A2": ((2, -1), (-1, 2)),
    "D4": ((2, -1, 0, 0), (-1, 2, -1, -1), (0, -1, 2, 0), (0, -1, 0, 2)),
    "E8": (
        (2, 0, -1, 0, 0, 0, 0, 0),
        (0, 2, 0, -1, 0, 0, 0, 0),
        (-1, 0, 2, -1, 0, 0, 0, 0),
        (0, -1, -1, 2, -1, 0, 0, 0),
        (0, 0, 0, -1, 2, -1, 0, 0),
        (0, 0, 0, 0, -1, 2, -1, 0),
        (0, 0, 0, 0, 0, -1, 2, -1),
        (0, 0, 0, 0, 0, 0, -1, 2),
    ),
}


def twist(L: IntegerLattice, n: int) -> IntegerLattice:
    if n == 0:
        raise ExpressionError("twist by 0 is not allowed")
    label = f"twist({L.label},{n})" if L.label else None
    return IntegerLattice(tuple(tuple(n * x for x in row) for row in L.gram), label)


def direct_sum(*lattices: IntegerLattice) -> IntegerLattice:
    n = sum(L.rank for L in lattices)
    g = [[0] * n for _ in range(n)]
    off = 0
    for L in lattices:
        for i in range(L.rank):
            for j in range(L.rank):
                g[off + i][off + j] = L.gram[i][j]
        off += L.rank
    labels = [L.label for L in lattices]
    label = "sum(" + ",".join(labels) + ")" if all(labels) else None
    return IntegerLattice(g, label)


def diagonal(*entries: int) -> IntegerLattice:
    n = len(entries)
    return IntegerLattice([[entries[i] if i == j else 0 for j in range(n)] for i in range(n)],
                          "diag(" + ",".join(str(e) for e in entries) + ")")


_TOKEN = re.compile(r"\s*(-?\d+|[A-Za-z_][A-Za-z0-9_]*|[(),])")


def _tokenize(expr: str) -> list[str]:
    pos, out = 0, []
    expr = expr.strip()
    while pos < len(expr):
        m = _TOKEN.match(expr, pos)
        if not m:
            raise ExpressionError(f"unexpected character at {pos} in {expr!r}")
        out.append(m.group(1))
        pos = m.end()
        while pos < len(expr) and expr[pos].isspace():
            pos += 1
    return out


def parse_lattice(expr: str) -> IntegerLattice:
    """Build a lattice from ``U | A1 | A2 | D4 | E8 | diag(..) | twist(e, n) | sum(e, e, ...)``.

    A standard name may carry a postfix twist, so ``E8(-1)`` means
    ``twist(E8,-1)``; the unicode minus sign is accepted.
    """
    toks = _tokenize(expr.replace("\u2212", "-"))
    if not toks:
        raise ExpressionError("empty lattice expression")
    pos = 0

    def expect(t):
        nonlocal pos
        if pos >= len(toks) or toks[pos] != t:
            got = toks[pos] if pos < len(toks) else "end of input"
            raise ExpressionError(f"expected {t!r}, got {got!r} in {expr!r}")
        pos += 1

    def integer():
        nonlocal pos
        if pos >= len(toks) or not re.fullmatch(r"-?\d+", toks[pos]):
            raise ExpressionError(f"expected an integer in {expr!r}")
        pos += 1
        return int(toks[pos - 1])

    def node():
        nonlocal pos
        if pos >= len(toks):
            raise ExpressionError(f"truncated expression {expr!r}")
        t = toks[pos]
        pos += 1
        if t in _STANDARD:
            base = IntegerLattice(_STANDARD[t], t)
            if pos < len(toks) and toks[pos] == "(":
                pos += 1
                n = integer()
                expect(")")
                return twist(base, n)
            return base
        if t == "diag":
            expect("(")
            vals = [integer()]
            while pos < len(toks) and toks[pos] == ",":
                pos += 1
                vals.append(integer())
            expect(")")
            try:
                return diagonal(*vals)
            except LatticeError as exc:
                raise ExpressionError(str(exc)) from exc
        if t == "twist":
            expect("(")
            inner = node()
            expect(",")
            n = integer()
            expect(")")
            return twist(inner, n)
        if t == "sum":
            expect("(")
            parts = [node()]
            while pos < len(toks) and toks[pos] == ",":
                pos += 1
                parts.append(node())
            expect(")")
            if len(parts) < 2:
                raise ExpressionError("sum needs at least two summands")
            return direct_sum(*parts)
        raise ExpressionError(f"unknown lattice name {t!r}")

    result = node()
    if pos != len(toks):
        raise ExpressionError(f"trailing tokens in {expr!r}")
    return result


construct_standard = parse_lattice


def rank_zero_lattice() -> IntegerLattice:
    return IntegerLattice((), "zero")


# -- invariants -----------------------------------------------------------

def discriminant(L: IntegerLattice) -> int:
    return L.det


def signature(L: IntegerLattice) -> tuple[int, int]:
    """(n_plus, n_minus) from an exact congruence diagonalization over Q."""
    m = [[Fraction(x) for x in row] for row in L.gram]
    n = len(m)
    plus = minus = 0
    active = list(range(n))
    while active:
        i = next((k for k in active if m[k][k] != 0), None)
        if i is None:
            pair = next(((a, b) for a in active for b in active if a != b and m[a][b] != 0), None)
            if pair is None:
                raise LatticeError("degenerate form: signature undefined")
            a, b = pair
            # e_a <- e_a + e_b  (a congruence transformation)
            for k in range(n):
                m[a][k] += m[b][k]
            for k in range(n):
                m[k][a] += m[k][b]
            i = a
        d = m[i][i]
        if d > 0:
            plus += 1
        else:
            minus += 1
        active.remove(i)
        for k in active:
            f = m[k][i] / d
            if f:
                for c in range(n):
                    m[k][c] -= f * m[i][c]
                for c in range(n):
                    m[c][k] -= f * m[c][i]
    return plus, minus


def is_definite(L: IntegerLattice) -> bool:
    plus, minus = signature(L)
    return plus == 0 or minus == 0


def _check_odd_prime(p: int):
    if p % 2 == 0 or not is_prime(p):
        raise LatticeError(f"p must be an odd prime, got {p}")


def discriminant_data(L: IntegerLattice, p: int) -> DiscriminantData:
    _check_odd_prime(p)
    divs = intmat.smith_invariants(L.gram) if L.rank else ()
    return DiscriminantData(
        elementary_divisors=divs,
        group_order=abs(L.det),
        p=p,
        p_elementary=all(d in (1, p) for d in divs),
        p_length=sum(1 for d in divs if d == p),
    )


def artin_invariant(L: IntegerLattice, p: int) -> int:
    """Half the number of elementary divisors equal to p, for even p-elementary L.

    For a lattice that looks like a supersingular K3 lattice (rank 22,
    signature (1, 21)) the discriminant is also required to be -p^(2 sigma)
    with 1 <= sigma <= 10.
    """
    data = discriminant_data(L, p)
    if not L.is_even:
        raise LatticeError("Artin invariant needs an even lattice")
    if not data.p_elementary:
        raise LatticeError(f"lattice is not {p}-elementary: divisors {data.elementary_divisors}")
    if data.p_length % 2:
        raise LatticeError(f"odd number ({data.p_length}) of divisors equal to {p}")
    sigma = data.p_length // 2
    if L.rank == 22 and signature(L) == (1, 21):
        if L.det != -p ** (2 * sigma) or not 1 <= sigma <= 10:
            raise LatticeError(
                f"rank-22 lattice of signature (1,21) with det {L.det} is not a K3 lattice")
    return sigma


def is_supersingular_k3(L: IntegerLattice, p: int) -> bool:
    """The K3 lattice axioms: even, rank 22, signature (1, 21), p-elementary, d = -p^(2 sigma)."""
    if L.rank != 22 or not L.is_even or signature(L) != (1, 21):
        return False
    data = discriminant_data(L, p)
    if not data.p_elementary or data.p_length % 2:
        return False
    sigma = data.p_length // 2
    return L.det == -p ** (2 * sigma) and 1 <= sigma <= 10


# -- discriminant quotient pN^v/pN ------------------------------------------

@dataclass(frozen=True)
class DualQuotient:
    """The space pL^v/pL with its induced F_p form.

    ``lifts[i]`` is an integer vector (L-coordinates) in pL^v + pL
    representing the i-th basis vector; ``pivots`` are the coordinates that
    read off N_0-coordinates of any class modulo p.
    """

    lattice: IntegerLattice
    p: int
    lifts: tuple[tuple[int, ...], ...]
    pivots: tuple[int, ...]
    space: FiniteQuadraticSpace

    @property
    def dim(self) -> int:
        return len(self.lifts)

    def coordinates(self, v: Sequence[int]) -> tuple[int, ...]:
        """N_0 coordinates of a vector of pL^v (given in L-coordinates)."""
        return tuple(v[c] % self.p for c in self.pivots)

    def contains(self, v: Sequence[int]) -> bool:
        """Is ``v mod p`` in the image of pL^v in L/pL?"""
        p = self.p
        c = self.coordinates(v)
        rebuilt = [0] * self.lattice.rank
        for a, lift in zip(c, self.lifts):
            for k, x in enumerate(lift):
                rebuilt[k] += a * x
        return all((x - y) % p == 0 for x, y in zip(rebuilt, v))

    def action(self, phi: Sequence[Sequence[int]]) -> tuple[tuple[int, ...], ...]:
        """Matrix over F_p (columns = images of basis vectors) induced by an isometry."""
        cols = []
        for lift in self.lifts:
            img = intmat.matvec(phi, lift)
            if not self.contains(img):
                raise LatticeError("map does not preserve pL^v")
            cols.append(self.coordinates(img))
        return tuple(tuple(col[i] for col in cols) for i in range(self.dim))


def _rref_mod_p(rows, p, ncols):
    m = [[x % p for x in r] for r in rows]
    pivots = []
    r = 0
    for c in range(ncols):
        piv = next((i for i in range(r, len(m)) if m[i][c]), None)
        if piv is None:
            continue
        m[r], m[piv] = m[piv], m[r]
        inv = pow(m[r][c], -1, p)
        m[r] = [x * inv % p for x in m[r]]
        for i in range(len(m)):
            if i != r and m[i][c]:
                f = m[i][c]
                m[i] = [(x - f * y) % p for x, y in zip(m[i], m[r])]
        pivots.append(c)
        r += 1
    return [tuple(row) for row in m[:r]], pivots


def dual_quotient(L: IntegerLattice, p: int) -> DualQuotient:
    data = discriminant_data(L, p)
    if not L.is_even:
        raise LatticeError("dual quotient form needs an even lattice")
    if not data.p_elementary:
        raise LatticeError(f"lattice is not {p}-elementary")
    n = L.rank
    if n == 0:
        return DualQuotient(L, p, (), (), FiniteQuadraticSpace(p, ()))
    inv = intmat.inverse(L.gram)
    pinv = [[p * x for x in row] for row in inv]
    if not all(x.denominator == 1 for row in pinv for x in row):
        raise LatticeError("p * inverse Gram is not integral")
    # columns of p G^-1 generate pL^v (G^-1 is symmetric, so rows work too)
    gens = [[int(x) for x in row] for row in pinv]
    lifts, pivots = _rref_mod_p(gens, p, n)
    form = []
    for u in lifts:
        row = []
        for v in lifts:
            val = L.pair(u, v)
            if val % p:
                raise AssertionError("pairing on pL^v not divisible by p")
            row.append((val // p) % p)
        form.append(tuple(row))
    space = FiniteQuadraticSpace(p, tuple(form))
    return DualQuotient(L, p, tuple(lifts), tuple(pivots), space)


def dual_quotient_form(L: IntegerLattice, p: int) -> FiniteQuadraticSpace:
    return dual_quotient(L, p).space


# -- sublattices ------------------------------------------------------------

def orthogonal_complement(emb: LatticeEmbedding) -> tuple[IntegerLattice, LatticeEmbedding]:
    tgt = emb.target
    n = tgt.rank
    mt = intmat.transpose(emb.matrix, emb.source.rank)
    pairing = intmat.matmul(mt, tgt.gram) if emb.source.rank else ()
    basis = intmat.kernel(pairing, n) if pairing else intmat.identity(n)
    gram = intmat.gram_of(basis, tgt.gram)
    K = IntegerLattice(gram, "complement")
    inc = LatticeEmbedding(K, tgt, intmat.from_columns(basis, n) if basis else tuple(() for _ in range(n)))
    return K, inc


def _saturation_basis(cols: list[tuple[int, ...]], n: int) -> Matrix:
    if not cols:
        return ()
    a = intmat.from_columns(cols, n)          # n x k
    rel = intmat.left_kernel(a, len(cols))   # rows y with y^T a = 0
    if not rel:
        return intmat.identity(n)
    return intmat.kernel(rel, n)


def saturation_index(emb: LatticeEmbedding) -> int:
    cols = emb.columns
    if not cols:
        return 1
    n = emb.target.rank
    sat = _saturation_basis(cols, n)
    smat = intmat.from_columns(sat, n)
    t = []
    for c in cols:
        x = intmat.solve(smat, c)
        if x is None or not intmat.is_integral(x):
            raise AssertionError("image not contained in its saturation")
        t.append([int(v) for v in x])
    return abs(intmat.det(intmat.transpose(t, len(sat))))


def saturate(emb: LatticeEmbedding) -> LatticeEmbedding:
    n = emb.target.rank
    sat = _saturation_basis(emb.columns, n)
    if not sat:
        return emb
    src = IntegerLattice(intmat.gram_of(sat, emb.target.gram), "saturation")
    return LatticeEmbedding(src, emb.target, intmat.from_columns(sat, n))


def is_primitive(emb: LatticeEmbedding) -> bool:
    return saturation_index(emb) == 1


def compose_embeddings(j: LatticeEmbedding, gamma: LatticeEmbedding) -> LatticeEmbedding:
    """``j o gamma``: first gamma, then j."""
    if j.source.gram != gamma.target.gram:
        raise LatticeError("source of j must equal target of gamma")
    m = intmat.matmul(j.matrix, gamma.matrix) if gamma.source.rank else \
        tuple(() for _ in range(j.target.rank))
    return LatticeEmbedding(gamma.source, j.target, m)


def identity_embedding(L: IntegerLattice) -> LatticeEmbedding:
    return LatticeEmbedding(L, L, intmat.identity(L.rank))


# -- roots and reflections ----------------------------------------------------

def reflection_in_root(L: IntegerLattice, l: Sequence[int]) -> Matrix:
    """Matrix of x -> x + <x, l> l (columns = images of basis vectors)."""
    l = tuple(int(x) for x in l)
    if len(l) != L.rank or L.norm(l) != -2:
        raise LatticeError("reflection needs a vector of norm -2")
    gl = intmat.matvec(L.gram, l)
    n = L.rank
    return tuple(tuple(int(i == k) + l[i] * gl[k] for k in range(n)) for i in range(n))


# -- overlattices from isotropic glue ------------------------------------------

def overlattice_from_glue(L: IntegerLattice, p: int, glue: Subspace) -> IntegerLattice:
    """L + (1/p){v in pL^v : v mod pL in glue}, for a totally isotropic glue space.

    The Gram matrix is given in the Hermite basis of the overlattice inside
    L (x) Q, so gluing nothing returns L's Gram matrix unchanged.
    """
    return glue_embedding(L, p, glue).target


def glue_embedding(L: IntegerLattice, p: int, glue: Subspace) -> LatticeEmbedding:
    """The inclusion of L into its overlattice defined by ``glue``."""
    dq = dual_quotient(L, p)
    if glue.ambient.gram != dq.space.gram or glue.ambient.p != p:
        raise LatticeError("glue subspace does not live in pL^v/pL of this lattice")
    rows = glue.rational_rows()
    if rows is None:
        raise LatticeError("glue subspace is not defined over F_p")
    if not glue.is_totally_isotropic():
        raise LatticeError("glue subspace is not totally isotropic")
    n = L.rank
    if not rows:
        return identity_embedding(L)
    gens = [[p * int(i == k) for k in range(n)] for i in range(n)]
    for coeffs in rows:
        v = [0] * n
        for a, lift in zip(coeffs, dq.lifts):
            for k, x in enumerate(lift):
                v[k] += a * x
        gens.append(v)
    basis = intmat.hnf(gens, n)                # rows: p * (overlattice basis)
    gram = []
    for u in basis:
        row = []
        for w in basis:
            val = L.pair(u, w)
            if val % (p * p):
                raise LatticeError("glued lattice is not integral")
            row.append(val // (p * p))
        gram.append(row)
    label = f"glue({L.label},{p},{len(rows)})" if L.label else None
    target = IntegerLattice(gram, label)
    if not target.is_even:
        raise AssertionError("glue produced an odd lattice")
    # e_i = sum_k c_k (basis_k / p)  <=>  p e_i = sum_k c_k basis_k
    bt = intmat.transpose(basis, n)
    cols = []
    for i in range(n):
        c = intmat.solve(bt, [p * int(i == k) for k in range(n)])
        cols.append(tuple(int(x) for x in c))
    return LatticeEmbedding(L, target, intmat.from_columns(cols, n))


def lattice_key(L: IntegerLattice) -> tuple:
    return (L.rank, L.gram)


def content(v: Sequence[int]) -> int:
    g = 0
    for x in v:
        g = gcd(g, x)
    return g
