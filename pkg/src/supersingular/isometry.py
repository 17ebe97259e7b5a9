"""Finite isometry groups of definite lattices and orbit questions for embeddings."""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from typing import Sequence

from . import _kernels, intmat
from .errors import CapExceeded, Indeterminate, LatticeError
from .lattice import IntegerLattice, LatticeEmbedding
from .shortvec import _fits, definite_sign, scaled_cholesky, vectors_of_norm

Matrix = intmat.Matrix

DEFAULT_RANK_CAP = 8
DEFAULT_ELEMENT_CAP = 10 ** 6
DEFAULT_ORBIT_CAP = 10 ** 5


@dataclass(frozen=True, eq=False)
class IsometrySet:
    """A finite group of isometries given by generators.

    When the full element list is known (``isometry_group`` computes it) it
    is kept, sorted with the identity first; otherwise ``elements()`` expands
    the generators by breadth-first closure and refuses to go past
    ``element_cap``.
    """

    lattice: IntegerLattice
    generators: tuple[Matrix, ...]
    order: int | None = None
    element_cap: int = DEFAULT_ELEMENT_CAP
    _elements: tuple[Matrix, ...] | None = field(default=None, repr=False)

    def __post_init__(self):
        gens = tuple(intmat.as_matrix(g) for g in self.generators)
        for g in gens:
            if len(g) != self.lattice.rank or not self.lattice.is_isometry(g):
                raise LatticeError("generator does not preserve the Gram matrix")
        object.__setattr__(self, "generators", gens)

    @classmethod
    def from_generators(cls, L: IntegerLattice, gens: Sequence[Sequence[Sequence[int]]],
                        element_cap: int = DEFAULT_ELEMENT_CAP) -> "IsometrySet":
        return cls(L, tuple(gens), None, element_cap)

    @classmethod
    def trivial(cls, L: IntegerLattice) -> "IsometrySet":
        return cls(L, (), 1, DEFAULT_ELEMENT_CAP, (intmat.identity(L.rank),))

    @property
    def identity(self) -> Matrix:
        return intmat.identity(self.lattice.rank)

    @property
    def elements_known(self) -> bool:
        return self._elements is not None

    def elements(self) -> tuple[Matrix, ...]:
        if self._elements is None:
            els = _closure(self.identity, self.generators, self.element_cap)
            object.__setattr__(self, "_elements", els)
            object.__setattr__(self, "order", len(els))
        return self._elements

    def __len__(self):
        return len(self.elements())

    def __contains__(self, g) -> bool:
        return intmat.as_matrix(g) in set(self.elements())

    def to_json(self) -> dict:
        d = {"lattice": self.lattice.to_json(),
             "generators": [[list(r) for r in g] for g in self.generators],
             "element_cap": self.element_cap}
        if self.order is not None:
            d["order"] = self.order
        return d


def _closure(identity: Matrix, gens: Sequence[Matrix], cap: int) -> tuple[Matrix, ...]:
    seen = {identity}
    queue = deque([identity])
    while queue:
        g = queue.popleft()
        for h in gens:
            gh = intmat.matmul(h, g)
            if gh not in seen:
                if len(seen) >= cap:
                    raise CapExceeded(f"group has more than {cap} elements")
                seen.add(gh)
                queue.append(gh)
    rest = sorted(seen - {identity})
    return (identity,) + tuple(rest)


def _positive_form(L: IntegerLattice):
    s = definite_sign(L)
    return [[s * x for x in row] for row in L.gram]


def isometry_group(L: IntegerLattice, rank_cap: int = DEFAULT_RANK_CAP,
                   element_cap: int = DEFAULT_ELEMENT_CAP) -> IsometrySet:
    """Every isometry of a definite lattice, by backtracking over basis images.

    The image of basis vector i must have the same norm as e_i and the same
    pairings with the images already chosen.  Elements are sorted with the
    identity first.
    """
    n = L.rank
    if n == 0:
        return IsometrySet.trivial(L)
    if n > rank_cap:
        raise CapExceeded(f"rank {n} is above the isometry-group rank cap {rank_cap}")
    a = _positive_form(L)
    ch = scaled_cholesky(a)
    cands, images = [], []
    safe = True
    by_norm: dict[int, list] = {}
    for i in range(n):
        norm = a[i][i]
        if norm not in by_norm:
            by_norm[norm] = vectors_of_norm(a, norm)
            safe = safe and _fits(ch, norm)
        vs = by_norm[norm]
        cands.append(vs)
        images.append([intmat.matvec(a, v) for v in vs])
    bound = max(max((abs(x) for v in im for x in v), default=0) for im in images)
    maxc = max(max((abs(x) for v in c for x in v), default=0) for c in cands)
    safe = safe and _kernels.fits_int64(bound * maxc * n)
    sols, overflow = _kernels.isometry_backtrack(n, cands, images, a, element_cap,
                                                 safe_int64=safe)
    if overflow:
        raise CapExceeded(f"isometry group has more than {element_cap} elements")
    mats = set()
    for choice in sols:
        mats.add(intmat.from_columns([cands[i][c] for i, c in enumerate(choice)], n))
    ident = intmat.identity(n)
    els = (ident,) + tuple(sorted(mats - {ident}))
    gens = _generating_subset(els) if len(els) <= 10 ** 4 else els[1:]
    return IsometrySet(L, gens, len(els), element_cap, els)


def _generating_subset(els: tuple[Matrix, ...]) -> tuple[Matrix, ...]:
    """Greedy generating set: walk the sorted elements, keep those not yet generated."""
    ident = els[0]
    gens: list[Matrix] = []
    reached = {ident}
    for g in els[1:]:
        if g in reached:
            continue
        gens.append(g)
        reached = set(_closure(ident, gens, len(els) + 1))
        if len(reached) == len(els):
            break
    return tuple(gens)


def apply_to_embedding(g: Matrix, emb_matrix: Matrix) -> Matrix:
    return intmat.matmul(g, emb_matrix)


def embeddings_isomorphic(j1: LatticeEmbedding, j2: LatticeEmbedding, group: IsometrySet,
                          orbit_cap: int = DEFAULT_ORBIT_CAP) -> bool:
    """Is there g in ``group`` with g o j1 = j2?

    With an explicit element list every element is tested.  Otherwise the
    orbit of j1 is grown from the generators; if it reaches ``orbit_cap``
    without a witness the answer is :class:`Indeterminate` (never False).
    """
    if j1.source.gram != j2.source.gram or j1.target.gram != j2.target.gram:
        raise LatticeError("embeddings must share source and target")
    if group.lattice.gram != j1.target.gram:
        raise LatticeError("isometry set does not act on the common target")
    m1, m2 = j1.matrix, j2.matrix
    if m1 == m2:
        return True
    if j1.source.rank == 0:
        return True
    if group.elements_known:
        return any(intmat.matmul(g, m1) == m2 for g in group.elements())
    seen = {m1}
    queue = deque([m1])
    while queue:
        cur = queue.popleft()
        for h in group.generators:
            nxt = intmat.matmul(h, cur)
            if nxt == m2:
                return True
            if nxt not in seen:
                if len(seen) >= orbit_cap:
                    raise Indeterminate(f"orbit exceeded {orbit_cap} embeddings without a witness")
                seen.add(nxt)
                queue.append(nxt)
    return False
