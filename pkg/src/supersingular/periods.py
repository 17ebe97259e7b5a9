"""Markings by a twist-by-2 lattice, their stabilizers, and period points.

A marking context fixes an even ambient lattice N, an odd prime p and an
embedding gamma of a twist-by-2 lattice into N.  Its stabilizer is the group
of isometries of N that fix gamma pointwise.  It is found by enumerating the
(finite) isometry group of the definite complement K and keeping the
elements whose extension by the identity on the image of gamma is integral
on N.  A period point is the orbit of a characteristic generatrix of
pN^v/pN (x) F_{p^m} under that group, represented by its
lexicographically smallest RREF member.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Sequence

from . import intmat
from .errors import CapExceeded, DomainError, Indeterminate, LatticeError
from .finite_form import Generatrix, Subspace, is_characteristic
from .gf import is_prime
from .isometry import DEFAULT_ELEMENT_CAP, DEFAULT_RANK_CAP, IsometrySet, isometry_group
from .lattice import (DualQuotient, IntegerLattice, LatticeEmbedding, artin_invariant,
                      compose_embeddings, dual_quotient, is_supersingular_k3,
                      orthogonal_complement, saturation_index)
from .serialize import digest
from .shortvec import has_minus_two_root

Matrix = intmat.Matrix


@dataclass(frozen=True, eq=False)
class MarkingContext:
    ambient: IntegerLattice
    p: int
    gamma: LatticeEmbedding
    complement: IntegerLattice
    inclusion: LatticeEmbedding
    stabilizer: IsometrySet
    genuine_k3: bool
    complement_group: IsometrySet | None = field(default=None, repr=False)
    rank_cap: int = DEFAULT_RANK_CAP
    element_cap: int = DEFAULT_ELEMENT_CAP

    @cached_property
    def _basis_change(self):
        cols = self.gamma.columns + self.inclusion.columns
        b = intmat.from_columns(cols, self.ambient.rank)
        d = abs(intmat.det(b))
        adj = tuple(tuple(int(x * d) for x in row) for row in intmat.inverse(b))
        return b, adj, d

    @cached_property
    def dual(self) -> DualQuotient:
        return dual_quotient(self.ambient, self.p)

    @cached_property
    def actions(self) -> tuple[Matrix, ...]:
        """Distinct F_p matrices by which the stabilizer acts on pN^v/pN."""
        seen, out = set(), []
        for g in self.stabilizer.elements():
            a = self.dual.action(g)
            if a not in seen:
                seen.add(a)
                out.append(a)
        return tuple(out)

    @cached_property
    def context_id(self) -> str:
        return digest({
            "ambient": [list(r) for r in self.ambient.gram],
            "p": self.p,
            "gamma": [list(r) for r in self.gamma.matrix],
            "stabilizer": [[list(r) for r in g] for g in self.stabilizer.elements()],
        })

    def complement_isometries(self) -> IsometrySet:
        if self.complement_group is None:
            try:
                grp = isometry_group(self.complement, self.rank_cap, self.element_cap)
            except CapExceeded as exc:
                raise Indeterminate(str(exc)) from exc
            object.__setattr__(self, "complement_group", grp)
        return self.complement_group

    def extend(self, psi: Sequence[Sequence[int]], psi_k: Sequence[Sequence[int]]):
        """The map (psi on the image, psi_k on K) on N's basis; None if not integral."""
        return _block_extension(self, psi, psi_k)[0]


def _block_extension(ctx: MarkingContext, psi, psi_k):
    b, adj, d = ctx._basis_change
    r = ctx.gamma.source.rank
    n = ctx.ambient.rank
    blk = [[0] * n for _ in range(n)]
    for i in range(r):
        for j in range(r):
            blk[i][j] = psi[i][j]
    for i in range(n - r):
        for j in range(n - r):
            blk[r + i][r + j] = psi_k[i][j]
    num = intmat.matmul(intmat.matmul(b, blk), adj)
    if all(x % d == 0 for row in num for x in row):
        return tuple(tuple(x // d for x in row) for row in num), 1
    den = 1
    for row in num:
        for x in row:
            den = intmat.lcm(den, Fraction(x, d).denominator)
    return None, den


def _check_prime(p):
    if p % 2 == 0 or not is_prime(p):
        raise DomainError(f"p must be an odd prime, got {p}")


def is_twist_by_two(L: IntegerLattice) -> bool:
    return all(x % 2 == 0 for row in L.gram for x in row)


def build_marking_context(N: IntegerLattice, p: int, gamma: LatticeEmbedding,
                          stabilizer: IsometrySet | Sequence | None = None,
                          rank_cap: int = DEFAULT_RANK_CAP,
                          element_cap: int = DEFAULT_ELEMENT_CAP) -> MarkingContext:
    """Complement, stabilizer and K3 flag for a marking gamma of N.

    ``stabilizer`` may replace the computed group (for example by the
    trivial group); each supplied element is checked to be an isometry of N
    fixing gamma.
    """
    _check_prime(p)
    if gamma.target.gram != N.gram:
        raise LatticeError("gamma must map into the ambient lattice")
    if not is_twist_by_two(gamma.source):
        raise LatticeError("the marked lattice must be a twist by 2 (all Gram entries even)")
    K, inc = orthogonal_complement(gamma)
    base = MarkingContext(N, p, gamma, K, inc, IsometrySet.trivial(N), is_supersingular_k3(N, p),
                          None, rank_cap, element_cap)
    if stabilizer is None:
        els = set()
        ident_r = intmat.identity(gamma.source.rank)
        for g in base.complement_isometries().elements():
            ext = base.extend(ident_r, g)
            if ext is not None:
                els.add(ext)
        ident = intmat.identity(N.rank)
        elements = (ident,) + tuple(sorted(els - {ident}))
        stab = IsometrySet(N, elements[1:], len(elements), element_cap, elements)
    else:
        stab = stabilizer if isinstance(stabilizer, IsometrySet) else \
            IsometrySet.from_generators(N, stabilizer, element_cap)
        if stab.lattice.gram != N.gram:
            raise LatticeError("stabilizer acts on a different lattice")
        for g in stab.elements():
            if intmat.matmul(g, gamma.matrix) != gamma.matrix:
                raise LatticeError("stabilizer element does not fix gamma")
    return MarkingContext(N, p, gamma, K, inc, stab, base.genuine_k3,
                          base.complement_group, rank_cap, element_cap)


@dataclass(frozen=True)
class AdmissibilityReport:
    primitive: bool
    saturation_index: int
    complement_root_free: bool
    sigma: int | None
    sigma_bound_ok: bool | None
    admissible: bool

    def to_json(self) -> dict:
        return {"primitive": self.primitive, "saturation_index": self.saturation_index,
                "complement_root_free": self.complement_root_free, "sigma": self.sigma,
                "sigma_bound_ok": self.sigma_bound_ok, "admissible": self.admissible}


def check_enriques_admissible(ctx: MarkingContext) -> AdmissibilityReport:
    """Primitive image, root-free complement, and (for K3 lattices only) sigma <= 5."""
    idx = saturation_index(ctx.gamma)
    root_free = not has_minus_two_root(ctx.complement)
    sigma = ok = None
    if ctx.genuine_k3:
        sigma = artin_invariant(ctx.ambient, ctx.p)
        ok = sigma <= 5
    admissible = idx == 1 and root_free and ok is not False
    return AdmissibilityReport(idx == 1, idx, root_free, sigma, ok, admissible)


class NonIntegralExtension(DomainError):
    def __init__(self, denominator: int):
        super().__init__(f"extension is not integral (denominator {denominator})")
        self.denominator = denominator


def induced_involution(ctx: MarkingContext) -> Matrix:
    """+1 on the image of gamma, -1 on its complement, written on N's basis."""
    r = ctx.gamma.source.rank
    k = ctx.complement.rank
    neg = tuple(tuple(-int(i == j) for j in range(k)) for i in range(k))
    full, den = _block_extension(ctx, intmat.identity(r), neg)
    if full is None:
        raise NonIntegralExtension(den)
    return full


def act_on_generatrix(ctx: MarkingContext, phi: Sequence[Sequence[int]], G: Subspace) -> Subspace:
    """phi(G), with phi reduced to pN^v/pN and applied over F_{p^m}."""
    phi = intmat.as_matrix(phi)
    if len(phi) != ctx.ambient.rank or not ctx.ambient.is_isometry(phi):
        raise DomainError("map is not an isometry of the ambient lattice")
    _check_ambient(ctx, G)
    return G.apply(ctx.dual.action(phi))


def _check_ambient(ctx: MarkingContext, G: Subspace):
    if G.ambient != ctx.dual.space:
        raise DomainError("generatrix does not live in pN^v/pN of this context")


def orbit(ctx: MarkingContext, G: Subspace) -> list[Subspace]:
    _check_ambient(ctx, G)
    return sorted({G.apply(a) for a in ctx.actions})


def orbit_generatrices(ctx: MarkingContext, Gs: Sequence[Subspace]) -> list[list[Subspace]]:
    """Partition ``Gs`` into stabilizer orbits; orbits sorted, ordered by their minima."""
    pool = set(Gs)
    done: set = set()
    out = []
    for G in sorted(pool):
        if G in done:
            continue
        orb = set(orbit(ctx, G))
        part = sorted(pool & orb)
        done.update(part)
        out.append(part)
    return out


@dataclass(frozen=True)
class PeriodPoint:
    context_id: str
    representative: Generatrix
    orbit_size: int

    def to_json(self) -> dict:
        return {"context_id": self.context_id, "representative": self.representative.to_json(),
                "orbit_size": self.orbit_size}


def period_point(ctx: MarkingContext, G: Subspace) -> PeriodPoint:
    if not is_characteristic(G):
        raise DomainError("period points are defined for characteristic generatrices only")
    orb = orbit(ctx, G)
    return PeriodPoint(ctx.context_id, Generatrix.of(orb[0]), len(orb))


def same_period(P1: PeriodPoint, P2: PeriodPoint) -> bool:
    if P1.context_id != P2.context_id:
        raise DomainError("period points come from different marking contexts")
    return P1.representative == P2.representative


def extend_isometry(ctx: MarkingContext, psi: Sequence[Sequence[int]]) -> Matrix | None:
    """First partner psi' in O(K) (identity first, then sorted) making (psi, psi') integral on N."""
    psi = intmat.as_matrix(psi)
    src = ctx.gamma.source
    if len(psi) != src.rank or not src.is_isometry(psi):
        raise DomainError("psi does not preserve the form of the marked lattice")
    for g in ctx.complement_isometries().elements():
        full = ctx.extend(psi, g)
        if full is not None:
            return full
    return None


def remarked_period_point(ctx: MarkingContext, psi, G: Subspace) -> tuple[PeriodPoint, Matrix]:
    """Period of the same surface after re-marking gamma by gamma o psi.

    With phi = extend_isometry(ctx, psi) we have phi o gamma = gamma o psi,
    so a marking that puts gamma o psi in the reference position differs
    from the old one by phi and carries G to phi^-1(G).  Returns the point
    of phi^-1(G) in ``ctx`` together with phi.
    """
    phi = extend_isometry(ctx, psi)
    if phi is None:
        raise DomainError("psi has no integral extension to the ambient lattice")
    inv = intmat.inverse(phi)
    phi_inv = tuple(tuple(int(x) for x in row) for row in inv)
    return period_point(ctx, act_on_generatrix(ctx, phi_inv, G)), phi


def remark(ctx: MarkingContext, psi) -> MarkingContext:
    """The context for gamma o psi (same ambient, same prime)."""
    src = ctx.gamma.source
    psi_emb = LatticeEmbedding(src, src, psi)
    return build_marking_context(ctx.ambient, ctx.p, compose_embeddings(ctx.gamma, psi_emb),
                                 rank_cap=ctx.rank_cap, element_cap=ctx.element_cap)
