"""Catalogs of marking classes and the component census built on them.

A catalog lists representatives gamma_1..gamma_r of marking classes of one
ambient lattice N_sigma, a list of overlattice embeddings j: N_sigma ->
N_sigma' (sigma' <= sigma), optional isometry generators for the lattices
involved, and recorded component counts (tau, epsilon, alpha, and the
connected-component counts epsilon_c for sigma and sigma - 1).

Two markings are related when some pair j, j' with a common target makes
j o gamma_1 and j' o gamma_2 isomorphic embeddings while the complement of
j o gamma_1 is root-free.  The identity of N_sigma always counts as an
available j.  Classes of the census are the transitive closure of this
relation.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property

from . import intmat
from .errors import DomainError, LatticeError, ValidationError
from .isometry import DEFAULT_ELEMENT_CAP, IsometrySet, embeddings_isomorphic
from .lattice import (IntegerLattice, LatticeEmbedding, artin_invariant, compose_embeddings,
                      identity_embedding, orthogonal_complement, saturation_index)
from .periods import is_twist_by_two
from .shortvec import has_minus_two_root

COUNT_KEYS = ("tau", "epsilon", "alpha", "epsilon_c", "epsilon_c_prev")


@dataclass(frozen=True)
class OverlatticeEmbedding:
    sigma_from: int
    sigma_to: int
    embedding: LatticeEmbedding

    def to_json(self) -> dict:
        return {"sigma_from": self.sigma_from, "sigma_to": self.sigma_to,
                "embedding": self.embedding.to_json()}


def _complement_root_free(emb: LatticeEmbedding) -> bool:
    K, _ = orthogonal_complement(emb)
    return not has_minus_two_root(K)


@dataclass(frozen=True, eq=False)
class EmbeddingCatalog:
    sigma: int
    p: int
    markings: tuple[LatticeEmbedding, ...]
    overlattice_embeddings: tuple[OverlatticeEmbedding, ...] = ()
    isometries: tuple[IsometrySet, ...] = ()
    recorded_counts: dict = field(default_factory=dict)
    orbit_cap: int = 10 ** 5

    def __post_init__(self):
        self.validate()

    # -- validation ---------------------------------------------------------
    def validate(self):
        if self.sigma < 0:
            raise ValidationError("sigma must be non-negative", "sigma")
        for k, v in self.recorded_counts.items():
            if k not in COUNT_KEYS:
                raise ValidationError(f"unknown recorded count {k!r}", "recorded_counts")
            if not isinstance(v, int) or isinstance(v, bool) or v < 0:
                raise ValidationError(f"count {k} must be a non-negative integer",
                                      f"recorded_counts.{k}")
        if self.markings:
            target = self.markings[0].target.gram
            for i, g in enumerate(self.markings):
                path = f"markings[{i}]"
                if g.target.gram != target:
                    raise ValidationError("all markings must share one ambient lattice", path)
                if not is_twist_by_two(g.source):
                    raise ValidationError("marked lattice is not a twist by 2", path)
                if saturation_index(g) != 1:
                    raise ValidationError("marking is not primitive", path)
                if not _complement_root_free(g):
                    raise ValidationError("complement of the marking contains a root", path)
            try:
                if artin_invariant(self.markings[0].target, self.p) != self.sigma:
                    raise ValidationError(f"ambient lattice does not have Artin invariant {self.sigma}",
                                          "markings")
            except LatticeError as exc:
                raise ValidationError(str(exc), "markings") from exc
        for i, oe in enumerate(self.overlattice_embeddings):
            path = f"overlattice_embeddings[{i}]"
            j = oe.embedding
            if oe.sigma_from != self.sigma:
                raise ValidationError("overlattice embeddings must start at the catalog's sigma", path)
            if not 0 < oe.sigma_to <= oe.sigma_from:
                raise ValidationError("need 0 < sigma_to <= sigma_from", path)
            if self.markings and j.source.gram != self.markings[0].target.gram:
                raise ValidationError("source is not the catalog's ambient lattice", path)
            if j.source.rank != j.target.rank:
                raise ValidationError("overlattice embedding must have full rank", path)
            idx = abs(intmat.det(j.matrix))
            if idx != self.p ** (oe.sigma_from - oe.sigma_to):
                raise ValidationError(f"index {idx} is not p^(sigma_from - sigma_to)", path)
            try:
                if artin_invariant(j.target, self.p) != oe.sigma_to:
                    raise ValidationError("target does not have the declared Artin invariant", path)
            except LatticeError as exc:
                raise ValidationError(str(exc), path) from exc

    # -- groups -------------------------------------------------------------
    def group_for(self, L: IntegerLattice) -> IsometrySet:
        for g in self.isometries:
            if g.lattice.gram == L.gram:
                return g
        return IsometrySet.trivial(L)

    @property
    def ambient(self) -> IntegerLattice | None:
        return self.markings[0].target if self.markings else None

    def available_js(self) -> list[tuple[int, LatticeEmbedding]]:
        """(sigma_to, j) pairs, the identity of N_sigma first."""
        out = [(self.sigma, identity_embedding(self.ambient))] if self.markings else []
        out.extend((oe.sigma_to, oe.embedding) for oe in self.overlattice_embeddings)
        return out

    # -- the relation ----------------------------------------------------------
    def index_of(self, gamma: LatticeEmbedding) -> int:
        for i, g in enumerate(self.markings):
            if g.matrix == gamma.matrix and g.source.gram == gamma.source.gram:
                return i
        raise DomainError("embedding is not an entry of the catalog")

    @cached_property
    def _root_free_cache(self) -> dict:
        return {}

    def composed_root_free(self, i: int, j: LatticeEmbedding) -> bool:
        key = (i, j.matrix, j.target.gram)
        cache = self._root_free_cache
        if key not in cache:
            cache[key] = _complement_root_free(compose_embeddings(j, self.markings[i]))
        return cache[key]

    def related(self, i1: int, i2: int) -> bool:
        g1, g2 = self.markings[i1], self.markings[i2]
        js = self.available_js()
        for s1, j in js:
            if not self.composed_root_free(i1, j):
                continue
            c1 = compose_embeddings(j, g1)
            for s2, j2 in js:
                if s2 != s1 or j2.target.gram != j.target.gram:
                    continue
                c2 = compose_embeddings(j2, g2)
                if embeddings_isomorphic(c1, c2, self.group_for(j.target), self.orbit_cap):
                    return True
        return False

    def self_only(self, i: int) -> bool:
        """Every j to a smaller sigma puts a root into the composed complement."""
        return all(not self.composed_root_free(i, oe.embedding)
                   for oe in self.overlattice_embeddings if oe.sigma_to < self.sigma)

    def classes(self) -> list[list[int]]:
        n = len(self.markings)
        parent = list(range(n))

        def find(x):
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        for a in range(n):
            for b in range(a + 1, n):
                if find(a) != find(b) and (self.related(a, b) or self.related(b, a)):
                    parent[max(find(a), find(b))] = min(find(a), find(b))
        groups: dict[int, list[int]] = {}
        for i in range(n):
            groups.setdefault(find(i), []).append(i)
        return sorted(groups.values())

    # -- serialization ------------------------------------------------------------
    def to_json(self) -> dict:
        d = {"sigma": self.sigma, "p": self.p,
             "markings": [g.to_json() for g in self.markings],
             "overlattice_embeddings": [oe.to_json() for oe in self.overlattice_embeddings],
             "recorded_counts": dict(self.recorded_counts)}
        if self.isometries:
            d["isometries"] = [{"lattice": g.lattice.to_json(),
                                "generators": [[list(r) for r in m] for m in g.generators]}
                               for g in self.isometries]
        return d

    @classmethod
    def from_json(cls, d: dict, resolve=None) -> "EmbeddingCatalog":
        if not isinstance(d, dict):
            raise ValidationError("catalog must be an object")
        try:
            sigma, p = d["sigma"], d["p"]
        except KeyError as exc:
            raise ValidationError(f"catalog needs {exc}") from exc
        markings = []
        for i, m in enumerate(d.get("markings", [])):
            try:
                markings.append(LatticeEmbedding.from_json(m, resolve))
            except ValidationError as exc:
                raise ValidationError(exc.message, f"markings[{i}]") from exc
        oes = []
        for i, e in enumerate(d.get("overlattice_embeddings", [])):
            path = f"overlattice_embeddings[{i}]"
            try:
                oes.append(OverlatticeEmbedding(e["sigma_from"], e["sigma_to"],
                                                LatticeEmbedding.from_json(e["embedding"], resolve)))
            except (KeyError, TypeError) as exc:
                raise ValidationError(f"missing field {exc}", path) from exc
            except ValidationError as exc:
                raise ValidationError(exc.message, path) from exc
        isos = []
        for i, e in enumerate(d.get("isometries", [])):
            path = f"isometries[{i}]"
            try:
                lat = e["lattice"]
                L = resolve(lat) if isinstance(lat, str) and resolve else IntegerLattice.from_json(lat)
                isos.append(IsometrySet.from_generators(L, e["generators"], DEFAULT_ELEMENT_CAP))
            except (KeyError, TypeError) as exc:
                raise ValidationError(f"missing field {exc}", path) from exc
            except LatticeError as exc:
                raise ValidationError(str(exc), path) from exc
        counts = d.get("recorded_counts", {})
        if not isinstance(counts, dict):
            raise ValidationError("recorded_counts must be an object", "recorded_counts")
        return cls(sigma, p, tuple(markings), tuple(oes), tuple(isos), dict(counts))


def embedding_equivalent(g1: LatticeEmbedding, g2: LatticeEmbedding, catalog: EmbeddingCatalog) -> bool:
    """Direct relation between two catalog entries (in either order).

    May raise :class:`~supersingular.errors.Indeterminate` when an
    isomorphism search hits its cap.
    """
    i1, i2 = catalog.index_of(g1), catalog.index_of(g2)
    return catalog.related(i1, i2) or catalog.related(i2, i1)


@dataclass(frozen=True)
class CensusReport:
    sigma: int
    irreducible: int
    connected: int
    alpha: int
    classes: list
    self_only: list
    bounds: dict
    violations: list

    def to_json(self) -> dict:
        return {"sigma": self.sigma, "irreducible_components": self.irreducible,
                "connected_components": self.connected, "alpha": self.alpha,
                "classes": self.classes, "self_only": self.self_only,
                "bounds": self.bounds, "violations": self.violations}


def _interval(lo, hi):
    return {"lower": lo, "upper": hi}


def component_census(catalog: EmbeddingCatalog) -> CensusReport:
    """Irreducible and connected component counts, alpha, and the three bound checks."""
    r = len(catalog.markings)
    classes = catalog.classes()
    connected = len(classes)
    self_only = [i for i in range(r) if catalog.self_only(i)]
    alpha = len(self_only)
    rec = catalog.recorded_counts
    tau = rec.get("tau")
    prev = rec.get("epsilon_c_prev")
    eps_hi = tau * r if tau is not None else None
    epsc_hi = None
    if tau is not None:
        epsc_hi = tau * connected
        if prev is not None:
            epsc_hi = min(epsc_hi, tau * (alpha + prev))
    bounds = {"epsilon": _interval(0, eps_hi), "epsilon_c": _interval(alpha, epsc_hi),
              "alpha": _interval(0, connected)}
    violations = []
    if "epsilon" in rec and eps_hi is not None and rec["epsilon"] > eps_hi:
        violations.append(f"epsilon={rec['epsilon']} exceeds tau*|R|={eps_hi}")
    if "epsilon_c" in rec:
        if rec["epsilon_c"] < alpha:
            violations.append(f"epsilon_c={rec['epsilon_c']} is below alpha={alpha}")
        if epsc_hi is not None and rec["epsilon_c"] > epsc_hi:
            violations.append(f"epsilon_c={rec['epsilon_c']} exceeds its upper bound {epsc_hi}")
    if "alpha" in rec and rec["alpha"] != alpha:
        violations.append(f"recorded alpha={rec['alpha']} differs from computed alpha={alpha}")
    if alpha > connected:
        violations.append(f"alpha={alpha} exceeds the number of connected components {connected}")
    return CensusReport(catalog.sigma, r, connected, alpha, classes, self_only, bounds, violations)
