"""Canonical JSON and workspace files.

Canonical form: sorted keys, no insignificant whitespace, integers only.
A workspace is ``{"version": 1, "objects": {name: {"kind": ..., "data": ...,
"notes": ...}}}``.  Inside ``data``, a string where a lattice is expected is a
reference to another lattice object of the workspace.
"""
from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from typing import Any

from .errors import DomainError, ValidationError

WORKSPACE_VERSION = 1
KINDS = ("lattice", "embedding", "form", "subspace", "generatrix", "catalog")


def canonical_dumps(obj: Any) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"), ensure_ascii=True)


def digest(obj: Any) -> str:
    return hashlib.sha256(canonical_dumps(obj).encode()).hexdigest()


def loads(text: str) -> Any:
    try:
        return json.loads(text, parse_float=_no_float)
    except json.JSONDecodeError as exc:
        raise ValidationError(f"invalid JSON: {exc}") from exc


def _no_float(s):
    raise ValidationError(f"floating point value {s} is not allowed")


@dataclass
class Workspace:
    version: int = WORKSPACE_VERSION
    objects: dict[str, Any] = field(default_factory=dict)
    kinds: dict[str, str] = field(default_factory=dict)
    notes: dict[str, str] = field(default_factory=dict)
    raw: dict[str, Any] = field(default_factory=dict)

    def add(self, name: str, obj: Any, note: str | None = None):
        self.objects[name] = obj
        self.raw.pop(name, None)
        self.kinds[name] = _kind_of(obj)
        if note:
            self.notes[name] = note

    def get(self, name: str):
        if name not in self.objects:
            raise ValidationError(f"unknown object {name!r}", f"objects.{name}")
        return self.objects[name]

    def to_json(self) -> dict:
        objs = {}
        for name, obj in self.objects.items():
            data = obj.to_json()
            if name in self.raw:
                data = self._restore_refs(self.raw[name], data)
            entry = {"kind": self.kinds[name], "data": data}
            if name in self.notes:
                entry["notes"] = self.notes[name]
            objs[name] = entry
        return {"version": self.version, "objects": objs}

    def _restore_refs(self, raw, out):
        """Put back lattice references that were given by name in the loaded file."""
        if isinstance(raw, str) and isinstance(out, dict):
            ref = self.objects.get(raw)
            if ref is not None and ref.to_json() == out:
                return raw
            return out
        if isinstance(raw, dict) and isinstance(out, dict):
            return {k: self._restore_refs(raw[k], v) if k in raw else v for k, v in out.items()}
        if isinstance(raw, list) and isinstance(out, list) and len(raw) == len(out):
            return [self._restore_refs(r, o) for r, o in zip(raw, out)]
        return out

    def dumps(self) -> str:
        return canonical_dumps(self.to_json())

    @classmethod
    def from_json(cls, d: dict) -> "Workspace":
        if not isinstance(d, dict) or "objects" not in d:
            raise ValidationError("workspace needs an 'objects' map")
        version = d.get("version")
        if version != WORKSPACE_VERSION:
            raise ValidationError(f"unsupported workspace version {version!r}", "version")
        raw = d["objects"]
        if not isinstance(raw, dict):
            raise ValidationError("'objects' must be a map", "objects")
        ws = cls(version=version)
        resolving: set[str] = set()

        def resolve(name: str):
            from .lattice import IntegerLattice
            if name in ws.objects:
                obj = ws.objects[name]
            else:
                if name not in raw:
                    raise ValidationError(f"reference to unknown object {name!r}")
                if name in resolving:
                    raise ValidationError(f"circular reference through {name!r}")
                resolving.add(name)
                obj = load_one(name)
            if not isinstance(obj, IntegerLattice):
                raise ValidationError(f"object {name!r} is not a lattice")
            return obj

        def load_one(name: str):
            entry = raw[name]
            path = f"objects.{name}"
            if not isinstance(entry, dict) or "kind" not in entry or "data" not in entry:
                raise ValidationError("entry needs 'kind' and 'data'", path)
            try:
                obj = decode(entry["kind"], entry["data"], resolve)
            except ValidationError as exc:
                if exc.path.startswith("objects."):
                    raise
                raise ValidationError(exc.message, f"{path}.{exc.path}" if exc.path else path) from exc
            except DomainError as exc:
                raise ValidationError(str(exc), path) from exc
            ws.objects[name] = obj
            ws.raw[name] = entry["data"]
            ws.kinds[name] = entry["kind"]
            if "notes" in entry:
                ws.notes[name] = str(entry["notes"])
            return obj

        for name in sorted(raw):
            if name not in ws.objects:
                load_one(name)
        return ws

    @classmethod
    def loads(cls, text: str) -> "Workspace":
        return cls.from_json(loads(text))


def _kind_of(obj) -> str:
    from .catalog import EmbeddingCatalog
    from .finite_form import FiniteQuadraticSpace, Generatrix, Subspace
    from .lattice import IntegerLattice, LatticeEmbedding
    for cls, kind in ((IntegerLattice, "lattice"), (LatticeEmbedding, "embedding"),
                      (FiniteQuadraticSpace, "form"), (Generatrix, "generatrix"),
                      (Subspace, "subspace"), (EmbeddingCatalog, "catalog")):
        if isinstance(obj, cls):
            return kind
    raise TypeError(f"cannot store {type(obj).__name__} in a workspace")


def decode(kind: str, data, resolve=None):
    from .catalog import EmbeddingCatalog
    from .finite_form import FiniteQuadraticSpace, Generatrix, Subspace
    from .lattice import IntegerLattice, LatticeEmbedding
    if kind == "lattice":
        return IntegerLattice.from_json(data)
    if kind == "embedding":
        return LatticeEmbedding.from_json(data, resolve)
    if kind == "form":
        return FiniteQuadraticSpace.from_json(data)
    if kind == "subspace":
        return Subspace.from_json(data)
    if kind == "generatrix":
        return Generatrix.from_json(data)
    if kind == "catalog":
        return EmbeddingCatalog.from_json(data, resolve)
    raise ValidationError(f"unknown object kind {kind!r}; expected one of {KINDS}")
