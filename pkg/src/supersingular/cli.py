"""Command-line front end: ``supersingular <group> <command> [options]``.

Every run prints one canonical JSON document
``{"report": {...}, "timing": {...}}``.  The ``report`` part holds the
command echo, a digest of the inputs, the results, the package version and
the (fixed) seed; it is byte-identical across repeated runs and across
worker counts.  Timing and worker count live outside it.

Exit codes: 0 success, 1 domain error, 2 cap exceeded or indeterminate,
3 malformed input.
"""
from __future__ import annotations

import argparse
import sys
import time
from dataclasses import replace
from decimal import Decimal, InvalidOperation
from pathlib import Path

from . import __version__, oracles
from .catalog import component_census
from .errors import CapExceeded, DomainError, ExpressionError, FormError, ValidationError
from .finite_form import (FiniteQuadraticSpace, Subspace, artin_invariant_of_generatrix,
                          chain_vector, enumerate_generatrices, is_characteristic, is_neutral,
                          is_strictly_characteristic, parse_gram, rational_part)
from .isometry import IsometrySet, isometry_group
from .lattice import (IntegerLattice, LatticeEmbedding, artin_invariant, discriminant_data,
                      dual_quotient, glue_embedding, is_supersingular_k3, orthogonal_complement,
                      parse_lattice, saturate, saturation_index, signature)
from .periods import (build_marking_context, check_enriques_admissible, induced_involution, orbit,
                      period_point, same_period)
from .serialize import Workspace, canonical_dumps, decode, digest, loads
from .shortvec import definite_sign, enumerate_norm_vectors, vectors_of_norm

SEED = 0
EXIT_OK, EXIT_DOMAIN, EXIT_CAP, EXIT_INPUT = 0, 1, 2, 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _cap(text: str) -> int:
    """Accept ``1000000`` as well as ``1e6``."""
    try:
        value = Decimal(text)
    except InvalidOperation:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}")
    if value != value.to_integral_value() or value < 1:
        raise argparse.ArgumentTypeError(f"cap must be a positive integer: {text!r}")
    return int(value)


def _matrix(text: str) -> tuple[tuple[int, ...], ...]:
    try:
        return parse_gram(text)
    except ValueError as exc:
        raise ExpressionError(f"bad matrix {text!r}: {exc}") from exc


# -- input loading ----------------------------------------------------------------

_texts: dict[str, str] = {}


def _read_text(path: str) -> str:
    """File contents, with '-' meaning stdin (read once per run)."""
    if path not in _texts:
        _texts[path] = sys.stdin.read() if path == "-" else Path(path).read_text()
    return _texts[path]


def _read_json(path: str):
    return loads(_read_text(path))


def _load(path: str, kind: str, name: str | None = None):
    """A single object of ``kind`` from a plain JSON file or from a workspace."""
    data = _read_json(path)
    if isinstance(data, dict) and "objects" in data:
        ws = Workspace.from_json(data)
        if name is None:
            names = [n for n, k in ws.kinds.items() if k == kind]
            if len(names) != 1:
                raise ValidationError(f"workspace holds {len(names)} objects of kind {kind!r}; "
                                      "pick one with --name")
            name = names[0]
        if ws.kinds.get(name) != kind:
            raise ValidationError(f"object {name!r} is not a {kind}", f"objects.{name}")
        return ws.get(name)
    return decode(kind, data)


def _lattice(args, prefix="") -> IntegerLattice:
    expr = getattr(args, prefix + "lattice", None)
    path = getattr(args, prefix + "in_file", None)
    if expr is not None:
        return parse_lattice(expr)
    if path is not None:
        return _load(path, "lattice", args.name)
    raise UsageError("give a lattice with --lattice EXPR or --in FILE")


def _embedding(args) -> LatticeEmbedding:
    if args.embedding is not None:
        return _load(args.embedding, "embedding", args.name)
    if args.ambient is None or args.source is None or args.columns is None:
        raise UsageError("give --embedding FILE or all of --ambient, --source, --columns")
    N, S = parse_lattice(args.ambient), parse_lattice(args.source)
    cols = _matrix(args.columns)
    if any(len(c) != N.rank for c in cols):
        raise ExpressionError("each column needs one entry per ambient basis vector")
    matrix = tuple(tuple(c[i] for c in cols) for i in range(N.rank))
    return LatticeEmbedding(S, N, matrix)


def _space(args) -> FiniteQuadraticSpace:
    try:
        return FiniteQuadraticSpace(args.p, _matrix(args.gram))
    except FormError as exc:
        raise ValidationError(str(exc), "--gram") from exc


def _subspace(args, path_attr="generatrix", basis_attr="basis") -> Subspace:
    path = getattr(args, path_attr)
    if path is not None:
        return _load(path, "generatrix", args.name)
    basis = getattr(args, basis_attr)
    if basis is None or args.gram is None or args.p is None:
        raise UsageError("give a generatrix file or --p, --m, --gram and --basis (field codes)")
    return Subspace.span(_space(args), args.m, _matrix(basis))


# -- result helpers ------------------------------------------------------------------

def _rows(m):
    return [list(r) for r in m]


def _basis(S: Subspace):
    return S.to_json()["basis"]


def _ctx(args):
    gamma = _embedding(args)
    stab = IsometrySet.trivial(gamma.target) if getattr(args, "trivial_stabilizer", False) else None
    return build_marking_context(gamma.target, args.p, gamma, stab, rank_cap=args.cap_rank,
                                 element_cap=args.cap_group)


def _ctx_generatrix(ctx, path, name):
    G = _load(path, "generatrix", name)
    if G.ambient != ctx.dual.space:
        raise DomainError("generatrix does not live in pN^v/pN of this context")
    return G


# -- commands ---------------------------------------------------------------------------

def cmd_lattice_invariants(args):
    L = _lattice(args)
    out = {"lattice": L.to_json(), "rank": L.rank, "det": L.det, "even": L.is_even,
           "signature": list(signature(L)) if L.rank else [0, 0]}
    if args.p is not None:
        data = discriminant_data(L, args.p)
        out.update({"elementary_divisors": list(data.elementary_divisors),
                    "group_order": data.group_order, "p_elementary": data.p_elementary,
                    "p_length": data.p_length})
        if data.p_elementary and L.is_even and data.p_length % 2 == 0:
            out["artin_invariant"] = artin_invariant(L, args.p)
            out["genuine_k3"] = is_supersingular_k3(L, args.p)
            V = dual_quotient(L, args.p).space
            out["dual_quotient"] = {"gram": _rows(V.gram),
                                    "neutral": is_neutral(V) if V.dim else True}
    return out


def cmd_lattice_roots(args):
    L = _lattice(args)
    if args.norm < 0:
        vecs = enumerate_norm_vectors(L, args.norm, args.workers)
    else:
        if L.rank and definite_sign(L) != 1:
            raise DomainError("positive norms need a positive definite lattice")
        vecs = vectors_of_norm(L.gram, args.norm, args.workers)
    return {"norm": args.norm, "count": len(vecs), "vectors": _rows(vecs)}


def cmd_lattice_autgroup(args):
    L = _lattice(args)
    grp = isometry_group(L, args.cap_rank, args.cap_group)
    out = {"order": grp.order, "generators": [_rows(g) for g in grp.generators]}
    if args.elements:
        out["elements"] = [_rows(g) for g in grp.elements()]
    return out


def cmd_lattice_complement(args):
    K, inc = orthogonal_complement(_embedding(args))
    return {"complement": K.to_json(), "inclusion": _rows(inc.matrix)}


def cmd_lattice_saturate(args):
    emb = _embedding(args)
    sat = saturate(emb)
    return {"index": saturation_index(emb), "primitive": saturation_index(emb) == 1,
            "saturation": sat.to_json()}


def cmd_lattice_glue(args):
    L = _lattice(args)
    dq = dual_quotient(L, args.p)
    glue = Subspace.span(dq.space, 1, _matrix(args.glue) if args.glue else ())
    j = glue_embedding(L, args.p, glue)
    return {"overlattice": j.target.to_json(), "det": j.target.det, "even": j.target.is_even,
            "glue_dim": glue.dim, "embedding": _rows(j.matrix)}


def cmd_form_neutral(args):
    V = _space(args)
    return {"p": V.p, "dim": V.dim, "det": V.det, "neutral": is_neutral(V)}


def cmd_gen_enumerate(args):
    V = _space(args)
    gens = enumerate_generatrices(V, args.m, args.filter, args.cap_grassmannian, args.workers)
    return {"filter": args.filter, "m": args.m, "count": len(gens),
            "generatrices": [_basis(G) for G in gens]}


def cmd_gen_check(args):
    G = _subspace(args)
    out = {"dim": G.dim, "totally_isotropic": G.is_totally_isotropic(), "rational": G.is_rational()}
    if 2 * G.dim == G.ambient.dim:
        char = is_characteristic(G)
        out["characteristic"] = char
        out["strict"] = is_strictly_characteristic(G)
        lam = rational_part(G)
        out["rational_part"] = _basis(lam)
        out["artin_invariant"] = artin_invariant_of_generatrix(G) if char else None
    return out


def cmd_gen_chain(args):
    G = _subspace(args)
    ch = chain_vector(G)
    F = G.field
    coeffs = lambda v: [list(F.coeffs(x)) for x in v]
    return {"x0": coeffs(ch.x0), "vectors": [coeffs(v) for v in ch.vectors],
            "pairing": [coeffs(r) for r in ch.pairing], "is_basis": ch.is_basis,
            "pairing_ok": ch.pairing_ok}


def cmd_ctx_build(args):
    ctx = _ctx(args)
    out = {"context_id": ctx.context_id, "complement": ctx.complement.to_json(),
           "stabilizer_order": len(ctx.stabilizer), "genuine_k3": ctx.genuine_k3,
           "dual_quotient": _rows(ctx.dual.space.gram), "distinct_actions": len(ctx.actions)}
    if args.elements:
        out["stabilizer"] = [_rows(g) for g in ctx.stabilizer.elements()]
    return out


def cmd_ctx_admissible(args):
    return check_enriques_admissible(_ctx(args)).to_json()


def cmd_ctx_involution(args):
    return {"involution": _rows(induced_involution(_ctx(args)))}


def cmd_period_orbit(args):
    ctx = _ctx(args)
    G = _ctx_generatrix(ctx, args.generatrix, None)
    P = period_point(ctx, G)
    return {"period_point": P.to_json(), "orbit": [_basis(H) for H in orbit(ctx, G)]}


def cmd_period_compare(args):
    ctx = _ctx(args)
    P1 = period_point(ctx, _ctx_generatrix(ctx, args.generatrix, None))
    P2 = period_point(ctx, _ctx_generatrix(ctx, args.other, None))
    return {"same": same_period(P1, P2), "first": P1.to_json(), "second": P2.to_json()}


def cmd_census(args):
    cat = _load(args.catalog, "catalog", args.name)
    return component_census(replace(cat, orbit_cap=args.cap_orbit)).to_json()


# -- oracle -----------------------------------------------------------------------------------

def oracle_box_roots(args):
    L = _lattice(args)
    vecs = oracles.box_roots(L.gram, args.norm)
    out = {"count": len(vecs), "vectors": _rows(vecs)}
    if args.compare:
        main = enumerate_norm_vectors(L, args.norm) if args.norm < 0 else vectors_of_norm(L.gram, args.norm)
        out["main_count"] = len(main)
        out["match"] = [tuple(v) for v in main] == vecs
    return out


def oracle_iso_subspaces(args):
    V = _space(args)
    subs = oracles.iso_subspaces(V.p, V.gram)
    out = {"count": len(subs), "subspaces": [_rows(s) for s in subs]}
    if args.compare:
        out["main_neutral"] = is_neutral(V, cross_check=False)
        out["match"] = out["main_neutral"] == bool(subs)
    return out


def oracle_gen_census(args):
    V = _space(args)
    census = oracles.gen_census(V.p, args.m, V.gram)
    out = {"counts": {k: len(v) for k, v in census.items()},
           args.filter: [[[list(c) for c in row] for row in g] for g in census[args.filter]]}
    if args.compare:
        match = {}
        for flt in ("isotropic", "characteristic", "strict"):
            main = enumerate_generatrices(V, args.m, flt, args.cap_grassmannian)
            match[flt] = sorted(tuple(tuple(tuple(c) for c in row) for row in _basis(G))
                                for G in main) == census[flt]
        out["match"] = match
    return out


def oracle_group_expand(args):
    L = _lattice(args)
    els = oracles.group_expand(L.gram, args.cap_group)
    out = {"order": len(els)}
    if args.elements:
        out["elements"] = [_rows(g) for g in els]
    if args.compare:
        main = isometry_group(L, args.cap_rank, args.cap_group)
        out["main_order"] = main.order
        out["match"] = sorted(main.elements()) == els
    return out


def oracle_orbit_brute(args):
    ctx = _ctx(args)
    G = _ctx_generatrix(ctx, args.generatrix, None)
    stab = oracles.stabilizer_brute(ctx.ambient.gram, ctx.gamma.matrix, ctx.complement.gram,
                                    ctx.inclusion.matrix, args.cap_group)
    orb = oracles.orbit_brute(stab, ctx.dual.lifts, ctx.dual.pivots, ctx.p, G.m, G.rows)
    F = G.field
    as_json = [[[list(F.coeffs(x)) for x in row] for row in rows] for rows in orb]
    out = {"stabilizer_order": len(stab), "orbit_size": len(orb), "orbit": as_json}
    if args.compare:
        out["main_orbit_size"] = len(orbit(ctx, G))
        out["match"] = [_basis(H) for H in orbit(ctx, G)] == as_json
    return out


# -- parser ----------------------------------------------------------------------------------

def _common(p: argparse.ArgumentParser):
    p.add_argument("--cap-group", type=_cap, default=10 ** 6, help="isometry group element cap")
    p.add_argument("--cap-grassmannian", type=_cap, default=10 ** 8,
                   help="largest Grassmannian scanned by generatrix enumeration")
    p.add_argument("--cap-orbit", type=_cap, default=10 ** 5, help="orbit search cap")
    p.add_argument("--cap-rank", type=_cap, default=8, help="largest rank for isometry groups")
    p.add_argument("--workers", type=int, default=1, help="worker processes for enumerations")
    p.add_argument("--name", help="object name when an input file is a workspace")


def _lattice_args(p):
    p.add_argument("--lattice", help="lattice expression, e.g. 'sum(U,E8(-1))'")
    p.add_argument("--in", dest="in_file", help="lattice JSON or workspace file ('-' for stdin)")


def _embedding_args(p):
    p.add_argument("--embedding", help="embedding JSON or workspace file ('-' for stdin)")
    p.add_argument("--ambient", help="target lattice expression")
    p.add_argument("--source", help="source lattice expression")
    p.add_argument("--columns", help="images of the source basis, 'a,b,..;c,d,..'")


def _form_args(p, m=True):
    p.add_argument("--p", type=int, required=True)
    p.add_argument("--gram", required=True, help="Gram matrix over F_p, rows separated by ';'")
    if m:
        p.add_argument("--m", type=int, default=1, help="extension degree")


COMMANDS = {
    ("lattice", "invariants"): cmd_lattice_invariants,
    ("lattice", "roots"): cmd_lattice_roots,
    ("lattice", "autgroup"): cmd_lattice_autgroup,
    ("lattice", "complement"): cmd_lattice_complement,
    ("lattice", "saturate"): cmd_lattice_saturate,
    ("lattice", "glue"): cmd_lattice_glue,
    ("form", "neutral"): cmd_form_neutral,
    ("gen", "enumerate"): cmd_gen_enumerate,
    ("gen", "check"): cmd_gen_check,
    ("gen", "chain"): cmd_gen_chain,
    ("ctx", "build"): cmd_ctx_build,
    ("ctx", "admissible"): cmd_ctx_admissible,
    ("ctx", "involution"): cmd_ctx_involution,
    ("period", "orbit"): cmd_period_orbit,
    ("period", "compare"): cmd_period_compare,
    ("oracle", "box-roots"): oracle_box_roots,
    ("oracle", "iso-subspaces"): oracle_iso_subspaces,
    ("oracle", "gen-census"): oracle_gen_census,
    ("oracle", "group-expand"): oracle_group_expand,
    ("oracle", "orbit-brute"): oracle_orbit_brute,
}


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="supersingular",
                     description="Exact lattice and finite-field computations for supersingular "
                                 "K3 and Enriques period data.")
    parser.add_argument("--version", action="version", version=__version__)
    groups = parser.add_subparsers(dest="group", required=True, parser_class=_Parser)
    subs = {}
    for group in ("lattice", "form", "gen", "ctx", "period", "oracle"):
        g = groups.add_parser(group)
        subs[group] = g.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def add(group, name, help_text):
        p = subs[group].add_parser(name, help=help_text)
        _common(p)
        return p

    p = add("lattice", "invariants", "rank, determinant, signature, discriminant data")
    _lattice_args(p)
    p.add_argument("--p", type=int)
    p = add("lattice", "roots", "all vectors of a given norm in a definite lattice")
    _lattice_args(p)
    p.add_argument("--norm", type=int, default=-2)
    p = add("lattice", "autgroup", "isometry group of a definite lattice")
    _lattice_args(p)
    p.add_argument("--elements", action="store_true", help="list every element")
    for name, text in (("complement", "orthogonal complement of an embedding"),
                       ("saturate", "saturation of an embedding and its index")):
        _embedding_args(add("lattice", name, text))
    p = add("lattice", "glue", "overlattice from an isotropic glue subspace of pL^v/pL")
    _lattice_args(p)
    p.add_argument("--p", type=int, required=True)
    p.add_argument("--glue", default="", help="glue rows over F_p, ';'-separated")

    _form_args(add("form", "neutral", "does a half-dimensional isotropic subspace exist"), m=False)

    p = add("gen", "enumerate", "list generatrices of V (x) F_{p^m}")
    _form_args(p)
    p.add_argument("--filter", choices=("isotropic", "characteristic", "strict"),
                   default="characteristic")
    for name, text in (("check", "classify one subspace"), ("chain", "Frobenius chain of x0")):
        p = add("gen", name, text)
        p.add_argument("--generatrix", help="generatrix JSON or workspace file")
        p.add_argument("--p", type=int)
        p.add_argument("--gram")
        p.add_argument("--m", type=int, default=1)
        p.add_argument("--basis", help="rows of field codes, ';'-separated")

    for name, text in (("build", "complement, stabilizer and context id of a marking"),
                       ("admissible", "primitivity, root-free complement, sigma bound"),
                       ("involution", "+1 on the marked image, -1 on its complement")):
        p = add("ctx", name, text)
        _embedding_args(p)
        p.add_argument("--p", type=int, required=True)
        if name == "build":
            p.add_argument("--elements", action="store_true", help="list stabilizer elements")

    for name, text in (("orbit", "period point and stabilizer orbit of a generatrix"),
                       ("compare", "do two generatrices give the same period point")):
        p = add("period", name, text)
        _embedding_args(p)
        p.add_argument("--p", type=int, required=True)
        p.add_argument("--generatrix", required=True)
        p.add_argument("--trivial-stabilizer", action="store_true",
                       help="use the trivial group instead of the computed stabilizer")
        if name == "compare":
            p.add_argument("--other", required=True)

    p = groups.add_parser("census", help="component census of an embedding catalog")
    _common(p)
    p.add_argument("--catalog", required=True, help="catalog JSON or workspace file")

    p = add("oracle", "box-roots", "naive box search for vectors of a given norm")
    _lattice_args(p)
    p.add_argument("--norm", type=int, default=-2)
    p = add("oracle", "iso-subspaces", "exhaustive search for half-dimensional isotropic subspaces")
    _form_args(p, m=False)
    p = add("oracle", "gen-census", "scan of the whole Grassmannian")
    _form_args(p)
    p.add_argument("--filter", choices=("isotropic", "characteristic", "strict"),
                   default="characteristic")
    p = add("oracle", "group-expand", "full isometry group by direct search")
    _lattice_args(p)
    p.add_argument("--elements", action="store_true")
    p = add("oracle", "orbit-brute", "orbit under a brute-force stabilizer")
    _embedding_args(p)
    p.add_argument("--p", type=int, required=True)
    p.add_argument("--generatrix", required=True)
    for name in ("box-roots", "iso-subspaces", "gen-census", "group-expand", "orbit-brute"):
        subs["oracle"].choices[name].add_argument(
            "--compare", action="store_true", help="also run the main code and report agreement")
    return parser


_NOT_ECHOED = {"group", "command", "workers"}


def _echo(args) -> dict:
    return {k: v for k, v in sorted(vars(args).items()) if k not in _NOT_ECHOED and v is not None}


def _input_digest(args) -> str:
    files = {}
    for key in ("in_file", "embedding", "generatrix", "other", "catalog"):
        path = getattr(args, key, None)
        if path:
            files[key] = digest(_read_json(path))
    return digest({"options": _echo(args), "files": files})


def run(argv=None) -> tuple[int, dict]:
    """Execute one command; returns (exit code, output document)."""
    start = time.perf_counter()
    command = None
    report: dict = {"version": __version__, "seed": SEED}
    workers = 1
    _texts.clear()
    try:
        args = build_parser().parse_args(argv)
        workers = args.workers
        if args.group == "census":
            command, func = "census", cmd_census
        else:
            command, func = f"{args.group} {args.command}", COMMANDS[(args.group, args.command)]
        report["command"] = command
        report["options"] = _echo(args)
        report["inputs_digest"] = _input_digest(args)
        report["results"] = func(args)
        code = EXIT_OK
    except UsageError as exc:
        code, report["error"] = EXIT_INPUT, {"type": "usage", "message": str(exc)}
    except (ValidationError, ExpressionError) as exc:
        code, report["error"] = EXIT_INPUT, {"type": type(exc).__name__, "message": str(exc)}
    except DomainError as exc:
        code, report["error"] = EXIT_DOMAIN, {"type": type(exc).__name__, "message": str(exc)}
    except (OSError, ValueError) as exc:
        code, report["error"] = EXIT_INPUT, {"type": type(exc).__name__, "message": str(exc)}
    except CapExceeded as exc:
        code, report["error"] = EXIT_CAP, {"type": type(exc).__name__, "message": str(exc)}
    report.setdefault("command", command)
    report["exit_code"] = code
    doc = {"report": report,
           "timing": {"seconds": round(time.perf_counter() - start, 6), "workers": workers}}
    return code, doc


def main(argv=None) -> int:
    code, doc = run(argv)
    if code != EXIT_OK:
        print(doc["report"]["error"]["message"], file=sys.stderr)
    sys.stdout.write(canonical_dumps(doc) + "\n")
    return code


if __name__ == "__main__":
    sys.exit(main())
