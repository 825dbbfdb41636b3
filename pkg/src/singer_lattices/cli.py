"""Command-line interface.

Exit codes: 0 on success, 1 when a verification fails, 2 on usage errors.
"""

from __future__ import annotations

import argparse
import json
import sys
from typing import Sequence

from . import homology as hom
from .errors import SingerLatticeError
from .groups import is_regular_action
from .hjelmslev import HypothesisViolated, cmsz_test, hjelmslev_plane
from .lattice import (
    ONE_PANEL,
    TWO_PANEL,
    A2LatticeSpec,
    C2LatticeSpec,
    SpecInvalid,
    a2_complex_of_groups,
    a2_expected_links,
    a2_mechanical_presentation,
    a2_presentation,
    building_skeleton,
    c2_complex_of_groups,
    c2_expected_links,
    c2_mechanical_presentation,
    c2_presentation,
)
from .polygon import PolygonFailure, verify_generalized_polygon
from .scwol import local_development_check, presentations_match
from .singer import DifferenceSet, NotPrimePower, plane_from_difference_set, singer_difference_set, slanted_quadrangle

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


def _perm(text: str) -> tuple[int, ...]:
    try:
        return tuple(int(x) for x in text.split(","))
    except ValueError:
        raise UsageError(f"cannot parse {text!r} as a comma-separated permutation") from None


def _triple(text: str | None) -> tuple | None:
    if text is None:
        return None
    parts = text.split("/")
    if len(parts) != 3:
        raise UsageError(f"expected three '/'-separated lists, got {text!r}")
    return tuple(_perm(p) for p in parts)


def a2_spec_from_args(args) -> A2LatticeSpec:
    orderings = None if args.order in (None, "identity") else _triple(args.order)
    deltas = _triple(args.deltas)
    n = args.q * args.q + args.q + 1
    if deltas is not None:
        deltas = tuple(DifferenceSet(n, d) for d in deltas)
    spec = A2LatticeSpec.cyclic(args.q, orderings, deltas)
    spec.validate()
    return spec


def c2_spec_from_args(args) -> C2LatticeSpec:
    lam = _perm(args.lam) if args.lam else None
    lam_prime = _perm(args.lam_prime) if args.lam_prime else None
    spec = C2LatticeSpec.default(args.q, args.family, lam, lam_prime)
    spec.validate()
    return spec


def _emit(args, text: str) -> None:
    if getattr(args, "output", None):
        with open(args.output, "w", encoding="utf-8") as fh:
            fh.write(text if text.endswith("\n") else text + "\n")
    else:
        print(text)


# subcommands

def cmd_diffset(args) -> int:
    d = singer_difference_set(args.q)
    bad = d.violation()
    if args.format == "json":
        _emit(args, json.dumps({"n": d.n, "residues": list(d.residues), "perfect": bad is None}))
    else:
        _emit(args, f"Δ = {{{','.join(map(str, d.residues))}}} mod {d.n}")
    if bad is not None:
        print(f"not perfect: residue {bad[0]} has representations {bad[1]}", file=sys.stderr)
        return EXIT_FAIL
    return EXIT_OK


def cmd_plane(args) -> int:
    sp = plane_from_difference_set(singer_difference_set(args.q))
    if args.format == "json":
        _emit(args, sp.plane.to_json())
        return EXIT_OK
    if args.format == "dot":
        _emit(args, sp.plane.to_dot(f"PG2_{args.q}"))
        return EXIT_OK
    lines = [f"Singer plane of order {args.q}: {len(sp.plane.points)} points, {len(sp.plane.lines)} lines",
             f"Δ = {sp.delta}"]
    status = EXIT_OK
    try:
        cert = verify_generalized_polygon(sp.plane, 3)
        lines.append(f"generalized {cert.m}-gon of order {cert.order}")
    except PolygonFailure as exc:
        lines.append(f"polygon check failed: {exc!r}")
        status = EXIT_FAIL
    for kind, act in (("points", sp.point_action()), ("lines", sp.line_action())):
        reg = is_regular_action(act)
        lines.append(f"Singer cycle regular on {kind}: {bool(reg)}")
        status = status if reg else EXIT_FAIL
    _emit(args, "\n".join(lines))
    return status


def cmd_quadrangle(args) -> int:
    sq = slanted_quadrangle(args.q)
    Q = sq.quadrangle
    if args.format == "json":
        _emit(args, sq.to_json())
        return EXIT_OK
    if args.format == "dot":
        _emit(args, Q.to_dot(f"W{args.q}"))
        return EXIT_OK
    q = args.q
    out = [f"W({q})♦: {len(Q.points)} points, {len(Q.lines)} lines"]
    status = EXIT_OK
    try:
        cert = verify_generalized_polygon(Q, 4)
        out.append(f"generalized {cert.m}-gon of order {cert.order}")
        if cert.order != (q - 1, q + 1):
            status = EXIT_FAIL
    except PolygonFailure as exc:
        out.append(f"polygon check failed: {exc!r}")
        status = EXIT_FAIL
    reg = is_regular_action(sq.action)
    out.append(f"E regular on points: {bool(reg)}")
    sizes = [len(s) for s in sq.stabilizers]
    out.append(f"line representative stabilizer orders: {sizes}")
    if not reg or any(s != q for s in sizes):
        status = EXIT_FAIL
    _emit(args, "\n".join(out))
    return status


def _presentation_for(args):
    if args.kind == "a2":
        spec = a2_spec_from_args(args)
        return spec, a2_presentation(spec), (lambda: a2_mechanical_presentation(spec))
    spec = c2_spec_from_args(args)
    return spec, c2_presentation(spec), (lambda: c2_mechanical_presentation(spec))


def cmd_present(args) -> int:
    spec, P, mech = _presentation_for(args)
    if args.format == "json":
        _emit(args, json.dumps({"spec": json.loads(spec.to_json()), "presentation": json.loads(P.to_json()),
                                "skeleton": str(building_skeleton(spec))}, ensure_ascii=False))
    else:
        out = [str(P), str(building_skeleton(spec))]
        _emit(args, "\n".join(out))
    if args.check:
        M = mech()
        if not presentations_match(P, M):
            print("mechanical fundamental group differs:", file=sys.stderr)
            print("  expected: " + str(P), file=sys.stderr)
            print("  computed: " + str(M), file=sys.stderr)
            return EXIT_FAIL
        print("mechanical fundamental group matches")
    return EXIT_OK


def _complex_for(args):
    if args.kind == "a2":
        spec = a2_spec_from_args(args)
        return a2_complex_of_groups(spec), a2_expected_links(spec), ["v1", "v2", "v3"]
    spec = c2_spec_from_args(args)
    expected = c2_expected_links(spec)
    fast = ["v", "v'", "w"] if spec.family == TWO_PANEL else ["v", "v'"] + [f"v{j}" for j in range(spec.q + 2)]
    return c2_complex_of_groups(spec), expected, fast


def cmd_verify_links(args) -> int:
    C, expected, fast = _complex_for(args)
    vertices = sorted(C.scwol.vertices) if args.level == "full" else fast
    status = EXIT_OK
    for v in vertices:
        res = local_development_check(C, v, expected[v])
        print(f"{v}: {'ok' if res else 'FAIL'}" + ("" if res else f" ({res.reason})"))
        if not res:
            status = EXIT_FAIL
    return status


def cmd_hjelmslev(args) -> int:
    spec = a2_spec_from_args(args)
    H = hjelmslev_plane(spec)
    if args.format == "json":
        _emit(args, H.to_json())
    elif args.format == "dot":
        _emit(args, H.to_dot())
    else:
        _emit(args, f"P²: {len(H.points)} points, L²: {len(H.lines)} lines, "
                    f"{sum(len(v) for v in H.adjacency.values())} adjacent pairs")
    if args.cmsz:
        try:
            verdict = cmsz_test(H)
        except HypothesisViolated as exc:
            print(f"cmsz test not applicable: {exc}", file=sys.stderr)
            return EXIT_USAGE
        if verdict.kind == "ProjectivePlaneOfOrder":
            sub = str(verdict.order).translate(str.maketrans("0123456789", "₀₁₂₃₄₅₆₇₈₉"))
            print(f"ProjectivePlaneOfOrder({verdict.order}): inconsistent with Sl₃(ℚ{sub}) building")
        else:
            print(str(verdict))
    return EXIT_OK


def cmd_homology(args) -> int:
    if args.kind == "a2":
        spec = a2_spec_from_args(args)
        integral, rational = hom.a2_homology_table(spec, args.max_degree)
        ab = hom.abelianization(a2_presentation(spec))
        if args.format == "json":
            _emit(args, json.dumps({"integral": json.loads(integral.to_json()),
                                    "rational": json.loads(rational.to_json())}, ensure_ascii=False))
        else:
            _emit(args, f"H₁ = {integral[1]}  (ker 𝒟; abelianization gives {ab})\n{integral}\n{rational}")
        return EXIT_OK if ab == integral[1] else EXIT_FAIL
    spec = c2_spec_from_args(args)
    if spec.family != ONE_PANEL:
        rational = hom.c2_rational_homology(spec, args.max_degree)
        _emit(args, rational.to_json() if args.format == "json" else str(rational))
        return EXIT_OK
    h = hom.c2_homology(spec)
    if args.format == "json":
        _emit(args, json.dumps({"integral": json.loads(h.integral.to_json()),
                                "rational": json.loads(h.rational.to_json()),
                                "closed_form_h1": h.closed_form_h1.to_dict(), "agrees": h.agrees},
                               ensure_ascii=False))
    else:
        _emit(args, f"H₁ = {h.abelianization_h1}  (closed form {h.closed_form_h1})\n{h.integral}\n{h.rational}")
    return EXIT_OK if h.agrees else EXIT_FAIL


def cmd_export(args) -> int:
    if args.what == "diffset":
        _emit(args, singer_difference_set(args.q).to_json())
    elif args.what == "plane":
        I = plane_from_difference_set(singer_difference_set(args.q)).plane
        _emit(args, I.to_dot(f"PG2_{args.q}") if args.format == "dot" else I.to_json())
    elif args.what == "quadrangle":
        sq = slanted_quadrangle(args.q)
        _emit(args, sq.quadrangle.to_dot(f"W{args.q}") if args.format == "dot" else sq.to_json())
    elif args.what in ("a2-complex", "c2-complex"):
        args.kind = args.what[:2]
        C, _, _ = _complex_for(args)
        if args.format == "dot":
            _emit(args, C.scwol.to_dot())
        else:
            _emit(args, json.dumps({"name": C.name, "vertices": [str(v) for v in C.scwol.vertices],
                                    "edges": {str(a): [str(x) for x in e] for a, e in C.scwol.edges.items()},
                                    "groups": {str(v): C.group(v).order() for v in C.scwol.vertices}},
                                   ensure_ascii=False))
    elif args.what == "hjelmslev":
        H = hjelmslev_plane(a2_spec_from_args(args))
        _emit(args, H.to_dot() if args.format == "dot" else H.to_json())
    return EXIT_OK


# parser

def _add_q(p, required=True):
    p.add_argument("--q", type=int, required=required, help="order q (a prime power)")


def _add_a2(p):
    p.add_argument("--order", default="identity",
                   help="'identity' or three '/'-separated index permutations, e.g. 0,2,1/0,1,2/0,1,2")
    p.add_argument("--deltas", default=None, help="three '/'-separated difference sets, e.g. 0,1,3/0,1,3/0,1,3")


def _add_c2(p):
    p.add_argument("--family", choices=[TWO_PANEL, ONE_PANEL], default=TWO_PANEL)
    p.add_argument("--lam", default=None, help="λ as a comma-separated permutation of 0..q+1")
    p.add_argument("--lam-prime", default=None, help="λ' as a comma-separated permutation of 0..q+1")


def _add_format(p, choices=("text", "json", "dot")):
    p.add_argument("--format", choices=list(choices), default="text")
    p.add_argument("--output", "-o", default=None, help="write to this file instead of stdout")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="singer-lattices",
                                 description="Singer cyclic lattices in Ã2 and C̃2 buildings")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("diffset", help="Singer perfect difference set of order q")
    _add_q(p)
    _add_format(p, ("text", "json"))
    p.set_defaults(func=cmd_diffset)

    p = sub.add_parser("plane", help="cyclic projective plane with verification")
    _add_q(p)
    _add_format(p)
    p.set_defaults(func=cmd_plane)

    p = sub.add_parser("quadrangle", help="slanted symplectic quadrangle W(q)♦")
    _add_q(p)
    _add_format(p)
    p.set_defaults(func=cmd_quadrangle)

    for name, func, doc in (("present", cmd_present, "lattice presentation"),
                            ("verify-links", cmd_verify_links, "local development checks"),
                            ("homology", cmd_homology, "group homology")):
        p = sub.add_parser(name, help=doc)
        kinds = p.add_subparsers(dest="kind", required=True)
        for kind, adder in (("a2", _add_a2), ("c2", _add_c2)):
            k = kinds.add_parser(kind)
            _add_q(k)
            adder(k)
            if name == "present":
                _add_format(k, ("text", "json"))
                k.add_argument("--check", action="store_true",
                               help="also compute the fundamental group of the complex and compare")
            elif name == "verify-links":
                k.add_argument("--full", dest="level", action="store_const", const="full", default="fast",
                               help="check every vertex, not only those with nontrivial local groups")
            else:
                _add_format(k, ("text", "json"))
                k.add_argument("--max-degree", type=int, default=6)
            k.set_defaults(func=func)

    p = sub.add_parser("hjelmslev", help="level-2 Hjelmslev plane around a vertex of the Ã2 building")
    _add_q(p)
    _add_a2(p)
    _add_format(p)
    p.add_argument("--cmsz", action="store_true", help="run the substructure classicality test")
    p.set_defaults(func=cmd_hjelmslev)

    p = sub.add_parser("export", help="write a structure as JSON or DOT")
    p.add_argument("what", choices=["diffset", "plane", "quadrangle", "a2-complex", "c2-complex", "hjelmslev"])
    _add_q(p)
    _add_a2(p)
    _add_c2(p)
    _add_format(p, ("json", "dot"))
    p.set_defaults(func=cmd_export)
    return ap


def run(argv: Sequence[str] | None = None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    try:
        return args.func(args)
    except (UsageError, SpecInvalid, NotPrimePower) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except SingerLatticeError as exc:
        if isinstance(exc, ValueError):
            print(f"error: {exc}", file=sys.stderr)
            return EXIT_USAGE
        print(f"verification failed: {exc!r}", file=sys.stderr)
        return EXIT_FAIL


def main() -> None:
    sys.exit(run())
