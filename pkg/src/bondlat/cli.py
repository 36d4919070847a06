"""Command-line front end.

Every subcommand reads one JSON document (--input, default stdin), writes
one JSON document (--output, default stdout), and exits 0 on success, 1 on
a domain rejection (infeasible system, failed certification, infinite
game; the verdict is still written), or 2 on malformed input.  Outputs are
deterministic byte-for-byte and compose: `reduce` output feeds
`enumerate`, encoder outputs feed any system-taking subcommand.
"""

from __future__ import annotations

import argparse
import sys

from . import jsonio
from .bonds import InfeasibleSystemError, find_initial_bond
from .checker import PosetError, brute_uld, certify_lld_cover, certify_uld_cover
from .chipfire import (
    FINITE,
    ChipError,
    build_complete_game,
    build_game,
    certify_game,
    check_complete_game_representation,
)
from .dotexport import bond_labels, cover_digraph_dot, game_dot
from .graph import GraphError, NonPlanarError, id_key, spanning_tree
from .instances import (
    AlphaSpec,
    ExcessImbalanceError,
    FlowSpec,
    ParityError,
    encode_alpha_orientations,
    encode_c_orientations,
    encode_flows,
    encode_potentials,
)
from .jsonio import InputFormatError, dumps
from .lattice import CapExceededError, enumerate_lattice, meet_irreducible_indices


def _cli_id(text: str):
    """Vertex/arc ids on the command line: integer-looking means integer."""
    try:
        return int(text)
    except ValueError:
        return text


def _load(path: str):
    if path == "-":
        return jsonio.loads(sys.stdin.read())
    try:
        with open(path, "r", encoding="utf-8") as handle:
            return jsonio.loads(handle.read())
    except OSError as exc:
        raise InputFormatError(path, f"cannot read input: {exc.strerror}") from None


def _emit(path: str, text: str):
    if path == "-":
        sys.stdout.write(text)
    else:
        with open(path, "w", encoding="utf-8") as handle:
            handle.write(text)


def _doc_forbidden(doc, args):
    if args.forbidden is not None:
        return args.forbidden
    if isinstance(doc, dict) and "forbidden" in doc:
        value = doc["forbidden"]
        if isinstance(value, bool) or not isinstance(value, (int, str)):
            raise InputFormatError("forbidden", f"ids must be integers or strings, got {value!r}")
        return value
    return None


# ---------------------------------------------------------------------------
# subcommand handlers; each returns (exit code, payload, dot text or None)


def _cmd_reduce(args, doc):
    system = jsonio.parse_system(doc, args.forbidden)
    try:
        reduced, cmap = system.reduce()
    except InfeasibleSystemError as exc:
        return 1, jsonio.infeasible_json(exc), None
    payload = jsonio.system_json(reduced)
    payload["contraction"] = jsonio.contraction_json(cmap)
    return 0, payload, None


def _cmd_find_bond(args, doc):
    system = jsonio.parse_system(doc, args.forbidden)
    try:
        bond = find_initial_bond(system)
    except InfeasibleSystemError as exc:
        return 1, jsonio.infeasible_json(exc), None
    return 0, {"bond": jsonio.bond_json(bond, system.graph)}, None


def _enumerate_component(system, cap, analyze):
    reduced, cmap = system.reduce()
    cd = enumerate_lattice(reduced, cap=cap)
    payload = {
        "count": cd.n,
        "elements": [
            {str(a): v for a, v in sorted(cmap.expand(x).values.items(), key=lambda kv: id_key(kv[0]))}
            for x in cd.elements
        ],
        "covers": [[lo, hi, color] for lo, hi, color in cd.covers],
        "contraction": jsonio.contraction_json(cmap),
    }
    ok = True
    if analyze:
        colored = cd.to_colored_digraph()
        uld = certify_uld_cover(colored)
        lld = certify_lld_cover(colored)
        payload["minimum"] = cd.source_index()
        payload["maximum"] = cd.sink_index()
        payload["meet_irreducibles"] = list(meet_irreducible_indices(cd))
        payload["uld"] = jsonio.cover_verdict_json(uld)
        payload["lld"] = jsonio.cover_verdict_json(lld)
        payload["distributive"] = uld.ok and lld.ok
        ok = uld.ok and lld.ok
    return payload, reduced, cmap, cd, ok


def _component_dot(args, system, reduced, cmap, cd):
    if args.coords == "pushcount":
        order = [v for v in reduced.graph.vertices if v != reduced.forbidden]
        labels = [
            ",".join(str(reduced.push_counts(x).count(v)) for v in order) for x in cd.elements
        ]
        comments = [
            f"push counts in vertex order: {', '.join(str(v) for v in order)}",
            f"forbidden vertex: {reduced.forbidden}",
        ]
    else:
        arc_order = [a.id for a in system.graph.arcs]
        labels = bond_labels(cd, arc_order, expand=cmap.expand)
        comments = [f"arc values in order: {', '.join(str(a) for a in arc_order)}"]
    return cover_digraph_dot(cd, labels, comments)


def _run_enumerate(args, doc, analyze):
    systems = jsonio.parse_systems(doc, args.forbidden)
    if len(systems) > 1 and args.dot:
        raise InputFormatError("", "DOT export needs a connected input")
    try:
        built = [_enumerate_component(system, args.cap, analyze) for system in systems]
    except InfeasibleSystemError as exc:
        return 1, jsonio.infeasible_json(exc), None
    except CapExceededError as exc:
        return 1, {"verdict": "cap exceeded", "explored": exc.explored, "cap": exc.cap}, None
    if len(built) == 1:
        payload, reduced, cmap, cd, ok = built[0]
        dot = _component_dot(args, systems[0], reduced, cmap, cd) if args.dot else None
        return (0 if ok else 1), payload, dot
    product = 1
    components = []
    for system, (payload, *_rest, ok) in zip(systems, built):
        product *= payload["count"]
        entry = {"vertices": list(system.graph.vertices), "forbidden": system.forbidden}
        entry.update(payload)
        components.append(entry)
    all_ok = all(item[-1] for item in built)
    payload = {"product_size": product, "components": components}
    return (0 if all_ok else 1), payload, None


def _cmd_enumerate(args, doc):
    return _run_enumerate(args, doc, analyze=False)


def _cmd_lattice(args, doc):
    return _run_enumerate(args, doc, analyze=True)


def _cmd_order_op(args, doc, op):
    system = jsonio.parse_system(doc, args.forbidden)
    x = jsonio.parse_bond(doc, "x", system.graph)
    y = jsonio.parse_bond(doc, "y", system.graph)
    for name, bond in (("x", x), ("y", y)):
        report = system.check_bond(bond)
        if not report.ok:
            payload = {"verdict": "not a bond", "which": name, "report": jsonio.validity_json(report)}
            return 1, payload, None
    reduced, cmap = system.reduce()
    xr, yr = cmap.restrict(x), cmap.restrict(y)
    if op == "leq":
        return 0, {"leq": reduced.leq(xr, yr)}, None
    result = reduced.meet(xr, yr) if op == "meet" else reduced.join(xr, yr)
    return 0, {op: jsonio.bond_json(cmap.expand(result), system.graph)}, None


def _cmd_meet(args, doc):
    return _cmd_order_op(args, doc, "meet")


def _cmd_join(args, doc):
    return _cmd_order_op(args, doc, "join")


def _cmd_leq(args, doc):
    return _cmd_order_op(args, doc, "leq")


def _cmd_check_uld(args, doc):
    cd = jsonio.parse_colored_digraph(doc)
    verdict = certify_uld_cover(cd)
    return (0 if verdict.ok else 1), jsonio.cover_verdict_json(verdict), None


def _cmd_check_poset(args, doc):
    poset = jsonio.parse_poset(doc)
    report = brute_uld(poset)
    ok = report.is_lattice and report.is_uld
    return (0 if ok else 1), jsonio.brute_report_json(report), None


def _cmd_c_orient(args, doc):
    g = jsonio.parse_graph(doc)
    tree = spanning_tree(g)
    non_tree = [a.id for a in g.arcs if a.id not in tree]
    targets = jsonio.parse_arc_subset_map(doc, "targets", non_tree)
    forbidden = _doc_forbidden(doc, args)
    try:
        family = encode_c_orientations(g, targets, forbidden)
    except ParityError as exc:
        payload = {
            "verdict": "parity",
            "arc": exc.defining_arc,
            "base_count": exc.base_count,
            "target": exc.target,
        }
        return 1, payload, None
    payload = jsonio.system_json(family.system)
    payload["decode"] = {
        "kind": "c-orientation",
        "rule": "an arc is reversed exactly when its value is 1",
        "targets": {str(a): targets[a] for a in sorted(targets, key=id_key)},
    }
    return 0, payload, None


def _cmd_flows(args, doc):
    embedding = jsonio.parse_embedding(doc)
    lower = jsonio.parse_arc_map(doc, "lower", embedding.host)
    upper = jsonio.parse_arc_map(doc, "upper", embedding.host)
    excess = (
        jsonio.parse_vertex_map(doc, "excess", embedding.host, partial=True)
        if isinstance(doc, dict) and "excess" in doc
        else {}
    )
    try:
        family = encode_flows(FlowSpec(embedding, lower, upper, excess), args.unbounded_face)
    except ExcessImbalanceError as exc:
        return 1, {"verdict": "excess imbalance", "total": exc.total}, None
    except NonPlanarError as exc:
        return 1, {"verdict": "nonplanar", "genus": exc.genus}, None
    payload = jsonio.system_json(family.system)
    payload["decode"] = {
        "kind": "flow",
        "unbounded_face": args.unbounded_face,
        "faces": [[[a, d] for a, d in walk.darts] for walk in family.dual.faces],
        "rule": "dual arc ids equal primal arc ids; a bond value is that arc's flow",
    }
    return 0, payload, None


def _cmd_alpha(args, doc):
    embedding = jsonio.parse_embedding(doc)
    degrees = jsonio.parse_vertex_map(doc, "out_degrees", embedding.host)
    total = sum(degrees.values())
    if total != len(embedding.host.arcs):
        payload = {
            "verdict": "degree sum mismatch",
            "total": total,
            "edges": len(embedding.host.arcs),
        }
        return 1, payload, None
    try:
        family = encode_alpha_orientations(AlphaSpec(embedding, degrees), args.unbounded_face)
    except NonPlanarError as exc:
        return 1, {"verdict": "nonplanar", "genus": exc.genus}, None
    payload = jsonio.system_json(family.system)
    payload["decode"] = {
        "kind": "alpha-orientation",
        "unbounded_face": args.unbounded_face,
        "reference": jsonio.graph_json(family.reference),
        "rule": "an arc of the reference graph is reversed exactly when its value is 1",
    }
    return 0, payload, None


def _cmd_potentials(args, doc):
    g = jsonio.parse_graph(doc)
    lower = jsonio.parse_arc_map(doc, "lower", g)
    upper = jsonio.parse_arc_map(doc, "upper", g)
    anchor = _doc_forbidden(doc, args)
    if anchor is None and isinstance(doc, dict) and "anchor" in doc:
        anchor = doc["anchor"]
    if anchor is None:
        anchor = min(g.vertices, key=id_key)
    if not g.has_vertex(anchor):
        raise InputFormatError("anchor", f"no vertex has id {anchor!r}")
    family = encode_potentials(g, lower, upper, anchor)
    payload = jsonio.system_json(family.system)
    payload["decode"] = {
        "kind": "potential",
        "anchor": anchor,
        "rule": "a potential assigns each vertex the signed sum of values on any path from the anchor",
    }
    return 0, payload, None


def _cmd_chipfire(args, doc):
    g, start = jsonio.parse_chip_input(doc)
    if args.ccfg:
        game = build_complete_game(g, start, radius=args.cap, state_cap=args.cap)
        payload = jsonio.complete_game_json(game)
        dot = game_dot(game) if args.dot else None
        if game.complete and game.acyclic:
            report = check_complete_game_representation(game)
            payload["representation"] = jsonio.representation_json(report)
            return (0 if report.ok else 1), payload, dot
        payload["representation"] = None
        return 1, payload, dot
    game = build_game(g, start, cap=args.cap)
    payload = jsonio.game_json(game)
    dot = game_dot(game) if args.dot else None
    if game.verdict != FINITE:
        return 1, payload, dot
    certificate = certify_game(game)
    payload["certificate"] = jsonio.game_certificate_json(certificate, game)
    return (0 if certificate.ok else 1), payload, dot


# ---------------------------------------------------------------------------
# parser assembly


def _add_io(p: argparse.ArgumentParser):
    p.add_argument("--input", default="-", help="input JSON path, or - for stdin")
    p.add_argument("--output", default="-", help="output JSON path, or - for stdout")


def _add_forbidden(p: argparse.ArgumentParser):
    p.add_argument(
        "--forbidden",
        type=_cli_id,
        default=None,
        help="forbidden (anchor) vertex; integer-looking values parse as integers",
    )


def _add_dot(p: argparse.ArgumentParser):
    p.add_argument("--dot", default=None, help="also write a Graphviz DOT file here")


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="bondlat",
        description="Distributive lattices of capacity-windowed arc labelings with "
        "prescribed cycle flow-differences, and their applications.",
    )
    sub = parser.add_subparsers(dest="command", required=True, metavar="subcommand")

    p = sub.add_parser("reduce", help="contract rigid arcs of a system")
    _add_io(p)
    _add_forbidden(p)
    p.set_defaults(handler=_cmd_reduce)

    p = sub.add_parser("find-bond", help="one bond of a system, or an infeasibility certificate")
    _add_io(p)
    _add_forbidden(p)
    p.set_defaults(handler=_cmd_find_bond)

    p = sub.add_parser("enumerate", help="all bonds with their cover relations")
    _add_io(p)
    _add_forbidden(p)
    _add_dot(p)
    p.add_argument("--cap", type=int, default=1_000_000, help="element cap (default 1000000)")
    p.add_argument("--coords", choices=("bond", "pushcount"), default="bond", help="DOT node labels")
    p.set_defaults(handler=_cmd_enumerate)

    p = sub.add_parser("lattice", help="enumerate plus certification and lattice analysis")
    _add_io(p)
    _add_forbidden(p)
    _add_dot(p)
    p.add_argument("--cap", type=int, default=1_000_000, help="element cap (default 1000000)")
    p.add_argument("--coords", choices=("bond", "pushcount"), default="bond", help="DOT node labels")
    p.set_defaults(handler=_cmd_lattice)

    for name, handler in (("meet", _cmd_meet), ("join", _cmd_join), ("leq", _cmd_leq)):
        p = sub.add_parser(name, help=f"{name} of the bonds under keys \"x\" and \"y\"")
        _add_io(p)
        _add_forbidden(p)
        p.set_defaults(handler=handler)

    p = sub.add_parser("check-uld", help="certify a colored cover digraph")
    _add_io(p)
    p.set_defaults(handler=_cmd_check_uld)

    p = sub.add_parser("check-poset", help="brute-force lattice/ULD analysis of a finite poset")
    _add_io(p)
    p.set_defaults(handler=_cmd_check_poset)

    p = sub.add_parser("c-orient", help="encode orientations with prescribed cycle flow-differences")
    _add_io(p)
    _add_forbidden(p)
    p.set_defaults(handler=_cmd_c_orient)

    p = sub.add_parser("flows", help="encode flows of a plane digraph on its dual")
    _add_io(p)
    p.add_argument("--unbounded-face", type=int, default=0, help="face index to forbid (default 0)")
    p.set_defaults(handler=_cmd_flows)

    p = sub.add_parser("alpha", help="encode orientations with prescribed out-degrees")
    _add_io(p)
    p.add_argument("--unbounded-face", type=int, default=0, help="face index to forbid (default 0)")
    p.set_defaults(handler=_cmd_alpha)

    p = sub.add_parser("potentials", help="encode anchored vertex potentials")
    _add_io(p)
    _add_forbidden(p)
    p.set_defaults(handler=_cmd_potentials)

    p = sub.add_parser("chipfire", help="explore and certify a chip-firing game")
    _add_io(p)
    _add_dot(p)
    p.add_argument("--cap", type=int, default=100_000, help="state/radius cap (default 100000)")
    p.add_argument(
        "--ccfg",
        action="store_true",
        help="explore the complete game: unfiring moves too, plus the representation check",
    )
    p.set_defaults(handler=_cmd_chipfire)

    return parser


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        doc = _load(args.input)
        code, payload, dot = args.handler(args, doc)
    except InputFormatError as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return 2
    except (GraphError, PosetError, ChipError) as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return 2
    _emit(args.output, dumps(payload))
    if dot is not None and getattr(args, "dot", None):
        with open(args.dot, "w", encoding="utf-8") as handle:
            handle.write(dot)
    return code


if __name__ == "__main__":
    sys.exit(main())
