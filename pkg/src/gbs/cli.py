"""
Command-line front end.

    gbs validate graph.gbs
    gbs apply graph.gbs script.mv -o out.gbs
    gbs iso --controlled g1.gbs g2.gbs --allow sign,induction

Every verb prints one document: ``key: value`` lines by default (multi-line
values as an indented ``|`` block) or a JSON object with ``--format json``.
``dot`` prints Graphviz text.  Exit status 0 means the verb ran, whatever
its verdict; 1 is an invalid input file, 2 a usage error.
"""

from __future__ import annotations

import argparse
import json
import random
import sys
import warnings
from collections.abc import Sequence
from typing import Any

from . import controlled, encode, reduction
from .core import (
    AffinePoint,
    GbsGraph,
    GraphError,
    HalfEdge,
    factorize,
    parse,
    serialize,
    set_of_primes,
)
from .lattice import coset_rep
from .moves import format_script, parse_script, replay_report

Doc = dict[str, Any]


class InputError(Exception):
    """A file that could not be read or parsed."""


# ---------------------------------------------------------------------------
# output
# ---------------------------------------------------------------------------


def _kv_value(v: Any) -> str:
    if isinstance(v, bool):
        return "yes" if v else "no"
    if isinstance(v, (list, tuple)):
        return " ".join(str(x) for x in v)
    return str(v)


def format_kv(doc: Doc) -> str:
    lines = []
    for key, value in doc.items():
        text = _kv_value(value)
        if "\n" in text.rstrip("\n"):
            lines.append(f"{key}: |")
            lines += ["  " + ln for ln in text.rstrip("\n").split("\n")]
        else:
            lines.append(f"{key}: {text.rstrip()}")
    return "\n".join(lines) + "\n"


def format_json(doc: Doc) -> str:
    return json.dumps(doc, indent=2, default=str) + "\n"


def _emit(doc: Doc, fmt: str) -> None:
    sys.stdout.write(format_json(doc) if fmt == "json" else format_kv(doc))


# ---------------------------------------------------------------------------
# input
# ---------------------------------------------------------------------------


def _read(path: str) -> str:
    try:
        if path == "-":
            return sys.stdin.read()
        with open(path, encoding="utf-8") as fh:
            return fh.read()
    except OSError as exc:
        raise InputError(f"{path}: {exc.strerror}") from None


def _graph(path: str) -> GbsGraph:
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        try:
            return parse(_read(path))
        except GraphError as exc:
            raise InputError(f"{path}: {exc}") from None


def _script(path: str):
    try:
        return parse_script(_read(path))
    except GraphError as exc:
        raise InputError(f"{path}: {exc}") from None


def _point(token: str) -> AffinePoint:
    """``v:12`` is the point of vertex v with the factorization of 12."""
    vertex, _, label = token.partition(":")
    try:
        n = int(label)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected VERTEX:LABEL, got {token!r}") from None
    if not vertex or n == 0:
        raise argparse.ArgumentTypeError(f"expected VERTEX:LABEL with a nonzero label, got {token!r}")
    return AffinePoint(vertex, factorize(n))


def _write_graph(g: GbsGraph, out: str | None, doc: Doc) -> None:
    if out:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(serialize(g))
        doc["written"] = out
    else:
        doc["graph"] = serialize(g)


def _summary(g: GbsGraph) -> Doc:
    return {
        "vertices": len(g.vertices),
        "edges": len(g.edges),
        "rank": g.rank(),
        "primes": sorted(set_of_primes(g)),
    }


# ---------------------------------------------------------------------------
# verbs
# ---------------------------------------------------------------------------


def cmd_validate(args: argparse.Namespace) -> Doc:
    g = _graph(args.graph)
    doc: Doc = {"status": "ok"}
    doc.update(_summary(g))
    doc["connected"] = g.is_connected()
    return doc


def cmd_affine(args: argparse.Namespace) -> Doc:
    g = _graph(args.graph)
    lines = []
    for name in sorted(g.edges):
        h = HalfEdge(name, True)
        lines.append(f"{name} ({g.iota(h)}, {g.point(h.bar)}) -- ({g.tau(h)}, {g.point(h)})")
    return {"status": "ok", "affine": "\n".join(lines) + "\n"}


def cmd_apply(args: argparse.Namespace) -> Doc:
    g = _graph(args.graph)
    script = _script(args.script)
    out, report = replay_report(g, script)
    failed = [ln for ln in report if " fail" in ln]
    doc: Doc = {"status": "fail" if failed else "ok", "steps": len(script)}
    if failed:
        doc["report"] = "\n".join(report) + "\n"
        return doc
    _write_graph(out, args.output, doc)
    return doc


def cmd_reduce(args: argparse.Namespace) -> Doc:
    g = _graph(args.graph)
    out, script = reduction.totally_reduce(g)
    doc: Doc = {"status": "ok", "totally_reduced": reduction.is_totally_reduced(out)[0]}
    doc.update(_summary(out))
    _write_graph(out, args.output, doc)
    doc["script"] = format_script(script) if script else ""
    return doc


def cmd_redundant(args: argparse.Namespace) -> Doc:
    g = _graph(args.graph)
    lines = []
    for v in sorted(g.vertices):
        data = reduction.is_redundant(g, v)
        if data is None:
            lines.append(f"{v} no")
        else:
            loops = ",".join(str(h) for h in data.loops) or "-"
            lines.append(f"{v} yes loops={loops} exit={data.exit}")
    return {"status": "ok", "vertices": "\n".join(lines) + "\n"}


def cmd_project(args: argparse.Namespace) -> Doc:
    g = _graph(args.graph)
    if args.vertex not in g.vertices:
        raise InputError(f"no vertex {args.vertex!r}")
    data = reduction.is_redundant(g, args.vertex)
    if data is None:
        return {"status": "no", "reason": f"vertex {args.vertex} is not redundant"}
    consts = tuple(int(x) for x in args.consts.split(",")) if args.consts else None
    out = reduction.project(g, data, consts)
    script = reduction.project_as_moves(g, data, consts)
    doc: Doc = {"status": "ok", "loops": [str(h) for h in data.loops], "exit": str(data.exit)}
    _write_graph(out, args.output, doc)
    doc["script"] = format_script(script) if script else ""
    return doc


def cmd_conj(args: argparse.Namespace) -> Doc:
    g = _graph(args.graph)
    try:
        verdict = reduction.conjugate(g, args.p, args.q, cap=args.cap, budget=args.budget)
    except KeyboardInterrupt:
        return {"verdict": "unknown", "reason": "interrupted", "pruned": True}
    doc: Doc = {"verdict": verdict.status, "pruned": verdict.pruned, "explored": verdict.explored}
    if verdict.path is not None:
        doc["path"] = "".join(f"{h} {t}\n" for h, t in verdict.path) or "(empty)"
    return doc


def cmd_iso(args: argparse.Namespace) -> Doc:
    if not args.controlled:
        raise UsageError(
            "iso decides isomorphism only when the first graph is a controlled one-vertex graph; "
            "pass --controlled to run that procedure"
        )
    g1, g2 = _graph(args.graph1), _graph(args.graph2)
    allow = [a for a in (args.allow or "").split(",") if a]
    try:
        dec = controlled.iso_controlled(g1, g2, allow=allow)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    except KeyboardInterrupt:
        return {"verdict": "unknown", "reason": "interrupted"}
    doc: Doc = {"verdict": dec.verdict, "reason": dec.reason}
    if dec.witness is not None:
        doc["witness"] = format_script(dec.witness) if dec.witness else "(empty)"
    return doc


def _parse_assignment(text: str) -> encode.PrimeAssignment:
    pairs = {}
    for part in text.split(","):
        v, _, p = part.partition("=")
        if not v or not p.isdigit():
            raise UsageError(f"expected VERTEX=PRIME pairs, got {part!r}")
        pairs[v] = int(p)
    try:
        return encode.PrimeAssignment(pairs)
    except GraphError as exc:
        raise UsageError(str(exc)) from None


def cmd_encode(args: argparse.Namespace) -> Doc:
    g = _graph(args.graph)
    others = [_graph(p) for p in args.other or []]
    try:
        if args.kind == "one-vertex":
            pa = _parse_assignment(args.primes) if args.primes else encode.default_assignment(g, others)
            out = encode.encode_one_vertex(g, pa, others)
            doc: Doc = {"status": "ok", "primes": pa.to_text()}
        else:
            if args.primes:
                try:
                    q, r = (int(x) for x in args.primes.split(","))
                except ValueError:
                    raise UsageError("--primes for the positive encoding is Q,R") from None
            else:
                q, r = encode.fresh_primes(2, [g, *others])
            out = encode.encode_positive(g, q, r)
            doc = {"status": "ok", "q": q, "r": r, "f": encode.positive_f_edge(g)}
    except GraphError as exc:
        return {"status": "error", "reason": str(exc)}
    _write_graph(out, args.output, doc)
    return doc


def cmd_invariants(args: argparse.Namespace) -> Doc:
    g = _graph(args.graph)
    doc: Doc = _summary(g)
    ok, why = reduction.is_totally_reduced(g)
    doc["totally_reduced"] = ok
    if not ok:
        doc["not_reduced_because"] = why
    if len(g.vertices) == 1:
        c = controlled.is_controlled(g)
        doc["controlled"] = bool(c)
        if c:
            inv = controlled.invariant(g)
            doc["control_edge"] = str(c.controlling)
            doc["subgroup"] = str(inv.subgroup)
            doc["cosets"] = [str(coset_rep(inv.subgroup, x)) for x in inv.cosets]
    return doc


def _dot_id(s: str) -> str:
    return '"' + s.replace('"', '\\"') + '"'


def to_dot(g: GbsGraph) -> str:
    """Graphviz rendering with edge labels "(m, n)"."""
    lines = ["digraph gbs {", "  node [shape=circle];"]
    for v in sorted(g.vertices):
        lines.append(f"  {_dot_id(v)};")
    for name in sorted(g.edges):
        e = g.edges[name]
        lines.append(f"  {_dot_id(e.src)} -> {_dot_id(e.dst)} [label={_dot_id(f'{name} ({e.src_label}, {e.dst_label})')}];")
    lines.append("}")
    return "\n".join(lines) + "\n"


def affine_dot(g: GbsGraph) -> str:
    """One cluster per vertex; points are the occurring affine coordinates."""
    lines = ["digraph affine {", "  node [shape=point];"]
    points: dict[str, set[str]] = {v: set() for v in g.vertices}
    for h in g.half_edges():
        points[g.tau(h)].add(str(g.point(h)))
    for i, v in enumerate(sorted(g.vertices)):
        lines.append(f"  subgraph cluster_{i} {{")
        lines.append(f"    label={_dot_id(v)};")
        for pt in sorted(points[v]):
            lines.append(f"    {_dot_id(v + ':' + pt)} [shape=plaintext, label={_dot_id(pt)}];")
        lines.append("  }")
    for name in sorted(g.edges):
        h = HalfEdge(name, True)
        a = _dot_id(f"{g.iota(h)}:{g.point(h.bar)}")
        b = _dot_id(f"{g.tau(h)}:{g.point(h)}")
        lines.append(f"  {a} -> {b} [label={_dot_id(name)}, arrowhead=none];")
    lines.append("}")
    return "\n".join(lines) + "\n"


def cmd_dot(args: argparse.Namespace) -> str:
    g = _graph(args.graph)
    return affine_dot(g) if args.affine else to_dot(g)


# ---------------------------------------------------------------------------
# argument parsing
# ---------------------------------------------------------------------------


class UsageError(Exception):
    pass


def build_parser() -> argparse.ArgumentParser:
    def global_flags(parser: argparse.ArgumentParser, defaults: bool) -> None:
        # the flags may sit before or after the verb; only the top level sets defaults
        # so that a value given before the verb is not reset by the subparser
        def d(value: Any) -> Any:
            return value if defaults else argparse.SUPPRESS

        parser.add_argument("--format", choices=("kv", "json"), default=d("kv"), help="output document format")
        parser.add_argument("--seed", type=int, default=d(0), help="seed for any randomized step")
        parser.add_argument("--budget", type=int, default=d(10**6), help="state budget for searches")

    common = argparse.ArgumentParser(add_help=False)
    global_flags(common, defaults=False)

    p = argparse.ArgumentParser(prog="gbs", description="Tools for GBS graphs and their moves.")
    global_flags(p, defaults=True)
    sub = p.add_subparsers(dest="verb", required=True)

    def verb(name: str, help_: str) -> argparse.ArgumentParser:
        return sub.add_parser(name, help=help_, parents=[common])

    s = verb("validate", "parse a graph file and summarize it")
    s.add_argument("graph")
    s = verb("affine", "list the affine representation of each edge")
    s.add_argument("graph")
    s = verb("apply", "replay a move script")
    s.add_argument("graph")
    s.add_argument("script")
    s.add_argument("-o", "--output")
    s = verb("reduce", "compute a totally reduced graph and the move script")
    s.add_argument("graph")
    s.add_argument("-o", "--output")
    s = verb("redundant", "report which vertices are redundant")
    s.add_argument("graph")
    s = verb("project", "remove a redundant vertex")
    s.add_argument("graph")
    s.add_argument("vertex")
    s.add_argument("--consts", help="comma-separated collapsing constants")
    s.add_argument("-o", "--output")
    s = verb("conj", "search for an affine path between two points VERTEX:LABEL")
    s.add_argument("graph")
    s.add_argument("p", type=_point)
    s.add_argument("q", type=_point)
    s.add_argument("--cap", type=int, help="largest exponent explored")
    s = verb("iso", "decide isomorphism with a controlled one-vertex graph")
    s.add_argument("graph1")
    s.add_argument("graph2")
    s.add_argument("--controlled", action="store_true", help="the first graph is a controlled one-vertex graph")
    s.add_argument("--allow", help="extra moves: sign, induction (comma-separated)")
    s = verb("encode", "one-vertex or positive encoding")
    s.add_argument("kind", choices=("one-vertex", "positive"))
    s.add_argument("graph")
    s.add_argument("--primes", help="VERTEX=PRIME,... (one-vertex) or Q,R (positive)")
    s.add_argument("--other", action="append", help="another graph whose primes must be avoided")
    s.add_argument("-o", "--output")
    s = verb("invariants", "print move invariants of a graph")
    s.add_argument("graph")
    s = verb("dot", "Graphviz rendering")
    s.add_argument("graph")
    s.add_argument("--affine", action="store_true", help="draw the affine representation")
    return p


COMMANDS = {
    "validate": cmd_validate,
    "affine": cmd_affine,
    "apply": cmd_apply,
    "reduce": cmd_reduce,
    "redundant": cmd_redundant,
    "project": cmd_project,
    "conj": cmd_conj,
    "iso": cmd_iso,
    "encode": cmd_encode,
    "invariants": cmd_invariants,
    "dot": cmd_dot,
}


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    random.seed(args.seed)
    try:
        result = COMMANDS[args.verb](args)
    except UsageError as exc:
        print(f"gbs {args.verb}: {exc}", file=sys.stderr)
        return 2
    except InputError as exc:
        if args.verb == "validate":
            _emit({"status": "invalid", "error": str(exc)}, args.format)
        print(f"gbs {args.verb}: {exc}", file=sys.stderr)
        return 1
    if isinstance(result, str):
        sys.stdout.write(result)
    else:
        _emit(result, args.format)
    return 0


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
