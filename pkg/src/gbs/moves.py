"""
Moves on GBS graphs.

Every move is a small frozen dataclass.  ``check(g, m)`` returns ``None`` when
the move is applicable and a human-readable reason otherwise; ``apply(g, m)``
performs it and raises :class:`MoveError` on invalid input.  Moves that are
built from others (induction, swap, connection) can be rewritten into
elementary expansions, contractions and slides with ``expand_move``.

Script text format, one move per line::

    vsign v
    esign e
    expand v 6 AS v1 e1
    contract v1
    slide d.rev along e.fwd
    induct e.fwd 4 2
    swap e1.fwd e2.fwd
    connect d.fwd e.fwd 1
    rename vertex _v1 v
    rename edge _e1.fwd e.rev

``rename`` lines only change identifiers; the derived-move expansions use
them to hand the auxiliary vertex or edge back the name of the one it
replaced, so later lines of a script keep referring to the same objects.
"""

from __future__ import annotations

import math
from collections.abc import Iterable, Iterator, Sequence
from dataclasses import dataclass

from .core import Edge, GbsGraph, GraphError, HalfEdge, ParseError, factorize

__all__ = [
    "Connection",
    "Contraction",
    "EdgeSignChange",
    "Expansion",
    "Induction",
    "Move",
    "MoveError",
    "Rename",
    "ReplayError",
    "Slide",
    "Swap",
    "VertexSignChange",
    "apply",
    "check",
    "connection_min_k",
    "elementary_script",
    "expand_connection",
    "expand_induction",
    "expand_move",
    "expand_swap",
    "format_move",
    "format_script",
    "fresh_edge",
    "fresh_vertex",
    "induction_min_k",
    "invert",
    "invert_script",
    "parse_script",
    "replay",
    "replay_report",
    "replay_states",
    "swap_exponents",
]


class MoveError(GraphError):
    pass


class ReplayError(MoveError):
    def __init__(self, index: int, move: Move, reason: str):
        self.index = index
        self.move = move
        self.reason = reason
        super().__init__(f"step {index} ({format_move(move)}): {reason}")


@dataclass(frozen=True)
class VertexSignChange:
    v: str


@dataclass(frozen=True)
class EdgeSignChange:
    edge: str


@dataclass(frozen=True)
class Expansion:
    at: str
    k: int
    new_vertex: str
    new_edge: str


@dataclass(frozen=True)
class Contraction:
    v0: str


@dataclass(frozen=True)
class Slide:
    moved: HalfEdge
    along: HalfEdge


@dataclass(frozen=True)
class Induction:
    loop: HalfEdge
    ell: int
    k: int | None = None


@dataclass(frozen=True)
class Swap:
    e1: HalfEdge
    e2: HalfEdge


@dataclass(frozen=True)
class Connection:
    d: HalfEdge
    e: HalfEdge
    k: int | None = None


@dataclass(frozen=True)
class Rename:
    kind: str  # "vertex" or "edge"
    old: str
    new: str
    flip: bool = False


Move = (
    VertexSignChange | EdgeSignChange | Expansion | Contraction | Slide | Induction | Swap | Connection | Rename
)

DERIVED = (Induction, Swap, Connection)


# ---------------------------------------------------------------------------
# arithmetic helpers
# ---------------------------------------------------------------------------


def _divides(a: int, b: int) -> bool:
    return b % a == 0


def _vp(n: int, p: int) -> int:
    return factorize(n).get(p)


def _ceil_div(a: int, b: int) -> int:
    return -(-a // b)


def swap_exponents(n: int, m: int, ell1: int, ell2: int) -> tuple[int, int] | None:
    """Least k1, k2 with m | ell1^k1 n and m | ell2^k2 n, or None."""
    fn, fm, f1, f2 = factorize(n), factorize(m), factorize(ell1), factorize(ell2)
    k1 = k2 = 0
    for p, e in fm.exps.items():
        gap = e - fn.get(p)
        if gap <= 0:
            continue
        a, b = f1.get(p), f2.get(p)
        if a <= 0 or b <= 0:
            return None
        k1 = max(k1, _ceil_div(gap, a))
        k2 = max(k2, _ceil_div(gap, b))
    return k1, k2


def connection_min_k(ell1: int, ell: int) -> int | None:
    """Least k with ell1 | ell^k (absolute values), or None."""
    f1, f = factorize(ell1), factorize(ell)
    k = 0
    for p, e in f1.exps.items():
        a = f.get(p)
        if a <= 0:
            return None
        k = max(k, _ceil_div(e, a))
    return k


def induction_min_k(ell: int, n: int) -> int | None:
    return connection_min_k(ell, n)


def _power_divides(a: int, base: int, k: int) -> bool:
    """|a| divides |base|^k, checked prime by prime."""
    fa, fb = factorize(a), factorize(base)
    return all(fb.get(p) * k >= e for p, e in fa.exps.items())


# ---------------------------------------------------------------------------
# check
# ---------------------------------------------------------------------------


def _has_edge(g: GbsGraph, h: HalfEdge) -> bool:
    return h.edge in g.edges


def check(g: GbsGraph, m: Move) -> str | None:
    """Return None if m is applicable to g, else the reason it is not."""
    try:
        return _check(g, m)
    except GraphError as exc:
        return str(exc)


def _check(g: GbsGraph, m: Move) -> str | None:
    if isinstance(m, VertexSignChange):
        return None if m.v in g.vertices else f"no vertex {m.v!r}"
    if isinstance(m, EdgeSignChange):
        return None if m.edge in g.edges else f"no edge {m.edge!r}"
    if isinstance(m, Expansion):
        if m.at not in g.vertices:
            return f"no vertex {m.at!r}"
        if m.new_vertex in g.vertices:
            return f"vertex {m.new_vertex!r} already exists"
        if m.new_edge in g.edges:
            return f"edge {m.new_edge!r} already exists"
        if not isinstance(m.k, int) or m.k == 0:
            return "expansion label must be a nonzero integer"
        return None
    if isinstance(m, Contraction):
        if m.v0 not in g.vertices:
            return f"no vertex {m.v0!r}"
        out = g.outgoing(m.v0)
        if len(out) != 1:
            return f"vertex {m.v0} must have exactly one incident half-edge, has {len(out)}"
        h = out[0]
        if g.tau(h) == m.v0:
            return "the incident edge is a loop"
        if g.psi(h.bar) != 1:
            return f"label at {m.v0} is {g.psi(h.bar)}, contraction needs 1"
        return None
    if isinstance(m, Slide):
        d, e = m.moved, m.along
        for h in (d, e):
            if not _has_edge(g, h):
                return f"no edge {h.edge!r}"
        if d.edge == e.edge:
            return "a half-edge cannot slide along its own edge"
        if g.tau(d) != g.iota(e):
            return f"tau({d}) = {g.tau(d)} differs from iota({e}) = {g.iota(e)}"
        n = g.psi(e.bar)
        if not _divides(n, g.psi(d)):
            return f"psi({e.bar}) = {n} does not divide psi({d}) = {g.psi(d)}"
        return None
    if isinstance(m, Induction):
        h = m.loop
        if not _has_edge(g, h):
            return f"no edge {h.edge!r}"
        if not g.is_loop(h.edge):
            return f"{h.edge} is not a loop"
        if g.psi(h.bar) != 1:
            return f"psi({h.bar}) = {g.psi(h.bar)}, induction needs 1"
        if not isinstance(m.ell, int) or m.ell == 0:
            return "induction factor must be a nonzero integer"
        n = g.psi(h)
        if m.k is None:
            return None if induction_min_k(m.ell, n) is not None else f"{m.ell} divides no power of {n}"
        if m.k < 0:
            return "k must be nonnegative"
        if not _power_divides(m.ell, n, m.k):
            return f"{m.ell} does not divide {n}^{m.k}"
        return None
    if isinstance(m, Swap):
        e1, e2 = m.e1, m.e2
        for h in (e1, e2):
            if not _has_edge(g, h):
                return f"no edge {h.edge!r}"
        if e1.edge == e2.edge:
            return "swap needs two distinct edges"
        v = g.tau(e1)
        if not (g.is_loop(e1.edge) and g.is_loop(e2.edge) and g.tau(e2) == v):
            return "swap needs two loops at the same vertex"
        n, m_ = g.psi(e1.bar), g.psi(e2.bar)
        if not _divides(n, g.psi(e1)):
            return f"psi({e1.bar}) = {n} does not divide psi({e1}) = {g.psi(e1)}"
        if not _divides(m_, g.psi(e2)):
            return f"psi({e2.bar}) = {m_} does not divide psi({e2}) = {g.psi(e2)}"
        if not _divides(n, m_):
            return f"n = {n} does not divide m = {m_}"
        if swap_exponents(n, m_, g.psi(e1) // n, g.psi(e2) // m_) is None:
            return "m divides no ell1^k n or no ell2^k n"
        return None
    if isinstance(m, Connection):
        d, e = m.d, m.e
        for h in (d, e):
            if not _has_edge(g, h):
                return f"no edge {h.edge!r}"
        if d.edge == e.edge:
            return "connection needs d outside {e, e-bar}"
        if not g.is_loop(e.edge):
            return f"{e.edge} is not a loop"
        if g.tau(d) != g.iota(e):
            return f"tau({d}) differs from the vertex of {e.edge}"
        n = g.psi(e.bar)
        if not _divides(n, g.psi(d)):
            return f"psi({e.bar}) = {n} does not divide psi({d}) = {g.psi(d)}"
        if not _divides(n, g.psi(e)):
            return f"psi({e.bar}) = {n} does not divide psi({e}) = {g.psi(e)}"
        ell1, ell = g.psi(d) // n, g.psi(e) // n
        if m.k is None:
            return None if connection_min_k(ell1, ell) is not None else f"ell1 = {ell1} divides no power of ell = {ell}"
        if m.k < 0:
            return "k must be nonnegative"
        if not _power_divides(ell1, ell, m.k):
            return f"ell1 = {ell1} does not divide ell^{m.k} = {ell}^{m.k}"
        return None
    if isinstance(m, Rename):
        if m.kind == "vertex":
            if m.old not in g.vertices:
                return f"no vertex {m.old!r}"
            if m.new in g.vertices:
                return f"vertex {m.new!r} already exists"
            return None
        if m.kind == "edge":
            if m.old not in g.edges:
                return f"no edge {m.old!r}"
            if m.new != m.old and m.new in g.edges:
                return f"edge {m.new!r} already exists"
            if m.new == m.old and not m.flip:
                return "renaming an edge to itself without a flip does nothing"
            return None
        return f"unknown rename kind {m.kind!r}"
    return f"unknown move {m!r}"


# ---------------------------------------------------------------------------
# apply
# ---------------------------------------------------------------------------


def apply(g: GbsGraph, m: Move) -> GbsGraph:
    reason = check(g, m)
    if reason is not None:
        raise MoveError(reason)
    return _apply(g, m)


def _relabel(g: GbsGraph, h: HalfEdge, label: int) -> dict[str, Edge]:
    e = g.edges[h.edge]
    return {h.edge: e._replace(dst_label=label) if h.fwd else e._replace(src_label=label)}


def _apply(g: GbsGraph, m: Move) -> GbsGraph:
    if isinstance(m, VertexSignChange):
        changes = {}
        for name, e in g.edges.items():
            src_label = -e.src_label if e.src == m.v else e.src_label
            dst_label = -e.dst_label if e.dst == m.v else e.dst_label
            if (src_label, dst_label) != (e.src_label, e.dst_label):
                changes[name] = e._replace(src_label=src_label, dst_label=dst_label)
        return g.with_edges(changes)
    if isinstance(m, EdgeSignChange):
        e = g.edges[m.edge]
        return g.with_edges({m.edge: e._replace(src_label=-e.src_label, dst_label=-e.dst_label)})
    if isinstance(m, Expansion):
        new = Edge(m.new_vertex, m.at, 1, m.k)
        return g.with_edges({m.new_edge: new}, vertices=g.vertices | {m.new_vertex})
    if isinstance(m, Contraction):
        (h,) = g.outgoing(m.v0)
        return g.with_edges({h.edge: None}, vertices=g.vertices - {m.v0})
    if isinstance(m, Slide):
        d, e = m.moved, m.along
        ell = g.psi(d) // g.psi(e.bar)
        return g.set_end(d, g.tau(e), ell * g.psi(e))
    if isinstance(m, Induction):
        h = m.loop
        v = g.tau(h)
        changes = {}
        for name, e in g.edges.items():
            if name == h.edge:
                continue
            src_label = e.src_label * m.ell if e.src == v else e.src_label
            dst_label = e.dst_label * m.ell if e.dst == v else e.dst_label
            changes[name] = e._replace(src_label=src_label, dst_label=dst_label)
        return g.with_edges(changes)
    if isinstance(m, Swap):
        e1, e2 = m.e1, m.e2
        n, m_ = g.psi(e1.bar), g.psi(e2.bar)
        ell1, ell2 = g.psi(e1) // n, g.psi(e2) // m_
        v = g.tau(e1)
        new1 = _oriented_edge(e1, v, v, m_, ell1 * m_)
        new2 = _oriented_edge(e2, v, v, n, ell2 * n)
        return g.with_edges({e1.edge: new1, e2.edge: new2})
    if isinstance(m, Connection):
        d, e = m.d, m.e
        u = g.iota(d)
        n, mm = g.psi(e.bar), g.psi(d.bar)
        ell1, ell = g.psi(d) // n, g.psi(e) // n
        k = m.k if m.k is not None else connection_min_k(ell1, ell)
        ell2 = ell**k // ell1
        v = g.tau(d)
        new_d = _oriented_edge(d, u, v, ell2 * mm, n)
        new_e = _oriented_edge(e, u, u, mm, ell * mm)
        return g.with_edges({d.edge: new_d, e.edge: new_e})
    if isinstance(m, Rename):
        if m.kind == "vertex":
            changes = {}
            for name, e in g.edges.items():
                if m.old in (e.src, e.dst):
                    changes[name] = e._replace(
                        src=m.new if e.src == m.old else e.src, dst=m.new if e.dst == m.old else e.dst
                    )
            return g.with_edges(changes, vertices=(g.vertices - {m.old}) | {m.new})
        e = g.edges[m.old]
        return g.with_edges({m.old: None}).with_edges({m.new: e.flipped() if m.flip else e})
    raise MoveError(f"unknown move {m!r}")


def _oriented_edge(h: HalfEdge, iota: str, tau: str, label_at_iota: int, label_at_tau: int) -> Edge:
    """Stored edge such that half-edge h runs iota -> tau with the given labels."""
    e = Edge(iota, tau, label_at_iota, label_at_tau)
    return e if h.fwd else e.flipped()


# ---------------------------------------------------------------------------
# inverses and replay
# ---------------------------------------------------------------------------


def invert(g: GbsGraph, m: Move) -> list[Move]:
    """A script taking apply(g, m) back to g."""
    reason = check(g, m)
    if reason is not None:
        raise MoveError(reason)
    if isinstance(m, (VertexSignChange, EdgeSignChange)):
        return [m]
    if isinstance(m, Slide):
        return [Slide(m.moved, m.along.bar)]
    if isinstance(m, Swap):
        return [Swap(m.e2, m.e1)]
    if isinstance(m, Connection):
        k = m.k
        if k is None:
            n = g.psi(m.e.bar)
            k = connection_min_k(g.psi(m.d) // n, g.psi(m.e) // n)
        return [Connection(m.d.bar, m.e, k)]
    if isinstance(m, Expansion):
        return [Contraction(m.new_vertex)]
    if isinstance(m, Contraction):
        (h,) = g.outgoing(m.v0)
        out: list[Move] = [Expansion(g.tau(h), g.psi(h), m.v0, h.edge)]
        if not h.fwd:
            out.append(Rename("edge", h.edge, h.edge, flip=True))
        return out
    if isinstance(m, Induction):
        n = g.psi(m.loop)
        k = m.k if m.k is not None else induction_min_k(m.ell, n)
        after = apply(g, m)
        v = g.tau(m.loop)
        out = [Induction(m.loop, n**k // m.ell, k)]
        for h in after.incoming(v):
            if h.edge != m.loop.edge:
                out.extend([Slide(h, m.loop.bar)] * k)
        return out
    if isinstance(m, Rename):
        if m.kind == "vertex":
            return [Rename("vertex", m.new, m.old)]
        return [Rename("edge", m.new, m.old, m.flip)]
    raise MoveError(f"unknown move {m!r}")


def replay_states(g: GbsGraph, script: Iterable[Move]) -> Iterator[GbsGraph]:
    """Yield the graph after each step; raise ReplayError at the first bad step."""
    for i, m in enumerate(script):
        reason = check(g, m)
        if reason is not None:
            raise ReplayError(i, m, reason)
        g = _apply(g, m)
        yield g


def replay(g: GbsGraph, script: Iterable[Move]) -> GbsGraph:
    cur = g
    for cur in replay_states(g, script):
        pass
    return cur


def replay_report(g: GbsGraph, script: Sequence[Move]) -> tuple[GbsGraph, list[str]]:
    """Replay with one status line per step; stops at the first failure."""
    lines = []
    for i, m in enumerate(script):
        reason = check(g, m)
        if reason is not None:
            lines.append(f"step {i} fail {format_move(m)} :: {reason}")
            break
        g = _apply(g, m)
        lines.append(f"step {i} ok {format_move(m)}")
    return g, lines


def invert_script(g: GbsGraph, script: Sequence[Move]) -> list[Move]:
    """A script undoing ``script`` (which must replay on g)."""
    pieces = []
    for m in script:
        pieces.append(invert(g, m))
        g = _apply(g, m)
    out: list[Move] = []
    for piece in reversed(pieces):
        out.extend(piece)
    return out


# ---------------------------------------------------------------------------
# fresh names
# ---------------------------------------------------------------------------


def _fresh(taken: Iterable[str], prefix: str) -> str:
    used = set(taken)
    i = 1
    while f"{prefix}{i}" in used:
        i += 1
    return f"{prefix}{i}"


def fresh_vertex(g: GbsGraph, avoid: Iterable[str] = ()) -> str:
    return _fresh(set(g.vertices) | set(avoid), "_v")


def fresh_edge(g: GbsGraph, avoid: Iterable[str] = ()) -> str:
    return _fresh(set(g.edges) | set(avoid), "_e")


# ---------------------------------------------------------------------------
# derived moves
# ---------------------------------------------------------------------------


class _Builder:
    """Accumulates a script while tracking the current graph."""

    def __init__(self, g: GbsGraph):
        self.graph = g
        self.moves: list[Move] = []

    def do(self, m: Move, times: int = 1) -> None:
        for _ in range(times):
            self.graph = apply(self.graph, m)
            self.moves.append(m)

    def expand(self, m: Move) -> None:
        """Apply a move, rewriting derived moves into elementary ones."""
        if isinstance(m, DERIVED):
            for step in expand_move(self.graph, m):
                self.do(step)
        else:
            self.do(m)


def _split_induction(ell: int, n: int) -> list[int]:
    """Write ell as a product of factors each dividing n (sign on the first)."""
    r, steps = abs(ell), []
    while r > 1:
        q = math.gcd(r, abs(n))
        if q == 1:
            raise MoveError(f"{ell} divides no power of {n}")
        steps.append(q)
        r //= q
    if ell < 0:
        if steps:
            steps[0] = -steps[0]
        else:
            steps.append(-1)
    return steps


def expand_induction(g: GbsGraph, m: Induction) -> list[Move]:
    """Induction as expansions, slides, contractions (and renames).

    Each factor ell_i of ell divides n = psi(e).  For one factor: expand at v
    with label n/ell_i to a new vertex v', push every other end at v through
    e and then onto v', carry e over to v', turn the new edge into a loop
    (1, n) at v' by sliding it along e, and contract v.  The new vertex and
    edge then take over the old names.  At most one extra vertex exists at
    any time.
    """
    reason = check(g, m)
    if reason is not None:
        raise MoveError(reason)
    h = m.loop
    n = g.psi(h)
    b = _Builder(g)
    for factor in _split_induction(m.ell, n):
        cur = b.graph
        v = cur.tau(h)
        v_new, e_new = fresh_vertex(cur), fresh_edge(cur)
        b.do(Expansion(v, n // factor, v_new, e_new))
        ep = HalfEdge(e_new, True)  # v_new -> v, label n/factor at v
        for f in cur.incoming(v):
            if f.edge == h.edge:
                continue
            b.do(Slide(f, h))
            b.do(Slide(f, ep.bar))
        b.do(Slide(h, ep.bar))
        b.do(Slide(ep, h))
        b.do(Contraction(v))
        b.do(Rename("vertex", v_new, v))
        b.do(Rename("edge", e_new, h.edge, flip=not h.fwd))
    return b.moves


def expand_swap(g: GbsGraph, m: Swap) -> list[Move]:
    """Swap through an auxiliary vertex u attached to v by a label-n edge x.

    Both loops are pulled onto u (dividing their labels by n), two inductions
    at u trade the factor c = m/n from e2 to e1, and the loops are pushed back
    through x before u is contracted.  The inductions are expanded in turn,
    so at most two extra vertices exist at any time.
    """
    reason = check(g, m)
    if reason is not None:
        raise MoveError(reason)
    e1, e2 = m.e1, m.e2
    n, mm = g.psi(e1.bar), g.psi(e2.bar)
    ell1, ell2 = g.psi(e1) // n, g.psi(e2) // mm
    c = mm // n
    k1, k2 = swap_exponents(n, mm, ell1, ell2)
    v = g.tau(e1)
    b = _Builder(g)
    u, x_name = fresh_vertex(g), fresh_edge(g)
    b.do(Expansion(v, n, u, x_name))
    x = HalfEdge(x_name, True)  # u -> v; label 1 at u, n at v
    for h in (e1.bar, e1, e2.bar, e2):
        b.do(Slide(h, x.bar))
    # now e1 = (1, ell1) and e2 = (c, ell2 c) at u
    b.do(Slide(x.bar, e1), k1)
    b.do(Slide(x.bar, e2), k2)
    # divide e2 by c using e1: multiply by ell1^k1 / c, then slide back k1 times
    b.expand(Induction(e1, ell1**k1 // c, k1))
    for h in (e2.bar, e2, x.bar):
        b.do(Slide(h, e1.bar), k1)
    # multiply e1 by c using e2, which now reads (1, ell2)
    b.expand(Induction(e2, c, k2))
    b.do(Slide(x.bar, e1.bar), k1)
    b.do(Slide(x.bar, e2.bar), k2)
    for h in (e1.bar, e1, e2.bar, e2):
        b.do(Slide(h, x))
    b.do(Contraction(u))
    return b.moves


def expand_connection(g: GbsGraph, m: Connection) -> list[Move]:
    """Connection through an auxiliary vertex z attached to v by a label-n edge y.

    e and d are pulled onto z, an induction by ell2 on e makes psi(d) = ell^k,
    k slides along e-bar bring it to 1, and then d-bar carries e and y over to
    u.  Contracting z removes d; y takes over its name and orientation.
    """
    reason = check(g, m)
    if reason is not None:
        raise MoveError(reason)
    d, e = m.d, m.e
    n = g.psi(e.bar)
    ell1, ell = g.psi(d) // n, g.psi(e) // n
    k = m.k if m.k is not None else connection_min_k(ell1, ell)
    ell2 = ell**k // ell1
    v = g.tau(d)
    b = _Builder(g)
    z, y_name = fresh_vertex(g), fresh_edge(g)
    b.do(Expansion(v, n, z, y_name))
    y = HalfEdge(y_name, True)  # z -> v; label 1 at z, n at v
    for h in (e.bar, e, d):
        b.do(Slide(h, y.bar))
    b.expand(Induction(e, ell2, k))
    b.do(Slide(d, e.bar), k)
    for h in (e.bar, e, y.bar):
        b.do(Slide(h, d.bar))
    b.do(Contraction(z))
    b.do(Rename("edge", y_name, d.edge, flip=not d.fwd))
    return b.moves


def expand_move(g: GbsGraph, m: Move) -> list[Move]:
    if isinstance(m, Induction):
        return expand_induction(g, m)
    if isinstance(m, Swap):
        return expand_swap(g, m)
    if isinstance(m, Connection):
        return expand_connection(g, m)
    reason = check(g, m)
    if reason is not None:
        raise MoveError(reason)
    return [m]


def elementary_script(g: GbsGraph, script: Iterable[Move]) -> list[Move]:
    """Rewrite every derived move of a script into elementary moves."""
    b = _Builder(g)
    for m in script:
        b.expand(m)
    return b.moves


# ---------------------------------------------------------------------------
# text format
# ---------------------------------------------------------------------------


def format_move(m: Move) -> str:
    if isinstance(m, VertexSignChange):
        return f"vsign {m.v}"
    if isinstance(m, EdgeSignChange):
        return f"esign {m.edge}"
    if isinstance(m, Expansion):
        return f"expand {m.at} {m.k} AS {m.new_vertex} {m.new_edge}"
    if isinstance(m, Contraction):
        return f"contract {m.v0}"
    if isinstance(m, Slide):
        return f"slide {m.moved} along {m.along}"
    if isinstance(m, Induction):
        return f"induct {m.loop} {m.ell}" + ("" if m.k is None else f" {m.k}")
    if isinstance(m, Swap):
        return f"swap {m.e1} {m.e2}"
    if isinstance(m, Connection):
        return f"connect {m.d} {m.e}" + ("" if m.k is None else f" {m.k}")
    if isinstance(m, Rename):
        if m.kind == "vertex":
            return f"rename vertex {m.old} {m.new}"
        return f"rename edge {m.old}.fwd {m.new}.{'rev' if m.flip else 'fwd'}"
    raise MoveError(f"unknown move {m!r}")


def format_script(script: Iterable[Move]) -> str:
    return "".join(format_move(m) + "\n" for m in script)


def _int(token: str, lineno: int) -> int:
    try:
        return int(token)
    except ValueError:
        raise ParseError(f"expected an integer, got {token!r}", lineno) from None


def _half(token: str, lineno: int) -> HalfEdge:
    try:
        return HalfEdge.parse(token)
    except ParseError as exc:
        raise ParseError(str(exc), lineno) from None


def parse_script(text: str) -> list[Move]:
    out: list[Move] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        w = line.split()
        op, args = w[0], w[1:]
        if op == "vsign" and len(args) == 1:
            out.append(VertexSignChange(args[0]))
        elif op == "esign" and len(args) == 1:
            out.append(EdgeSignChange(args[0]))
        elif op == "expand" and len(args) == 5 and args[2] == "AS":
            out.append(Expansion(args[0], _int(args[1], lineno), args[3], args[4]))
        elif op == "contract" and len(args) == 1:
            out.append(Contraction(args[0]))
        elif op == "slide" and len(args) == 3 and args[1] == "along":
            out.append(Slide(_half(args[0], lineno), _half(args[2], lineno)))
        elif op == "induct" and len(args) in (2, 3):
            k = _int(args[2], lineno) if len(args) == 3 else None
            out.append(Induction(_half(args[0], lineno), _int(args[1], lineno), k))
        elif op == "swap" and len(args) == 2:
            out.append(Swap(_half(args[0], lineno), _half(args[1], lineno)))
        elif op == "connect" and len(args) in (2, 3):
            k = _int(args[2], lineno) if len(args) == 3 else None
            out.append(Connection(_half(args[0], lineno), _half(args[1], lineno), k))
        elif op == "rename" and len(args) == 3 and args[0] == "vertex":
            out.append(Rename("vertex", args[1], args[2]))
        elif op == "rename" and len(args) == 3 and args[0] == "edge":
            old, new = _half(args[1], lineno), _half(args[2], lineno)
            out.append(Rename("edge", old.edge, new.edge, flip=old.fwd != new.fwd))
        else:
            raise ParseError(f"cannot parse move {line!r}", lineno)
    return out
