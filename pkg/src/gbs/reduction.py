"""
Redundant vertices, the projection move, totally reduced graphs and a
bounded conjugacy oracle.

Points and labels are read in the affine picture: a half-edge h runs from
(iota(h), a) to (tau(h), b) with a = point(h.bar) and b = point(h).  A vertex
v is redundant when an exit half-edge leaving v has its v-end supported on
primes reachable from the origin of v through loops; such a vertex is
removed by a projection, which also has an explicit decomposition into
sign-changes, slides, swaps, inductions and one contraction.
"""

from __future__ import annotations

from collections import deque
from collections.abc import Sequence
from dataclasses import dataclass

from .core import (
    ZERO,
    AffinePoint,
    AffineVector,
    Edge,
    GbsGraph,
    GraphError,
    HalfEdge,
    support,
    vector_to_int,
)
from .lattice import equal as lattice_equal
from .lattice import span
from .moves import (
    Contraction,
    EdgeSignChange,
    Induction,
    Move,
    Slide,
    Swap,
    apply,
    elementary_script,
    replay,
)

__all__ = [
    "CollapsingData",
    "ConjVerdict",
    "conjugate",
    "default_constants",
    "is_redundant",
    "is_totally_reduced",
    "loop_support_closure",
    "origin_conjugate_support",
    "project",
    "project_as_moves",
    "totally_reduce",
    "validate_affine_path",
    "validate_data",
    "vertex_bound",
    "w_sequence",
]


@dataclass(frozen=True)
class CollapsingData:
    """Loops e_1..e_n at v (each from (v, a_j) to (v, b_j)) and an exit e from (v, c) to (u, d)."""

    v: str
    loops: tuple[HalfEdge, ...]
    exit: HalfEdge


@dataclass
class ConjVerdict:
    status: str  # "yes", "no" or "unknown"
    path: list[tuple[HalfEdge, AffineVector]] | None = None
    pruned: bool = False
    explored: int = 0


def _base(g: GbsGraph, h: HalfEdge) -> AffineVector:
    return g.point(h.bar)


def _top(g: GbsGraph, h: HalfEdge) -> AffineVector:
    return g.point(h)


def _loop_halves(g: GbsGraph, v: str) -> list[HalfEdge]:
    return [h for h in g.half_edges() if g.is_loop(h.edge) and g.tau(h) == v]


def loop_support_closure(g: GbsGraph, v: str) -> tuple[frozenset[int], list[HalfEdge]]:
    """Primes reachable from the origin of v through loops, with first-use order."""
    if v not in g.vertices:
        raise GraphError(f"no vertex {v!r}")
    halves = _loop_halves(g, v)
    s: frozenset[int] = frozenset()
    order: list[HalfEdge] = []
    progress = True
    while progress:
        progress = False
        for h in halves:
            top = support(_top(g, h))
            if support(_base(g, h)) <= s and not top <= s:
                s |= top
                order.append(h)
                progress = True
                break
    return s, order


def is_redundant(g: GbsGraph, v: str) -> CollapsingData | None:
    """Collapsing data for v, or None when v is not redundant.

    Among exits whose v-end is supported inside the closure, the one needing
    the shortest prefix of the closure order wins (ties by half-edge order).
    """
    s, order = loop_support_closure(g, v)
    best: tuple[int, HalfEdge] | None = None
    for h in g.outgoing(v):
        if g.tau(h) == v:
            continue
        need = support(_base(g, h))
        if not need <= s:
            continue
        covered: frozenset[int] = frozenset()
        n = 0
        while not need <= covered:
            covered |= support(_top(g, order[n]))
            n += 1
        if best is None or n < best[0]:
            best = (n, h)
    if best is None:
        return None
    n, h = best
    return CollapsingData(v, tuple(order[:n]), h)


def vertex_bound(g: GbsGraph, v: str) -> int:
    """K: the largest exponent in any label sitting at v."""
    k = 0
    for h in g.incoming(v):
        for e in g.point(h).exps.values():
            k = max(k, abs(e))
    return k


def default_constants(g: GbsGraph, data: CollapsingData) -> tuple[int, ...]:
    return (vertex_bound(g, data.v) + 1,) * len(data.loops)


def validate_data(g: GbsGraph, data: CollapsingData, consts: Sequence[int]) -> None:
    v = data.v
    if v not in g.vertices:
        raise GraphError(f"no vertex {v!r}")
    names = [h.edge for h in data.loops] + [data.exit.edge]
    if len(set(names)) != len(names):
        raise GraphError("collapsing data edges must be distinct")
    for h in data.loops:
        if h.edge not in g.edges or not g.is_loop(h.edge) or g.tau(h) != v:
            raise GraphError(f"{h} is not a loop at {v}")
    e = data.exit
    if e.edge not in g.edges or g.iota(e) != v or g.tau(e) == v:
        raise GraphError(f"{e} does not leave {v}")
    if len(consts) != len(data.loops):
        raise GraphError("one constant per loop is required")
    big_k = vertex_bound(g, v)
    if any(k <= big_k for k in consts):
        raise GraphError(f"collapsing constants must exceed K = {big_k}")
    covered: frozenset[int] = frozenset()
    for h in data.loops:
        if not support(_base(g, h)) <= covered:
            raise GraphError(f"base of {h} is not supported on earlier tops")
        covered |= support(_top(g, h))
    if not support(_base(g, e)) <= covered:
        raise GraphError(f"the v-end of {e} is not supported on the loop tops")


def w_sequence(g: GbsGraph, data: CollapsingData, consts: Sequence[int]) -> tuple[list[AffineVector], AffineVector]:
    """The control vectors w_1..w_n and the translation w of a projection."""
    validate_data(g, data, consts)
    ws: list[AffineVector] = []
    for j, h in enumerate(data.loops):
        step = _top(g, h) - _base(g, h)
        ws.append(step if j == 0 else step + consts[j - 1] * ws[-1])
    c = _base(g, data.exit)
    w = (consts[-1] * ws[-1] - c) if ws else -c
    covered: frozenset[int] = frozenset()
    for wj, h in zip(ws, data.loops):
        covered |= support(_top(g, h))
        assert wj.is_nonneg() and support(wj) >= covered, "control vector lost positivity or support"
    assert w.is_nonneg(), "translation vector is not nonnegative"
    if ws:
        diffs = [_top(g, h) - _base(g, h) for h in data.loops]
        assert lattice_equal(span(ws), span(diffs)), "control vectors do not span the loop differences"
    return ws, w


def project(g: GbsGraph, data: CollapsingData, consts: Sequence[int] | None = None) -> GbsGraph:
    """The graph obtained by projecting v into the far end of the exit edge."""
    if consts is None:
        consts = default_constants(g, data)
    ws, w = w_sequence(g, data, consts)
    v, e = data.v, data.exit
    u, d = g.tau(e), _top(g, e)
    shift = d + w
    changes: dict[str, Edge | None] = {e.edge: None}
    loops = data.loops
    placed: dict[str, tuple[HalfEdge, AffineVector, AffineVector]] = {}
    if loops:
        placed[loops[-1].edge] = (loops[-1], d, d + ws[-1])
        for j in range(1, len(loops)):
            a = shift + _base(g, loops[j])
            placed[loops[j - 1].edge] = (loops[j - 1], a, a + ws[j - 1])
    for name, (h, lo, hi) in placed.items():
        edge = Edge(u, u, vector_to_int(lo), vector_to_int(hi))
        changes[name] = edge if h.fwd else edge.flipped()
    for f in g.incoming(v):
        if f.edge in placed or f.edge == e.edge:
            continue
        cur = changes.get(f.edge) or g.edges[f.edge]
        label = vector_to_int(shift + g.point(f))
        changes[f.edge] = cur._replace(dst=u, dst_label=label) if f.fwd else cur._replace(src=u, src_label=label)
    return g.with_edges(changes, vertices=g.vertices - {v})


def _control_phase(g: GbsGraph, loops: Sequence[HalfEdge], consts: Sequence[int], first_sign: HalfEdge | None) -> list[Move]:
    """Sign-fix the first loop, then fold every later loop into the first role."""
    script: list[Move] = []
    if first_sign is not None:
        script.append(EdgeSignChange(first_sign.edge))
        g = apply(g, script[-1])
    if not loops:
        return script
    first = loops[0]
    for j in range(1, len(loops)):
        h = loops[j]
        for _ in range(consts[j - 1]):
            m = Slide(h, first)
            g = apply(g, m)
            script.append(m)
        m = Swap(first, h)
        g = apply(g, m)
        script.append(m)
        first = h
    return script


def project_as_moves(g: GbsGraph, data: CollapsingData, consts: Sequence[int] | None = None) -> list[Move]:
    """A script (sign-changes, slides, swaps, an induction, one contraction) realizing project()."""
    if consts is None:
        consts = default_constants(g, data)
    _, w = w_sequence(g, data, consts)
    e = data.exit
    loops = data.loops
    if loops:
        first_sign = loops[0] if _base(g, loops[0]).sign else None
    else:
        first_sign = e if _base(g, e).sign else None
    script = _control_phase(g, loops, consts, first_sign)
    cur = replay(g, script)
    v = data.v
    if loops:
        f = loops[-1]
        script.append(Induction(f, vector_to_int(w)))
        cur = apply(cur, script[-1])
        for _ in range(consts[-1]):
            script.append(Slide(e.bar, f.bar))
        cur = replay(cur, script[-consts[-1]:])
    for h in cur.incoming(v):
        if h.edge != e.edge:
            script.append(Slide(h, e))
    script.append(Contraction(v))
    return script


# ---------------------------------------------------------------------------
# totally reduced graphs
# ---------------------------------------------------------------------------


def _has_control_loop(g: GbsGraph, v: str, s: frozenset[int]) -> bool:
    for h in _loop_halves(g, v):
        if not support(_base(g, h)) and support(_top(g, h)) >= s:
            return True
    return False


def is_totally_reduced(g: GbsGraph) -> tuple[bool, str]:
    """(verdict, reason).  The reason names the first failing vertex and condition."""
    for v in sorted(g.vertices):
        if is_redundant(g, v) is not None:
            return False, f"vertex {v} is redundant"
    for v in sorted(g.vertices):
        s, _ = loop_support_closure(g, v)
        if s and not _has_control_loop(g, v, s):
            return False, f"no loop at {v} controls the conjugates of its origin"
    return True, "totally reduced"


def totally_reduce(g: GbsGraph, max_rounds: int = 1000) -> tuple[GbsGraph, list[Move]]:
    """Project redundant vertices away, then build controlling loops.

    The returned script contains only edge sign-changes, expansions,
    contractions, slides and the bookkeeping renames of the derived-move
    expansions.
    """
    script: list[Move] = []
    for _ in range(max_rounds):
        target = next((v for v in sorted(g.vertices) if is_redundant(g, v) is not None), None)
        if target is not None:
            data = is_redundant(g, target)
            steps = elementary_script(g, project_as_moves(g, data))
        else:
            steps = []
            for v in sorted(g.vertices):
                s, order = loop_support_closure(g, v)
                if s and not _has_control_loop(g, v, s):
                    first_sign = order[0] if _base(g, order[0]).sign else None
                    consts = (vertex_bound(g, v) + 1,) * len(order)
                    steps = elementary_script(g, _control_phase(g, order, consts, first_sign))
                    break
            if not steps:
                return g, script
        g = replay(g, steps)
        script.extend(steps)
    raise RuntimeError("totally_reduce did not converge")


# ---------------------------------------------------------------------------
# conjugacy
# ---------------------------------------------------------------------------


def _max_exp(g: GbsGraph, extra: Sequence[AffineVector] = ()) -> int:
    m = 0
    for h in g.half_edges():
        for e in g.point(h).exps.values():
            m = max(m, e)
    for x in extra:
        for e in x.exps.values():
            m = max(m, abs(e))
    return m


def _steps(g: GbsGraph, vertex: str, x: AffineVector):
    for h in g.outgoing(vertex):
        t = x - _base(g, h)
        if t.is_nonneg():
            yield h, t, AffinePoint(g.tau(h), _top(g, h) + t)


def conjugate(g: GbsGraph, p: AffinePoint, q: AffinePoint, cap: int | None = None, budget: int = 10**6) -> ConjVerdict:
    """Breadth-first search for an affine path from p to q.

    Coordinates are kept at most ``cap``; a point beyond the cap is not
    expanded and marks the search as pruned, so "no" is only returned when
    the whole reachable set was explored.
    """
    for pt in (p, q):
        if pt.vertex not in g.vertices:
            raise GraphError(f"no vertex {pt.vertex!r}")
        if not pt.coord.is_nonneg():
            raise GraphError(f"point {pt} is not in the positive cone")
    if cap is None:
        cap = 4 + _max_exp(g, (p.coord, q.coord))
    if p == q:
        return ConjVerdict("yes", [], False, 1)
    parent: dict[AffinePoint, tuple[AffinePoint, HalfEdge, AffineVector] | None] = {p: None}
    queue = deque([p])
    pruned = False
    while queue:
        if len(parent) > budget:
            return ConjVerdict("unknown", None, True, len(parent))
        x = queue.popleft()
        for h, t, y in _steps(g, x.vertex, x.coord):
            if y in parent:
                continue
            if any(e > cap for e in y.coord.exps.values()):
                pruned = True
                continue
            parent[y] = (x, h, t)
            if y == q:
                path = []
                cur = y
                while parent[cur] is not None:
                    prev, hh, tt = parent[cur]
                    path.append((hh, tt))
                    cur = prev
                path.reverse()
                return ConjVerdict("yes", path, pruned, len(parent))
            queue.append(y)
    return ConjVerdict("unknown" if pruned else "no", None, pruned, len(parent))


def validate_affine_path(g: GbsGraph, p: AffinePoint, q: AffinePoint, path: Sequence[tuple[HalfEdge, AffineVector]]) -> bool:
    """Check consecutive steps match: iota(e_1)+w_1 = p, tau(e_i)+w_i = iota(e_{i+1})+w_{i+1}, tau(e_l)+w_l = q."""
    cur = p
    for h, t in path:
        if not t.is_nonneg():
            return False
        if AffinePoint(g.iota(h), _base(g, h) + t) != cur:
            return False
        cur = AffinePoint(g.tau(h), _top(g, h) + t)
    return cur == q


def origin_conjugate_support(g: GbsGraph, v: str, cap: int | None = None, budget: int = 20000) -> tuple[frozenset[int], bool]:
    """Primes seen at v among points reachable from (v, 0); flag is False if the search was cut."""
    if cap is None:
        cap = 2 + _max_exp(g)
    start = AffinePoint(v, ZERO)
    seen = {start}
    queue = deque([start])
    primes: set[int] = set()
    complete = True
    while queue:
        x = queue.popleft()
        if x.vertex == v:
            primes |= support(x.coord)
        for _, _, y in _steps(g, x.vertex, x.coord):
            if y in seen:
                continue
            if any(e > cap for e in y.coord.exps.values()) or len(seen) > budget:
                complete = False
                continue
            seen.add(y)
            queue.append(y)
    return frozenset(primes), complete
