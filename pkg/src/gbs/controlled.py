"""
Controlled one-vertex graphs.

A one-vertex graph is controlled when one loop, read as a -- a+w with
w >= 0, controls every endpoint b of every other loop (b - a >= 0 and
supp(b - a) inside supp(w)).  For such graphs the move-equivalence class
is pinned down by lattice data: the subgroup H spanned by all loop
differences and the multiset of cosets of loop endpoints mod H.

This module provides the control check, the two derived moves used to
move around inside a controlled configuration (self-slide and reverse
slide), a constructive witness for one satellite, the decision procedure
and a bounded bidirectional move search used when no constructive
witness is available.
"""

from __future__ import annotations

import itertools
from collections.abc import Iterable, Iterator, Sequence
from dataclasses import dataclass
from fractions import Fraction
from typing import NamedTuple

from .core import (
    SIGN,
    ZERO,
    AffineVector,
    GbsGraph,
    GraphError,
    HalfEdge,
    controls,
    support,
)
from .lattice import (
    LatticeSubgroup,
    coset_rep,
    from_coords,
    member,
    reindex,
    relations,
    solve,
    span,
)
from .lattice import add as lattice_add
from .lattice import equal as lattice_equal
from .moves import (
    Connection,
    EdgeSignChange,
    Move,
    MoveError,
    Rename,
    Slide,
    Swap,
    VertexSignChange,
    apply,
    check,
    connection_min_k,
    invert_script,
    replay,
)
from .reduction import is_totally_reduced, totally_reduce, vertex_bound

__all__ = [
    "ControlledConfig",
    "ControlledInvariant",
    "Decision",
    "NotControlled",
    "Satellite",
    "align_script",
    "build_control",
    "config_at",
    "equiv_decide",
    "equiv_witness_m1",
    "invariant",
    "is_controlled",
    "iso_controlled",
    "neighbors",
    "reverse_slide",
    "search_moves",
    "self_slide",
]


class Satellite(NamedTuple):
    half: HalfEdge  # oriented so that point(half.bar) = b and point(half) = b + x
    b: AffineVector
    x: AffineVector


@dataclass(frozen=True)
class ControlledConfig:
    vertex: str
    controlling: HalfEdge
    a: AffineVector
    w: AffineVector
    satellites: tuple[Satellite, ...]

    def subgroup(self) -> LatticeSubgroup:
        return span([self.w] + [s.x for s in self.satellites], _config_primes(self))


@dataclass(frozen=True)
class NotControlled:
    reason: str

    def __bool__(self) -> bool:
        return False


@dataclass(frozen=True)
class ControlledInvariant:
    """Edge count, the difference subgroup H, and edge cosets mod H (sorted reps)."""

    edge_count: int
    subgroup: LatticeSubgroup
    cosets: tuple[AffineVector, ...]

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, ControlledInvariant):
            return NotImplemented
        return (
            self.edge_count == other.edge_count
            and lattice_equal(self.subgroup, other.subgroup)
            and self.cosets == other.cosets
        )

    __hash__ = None  # type: ignore[assignment]


@dataclass
class Decision:
    verdict: str  # "yes", "no" or "unknown"
    reason: str
    witness: list[Move] | None = None

    def __bool__(self) -> bool:
        return self.verdict == "yes"


def _config_primes(c: ControlledConfig) -> set[int]:
    ps = set(c.a.primes()) | set(c.w.primes())
    for s in c.satellites:
        ps |= s.b.primes() | s.x.primes()
    return ps


def _vkey(v: AffineVector) -> tuple:
    return (v.sign, tuple(sorted(v.exps.items())))


def _only_vertex(g: GbsGraph) -> str:
    if len(g.vertices) != 1:
        raise GraphError(f"expected a one-vertex graph, got {len(g.vertices)} vertices")
    (v,) = g.vertices
    return v


# ---------------------------------------------------------------------------
# control
# ---------------------------------------------------------------------------


def config_at(g: GbsGraph, h: HalfEdge) -> ControlledConfig | NotControlled:
    """The configuration with h as controlling edge, if h controls everything else."""
    v = _only_vertex(g)
    a = g.point(h.bar)
    w = g.point(h) - a
    if not w.is_nonneg():
        return NotControlled(f"{h} has a negative control vector {w}")
    sats = []
    for name in g.edge_names():
        if name == h.edge:
            continue
        s = HalfEdge(name, True)
        b, top = g.point(s.bar), g.point(s)
        for pt in (b, top):
            if not controls(a, w, pt):
                return NotControlled(f"{h} does not control the endpoint {pt} of {name}")
        sats.append(Satellite(s, b, top - b))
    return ControlledConfig(v, h, a, w, tuple(sats))


def is_controlled(g: GbsGraph) -> ControlledConfig | NotControlled:
    """The controlling edge with least id (forward before reverse) or a reason."""
    _only_vertex(g)
    reasons = []
    for name in g.edge_names():
        for fwd in (True, False):
            c = config_at(g, HalfEdge(name, fwd))
            if c:
                return c
            reasons.append(c.reason)
    return NotControlled(reasons[0] if reasons else "graph has no edges")


def _all_configs(g: GbsGraph) -> list[ControlledConfig]:
    out = []
    for name in g.edge_names():
        for fwd in (True, False):
            c = config_at(g, HalfEdge(name, fwd))
            if c:
                out.append(c)
    return out


def invariant(g: GbsGraph) -> ControlledInvariant:
    """Choice-free invariant of a one-vertex graph (controlled or not)."""
    _only_vertex(g)
    diffs, ends = [], []
    ps: set[int] = set()
    for name in g.edge_names():
        h = HalfEdge(name, True)
        lo, hi = g.point(h.bar), g.point(h)
        diffs.append(hi - lo)
        ends.append(lo)
        ps |= lo.primes() | hi.primes()
    h_sub = span(diffs, ps)
    reps = sorted((coset_rep(h_sub, e) for e in ends), key=_vkey)
    return ControlledInvariant(len(diffs), h_sub, tuple(reps))


def _coset_multiset(h_sub: LatticeSubgroup, points: Iterable[AffineVector]) -> list[tuple]:
    return sorted(_vkey(coset_rep(h_sub, p)) for p in points)


def equiv_decide(c1: ControlledConfig, c2: ControlledConfig) -> Decision:
    """Slide/swap equivalence of two configurations with the same base."""
    if c1.a != c2.a:
        return Decision("no", f"bases differ: {c1.a} vs {c2.a}")
    if len(c1.satellites) != len(c2.satellites):
        return Decision("no", f"edge counts differ: {len(c1.satellites) + 1} vs {len(c2.satellites) + 1}")
    h1, h2 = c1.subgroup(), c2.subgroup()
    if not lattice_equal(h1, h2):
        return Decision("no", f"difference subgroups differ: {h1} vs {h2}")
    m1 = _coset_multiset(h1, (s.b for s in c1.satellites))
    m2 = _coset_multiset(h1, (s.b for s in c2.satellites))
    if m1 != m2:
        return Decision("no", "satellite cosets mod H do not match")
    return Decision("yes", "same base, same subgroup, matching satellite cosets")


# ---------------------------------------------------------------------------
# self-slide and reverse slide
# ---------------------------------------------------------------------------


def _self_slide_k(w: AffineVector, x: AffineVector) -> int:
    """Least k >= 0 with x + k w >= 1 on supp(w)."""
    k = 0
    for p, wp in w.exps.items():
        need = 1 - x.get(p)
        if need > 0:
            k = max(k, -(-need // wp))
    return k


def self_slide(g: GbsGraph, controlling: HalfEdge, target: HalfEdge) -> list[Move]:
    """Slides and swaps translating the target b -- b+x to b+x -- b+2x.

    ``controlling`` runs from a to a+w; ``target`` runs from b to b+x.
    Requires a, w to control b and b+2x.
    """
    c, t = controlling, target
    if c.edge == t.edge:
        raise MoveError("controlling and target edges must differ")
    a = g.point(c.bar)
    w = g.point(c) - a
    b = g.point(t.bar)
    x = g.point(t) - b
    if not w.is_nonneg():
        raise MoveError(f"control vector {w} is not nonnegative")
    for pt in (b, b + x + x):
        if not controls(a, w, pt):
            raise MoveError(f"{a}, {w} does not control {pt}")
    if x == ZERO:
        return []
    k = _self_slide_k(w, x)
    script: list[Move] = []
    script += [Slide(t, c)] * k
    script.append(Swap(c, t))
    script += [Slide(c.bar, t), Slide(c, t)]
    script.append(Swap(t, c))
    script += [Slide(t.bar, c.bar)] * k
    script += [Slide(t, c.bar)] * (2 * k)
    _verify(g, script)
    return script


def reverse_slide(g: GbsGraph, controlling: HalfEdge, along: HalfEdge) -> list[Move]:
    """Slides and swaps turning a -- a+w, b -- b+x into a -- a+w+x, b -- b+x.

    The two edges trade roles: afterwards ``along`` runs from a to a+w+x and
    ``controlling.bar`` runs from b to b+x.
    """
    c, t = controlling, along
    if c.edge == t.edge:
        raise MoveError("controlling and satellite edges must differ")
    a = g.point(c.bar)
    w = g.point(c) - a
    b = g.point(t.bar)
    x = g.point(t) - b
    if not (w + x).is_nonneg():
        raise MoveError(f"w + x = {w + x} is not nonnegative")
    for ctl in (w, w + x):
        for pt in (b, b + x):
            if not controls(a, ctl, pt):
                raise MoveError(f"{a}, {ctl} does not control {pt}")
    script: list[Move] = [Slide(t, c), Swap(c, t), Slide(c.bar, t)]
    mid = replay(g, script)
    script += self_slide(mid, t, c.bar)
    script += [Slide(c, t.bar), Slide(c.bar, t.bar)]
    _verify(g, script)
    return script


def _verify(g: GbsGraph, script: Sequence[Move]) -> None:
    replay(g, script)


# ---------------------------------------------------------------------------
# witness for one satellite
# ---------------------------------------------------------------------------


class _Walk:
    """Tracks a two-role configuration (controlling C, satellite T) under moves."""

    def __init__(self, g: GbsGraph, c: HalfEdge, t: HalfEdge):
        self.g, self.c, self.t = g, c, t
        self.moves: list[Move] = []

    @property
    def a(self) -> AffineVector:
        return self.g.point(self.c.bar)

    @property
    def w(self) -> AffineVector:
        return self.g.point(self.c) - self.a

    @property
    def b(self) -> AffineVector:
        return self.g.point(self.t.bar)

    @property
    def x(self) -> AffineVector:
        return self.g.point(self.t) - self.b

    def run(self, script: Sequence[Move]) -> None:
        self.g = replay(self.g, script)
        self.moves.extend(script)

    def top(self, n: int) -> None:
        """x += n w."""
        self.run([Slide(self.t, self.c if n > 0 else self.c.bar)] * abs(n))

    def base(self, n: int) -> None:
        """b += n w (so x -= n w)."""
        self.run([Slide(self.t.bar, self.c if n > 0 else self.c.bar)] * abs(n))

    def shift(self, n: int) -> None:
        """Both satellite ends += n w."""
        along = self.c if n > 0 else self.c.bar
        for _ in range(abs(n)):
            self.run([Slide(self.t, along), Slide(self.t.bar, along)])

    def flip(self) -> None:
        self.t = self.t.bar

    def swap(self) -> None:
        self.run([Swap(self.c, self.t)])
        self.c, self.t = self.t, self.c

    def reverse(self) -> None:
        self.run(reverse_slide(self.g, self.c, self.t))
        self.c, self.t = self.t, self.c.bar

    def translate(self, n: int) -> None:
        """b += n x by self-slides."""
        if n < 0:
            self.flip()
        for _ in range(abs(n)):
            self.run(self_slide(self.g, self.c, self.t))
        if n < 0:
            self.flip()


def _first_nonzero(v: AffineVector) -> int:
    for p, e in sorted(v.exps.items()):
        if e:
            return p
    raise ValueError("zero vector")


def _rank1_generator(h_sub: LatticeSubgroup) -> AffineVector:
    for row in h_sub.rows:
        if any(row[1:]):
            return from_coords(row, h_sub.primes)
    raise ValueError("subgroup has no free part")


def _normalize_small(walk: _Walk, h_sub: LatticeSubgroup) -> None:
    """Bring a configuration with H of rank <= 1 to its canonical shape."""
    rank = h_sub.rank()
    if rank == 0:
        if walk.w == ZERO and walk.x == ZERO:
            return
        if walk.w == ZERO:
            walk.swap()
        if walk.x != ZERO:
            walk.top(1)
        if walk.b != walk.a:
            walk.shift(-1)
        return
    torsion = member(h_sub, SIGN)
    z = _rank1_generator(h_sub)
    p = _first_nonzero(z)
    lam = walk.w.get(p) // z.get(p)
    if lam < 0:
        z, lam = -z, -lam
    mu = walk.x.get(p) // z.get(p)
    if mu <= 0:
        k = (-mu) // lam + 1
        walk.top(k)
        mu += k * lam
    while mu > 0:
        if lam <= mu:
            walk.top(-1)
            mu -= lam
        else:
            walk.flip()
            walk.reverse()
            walk.flip()
            lam -= mu
    if torsion and walk.w.sign:
        if walk.x == ZERO:
            raise AssertionError("torsion must sit on the satellite")
        walk.reverse()
    while (walk.b - walk.w - walk.a).is_nonneg():
        walk.shift(-1)


def _solve2(u: AffineVector, v: AffineVector, target: AffineVector) -> tuple[int, int]:
    coeffs = solve(span([u, v], u.primes() | v.primes() | target.primes()), target)
    if coeffs is None:
        raise ValueError(f"{target} is not in <{u}, {v}>")
    return coeffs[0], coeffs[1]


def _direct_rank2(walk: _Walk, w: AffineVector, x: AffineVector, b: AffineVector) -> None:
    """Drive (w', x', b') to (w, x, b) when H is free of rank two."""
    k = 0
    while not (walk.x + k * walk.w - walk.w).is_nonneg():
        k += 1
    walk.top(k)
    lam, mu = _solve2(walk.w, walk.x, w)
    if lam <= 0:
        walk.swap()
        lam, mu = mu, lam
    if mu < 0:
        walk.flip()
        mu = -mu
    while mu > 0:
        if lam > mu:
            walk.top(1)
            lam -= mu
        else:
            walk.reverse()
            mu -= lam
    if walk.w != w:
        raise AssertionError("Euclidean reduction did not reach the control vector")
    for attempt in range(2):
        d = x - walk.x
        theta = None
        p = _first_nonzero(w)
        if d == ZERO:
            theta = 0
        else:
            q = d.get(p) // w.get(p)
            if q * w == d:
                theta = q
        if theta is not None:
            break
        walk.flip()
    else:
        raise AssertionError("satellite difference is not x up to sign and multiples of w")
    if theta >= 0:
        walk.top(theta)
    else:
        walk.base(-theta)
    _move_base(walk, b)


def _move_base(walk: _Walk, b: AffineVector) -> None:
    """Move the satellite from b' to b (b' - b in <w, x>) by slides and self-slides.

    The satellite is first lifted by a multiple of w so that every
    intermediate self-slide stays inside the controlled region.
    """
    w, x, a = walk.w, walk.x, walk.a
    alpha, beta = _solve2(w, x, walk.b - b)
    step = -1 if beta > 0 else 1
    lift = max(0, -alpha)
    while True:
        start = walk.b + lift * w
        pts = [start + (i * step + j) * x for i in range(abs(beta) + 1) for j in (-1, 0, 1, 2)]
        if all(controls(a, w, pt) for pt in pts):
            break
        lift += 1
    walk.shift(lift)
    walk.translate(-beta)
    walk.shift(-(lift + alpha))


def equiv_witness_m1(g1: GbsGraph, g2: GbsGraph) -> list[Move]:
    """Slide/swap script from g1 to a graph of the same shape as g2.

    Both graphs are controlled one-vertex graphs with two edges and the
    same controlling base.  The script ends with renames so that its
    result uses g2's edge names.
    """
    c1 = is_controlled(g1)
    if not c1:
        raise ValueError("the first graph must be controlled")
    c2 = next((c for c in _all_configs(g2) if c.a == c1.a), None)
    if c2 is None:
        raise ValueError("the second graph has no controlling edge with the same base")
    if len(c1.satellites) != 1 or len(c2.satellites) != 1:
        raise ValueError("constructive witnesses need exactly one satellite; use search_moves")
    dec = equiv_decide(c1, c2)
    if not dec:
        raise ValueError(dec.reason)
    if g1.same_shape(g2):
        return align_script(g1, g2)
    h_sub = c1.subgroup()
    # give g2 the edge names of g1 so the two halves of the witness compose
    names2 = {c2.controlling.edge: c1.controlling.edge, c2.satellites[0].half.edge: c1.satellites[0].half.edge}
    g2r, to_r = _rename_edges(g2, names2)
    w1 = _Walk(g1, c1.controlling, c1.satellites[0].half)
    w2 = _Walk(
        g2r,
        HalfEdge(names2[c2.controlling.edge], c2.controlling.fwd),
        HalfEdge(names2[c2.satellites[0].half.edge], c2.satellites[0].half.fwd),
    )
    if h_sub.rank() <= 1:
        _normalize_small(w1, h_sub)
        _normalize_small(w2, h_sub)
    else:
        _direct_rank2(w2, w1.w, w1.x, w1.b)
    if not w1.g.same_shape(w2.g):
        raise AssertionError("normal forms differ although the invariants agree")
    script = list(w1.moves) + align_script(w1.g, w2.g) + invert_script(g2r, w2.moves)
    script += invert_script(g2, to_r)
    return script


def _rename_edges(g: GbsGraph, mapping: dict[str, str]) -> tuple[GbsGraph, list[Move]]:
    """Rename edges per mapping; returns the graph and the rename script used."""
    script: list[Move] = []
    tmp = {}
    used = set(g.edges) | set(mapping.values())
    i = 0
    for old, new in sorted(mapping.items()):
        if old == new:
            continue
        while f"_tmp{i}" in used:
            i += 1
        tmp[old] = f"_tmp{i}"
        used.add(tmp[old])
        script.append(Rename("edge", old, tmp[old]))
    for old, new in sorted(mapping.items()):
        if old != new:
            script.append(Rename("edge", tmp[old], new))
    return replay(g, script), script


def align_script(src: GbsGraph, dst: GbsGraph) -> list[Move]:
    """Renames (with orientation flips) turning src into exactly dst; shapes must agree."""
    if not src.same_shape(dst):
        raise ValueError("graphs do not have the same shape")
    if src == dst:
        return []

    def key(e):
        a, b = (e.src, e.src_label), (e.dst, e.dst_label)
        return (a, b) if a <= b else (b, a)

    pool: dict[tuple, list[str]] = {}
    for name in dst.edge_names():
        pool.setdefault(key(dst.edges[name]), []).append(name)
    plan = []
    for name in src.edge_names():
        e = src.edges[name]
        k = key(e)
        # keep the name when possible
        cands = pool[k]
        target = name if name in cands else cands[0]
        cands.remove(target)
        flip = e != dst.edges[target] and e.flipped() == dst.edges[target]
        plan.append((name, target, flip))
    script: list[Move] = []
    used = set(src.edges) | set(dst.edges)
    tmp = {}
    i = 0
    for old, new, flip in plan:
        if old == new and not flip:
            continue
        if old == new:
            script.append(Rename("edge", old, old, flip=True))
            continue
        while f"_tmp{i}" in used:
            i += 1
        tmp[old] = f"_tmp{i}"
        used.add(tmp[old])
        script.append(Rename("edge", old, tmp[old]))
    for old, new, flip in plan:
        if old in tmp:
            script.append(Rename("edge", tmp[old], new, flip=flip))
    if replay(src, script) != dst:
        raise AssertionError("alignment failed")
    return script


# ---------------------------------------------------------------------------
# bounded search
# ---------------------------------------------------------------------------


def neighbors(g: GbsGraph, kinds: Sequence[str] = ("slide", "swap", "connect"), max_exp: int | None = None) -> Iterator[tuple[Move, GbsGraph]]:
    """Applicable moves of the given kinds with their results, in a fixed order."""
    halves = list(g.half_edges())
    cands: list[Move] = []
    if "slide" in kinds:
        cands += [Slide(d, e) for d in halves for e in halves if d.edge != e.edge and g.tau(d) == g.iota(e)]
    loops = [h for h in halves if g.is_loop(h.edge)]
    if "swap" in kinds:
        cands += [Swap(a, b) for a in loops for b in loops if a.edge != b.edge and g.tau(a) == g.tau(b)]
    if "connect" in kinds:
        for d in halves:
            for e in loops:
                if d.edge == e.edge or g.tau(d) != g.iota(e):
                    continue
                n = g.psi(e.bar)
                if g.psi(d) % n or g.psi(e) % n:
                    continue
                k = connection_min_k(g.psi(d) // n, g.psi(e) // n)
                if k is not None:
                    cands += [Connection(d, e, k), Connection(d, e, k + 1)]
    if "sign" in kinds:
        cands += [EdgeSignChange(name) for name in g.edge_names()]
    for m in cands:
        if check(g, m) is not None:
            continue
        out = apply(g, m)
        if max_exp is not None and any(e > max_exp for h in out.half_edges() for e in out.point(h).exps.values()):
            continue
        yield m, out


@dataclass
class SearchResult:
    found: bool
    script: list[Move] | None
    explored: int
    exhausted: bool


def search_moves(
    g1: GbsGraph,
    g2: GbsGraph,
    depth: int = 8,
    budget: int = 200_000,
    kinds: Sequence[str] = ("slide", "swap", "connect"),
    max_exp: int | None = None,
) -> SearchResult:
    """Bidirectional breadth-first search for a move script from g1 to g2's shape.

    States are compared by shape (edge names and stored orientation are
    ignored).  The returned script ends with renames, so it replays on g1
    to exactly g2.
    """
    if max_exp is None:
        top = max([e for g in (g1, g2) for h in g.half_edges() for e in g.point(h).exps.values()] + [0])
        max_exp = 2 * top + 2
    if g1.same_shape(g2):
        return SearchResult(True, align_script(g1, g2), 1, False)
    fwd: dict[tuple, tuple[GbsGraph, tuple | None, Move | None]] = {g1.shape_key(): (g1, None, None)}
    bwd: dict[tuple, tuple[GbsGraph, tuple | None, Move | None]] = {g2.shape_key(): (g2, None, None)}
    fr, br = [g1.shape_key()], [g2.shape_key()]
    explored = 2
    d1 = d2 = 0
    exhausted = True
    while d1 + d2 < depth and (fr or br):
        grow_fwd = (len(fr) <= len(br) and fr) or not br
        frontier, seen, other = (fr, fwd, bwd) if grow_fwd else (br, bwd, fwd)
        nxt = []
        for key in frontier:
            g = seen[key][0]
            for m, out in neighbors(g, kinds, max_exp):
                k2 = out.shape_key()
                if k2 in seen:
                    continue
                seen[k2] = (out, key, m)
                explored += 1
                if k2 in other:
                    return SearchResult(True, _join(fwd, bwd, k2, g1, g2), explored, False)
                nxt.append(k2)
                if explored > budget:
                    return SearchResult(False, None, explored, False)
        if grow_fwd:
            fr, d1 = nxt, d1 + 1
        else:
            br, d2 = nxt, d2 + 1
    if fr or br:
        exhausted = False
    return SearchResult(False, None, explored, exhausted)


def _join(fwd, bwd, key, g1: GbsGraph, g2: GbsGraph) -> list[Move]:
    path: list[Move] = []
    k = key
    while fwd[k][1] is not None:
        path.append(fwd[k][2])
        k = fwd[k][1]
    path.reverse()
    mid_f = fwd[key][0]
    mid_b = bwd[key][0]
    script = path + align_script(mid_f, mid_b)
    k = key
    g = mid_b
    while bwd[k][1] is not None:
        prev = bwd[bwd[k][1]][0]
        m = bwd[k][2]
        back = invert_script(prev, [m])
        script += back
        g = replay(g, back)
        k = bwd[k][1]
    script += align_script(g, g2)
    if replay(g1, script) != g2:
        raise AssertionError("search witness does not replay")
    return script


# ---------------------------------------------------------------------------
# isomorphism of controlled graphs
# ---------------------------------------------------------------------------


def _loop_halves(g: GbsGraph) -> list[HalfEdge]:
    return list(g.half_edges())


def _fold(g: GbsGraph, a: AffineVector) -> tuple[GbsGraph, list[Move], HalfEdge] | None:
    """Fold the loops reachable from a into one loop based at a (up to sign)."""
    halves = list(g.half_edges())
    s: frozenset[int] = frozenset()
    order: list[HalfEdge] = []
    used: set[str] = set()
    progress = True
    while progress:
        progress = False
        for h in halves:
            if h.edge in used:
                continue
            base, top = g.point(h.bar), g.point(h)
            if (base - a).is_nonneg() and support(base - a) <= s and (top - a).is_nonneg() and not support(top - a) <= s:
                s |= support(top - a)
                order.append(h)
                used.add(h.edge)
                progress = True
                break
    if not order:
        return None
    k = vertex_bound(g, next(iter(g.vertices))) + 1
    script: list[Move] = []
    cur = g
    first = order[0]
    try:
        for h in order[1:]:
            step = [Slide(h, first)] * k + [Swap(first, h)]
            cur = replay(cur, step)
            script += step
            first = h
    except MoveError:
        return None
    return cur, script, first


def _search_base(g: GbsGraph, a: AffineVector, budget: int) -> tuple[GbsGraph, list[Move]] | None:
    """Breadth-first search over slides and swaps for a configuration based at a."""
    top = max([e for h in g.half_edges() for e in g.point(h).exps.values()] + [0])
    seen = {g.shape_key(): (g, [])}
    queue = [g]
    while queue and len(seen) < budget:
        nxt = []
        for cur in queue:
            for m, out in neighbors(cur, ("slide", "swap"), max_exp=top + 2):
                key = out.shape_key()
                if key in seen:
                    continue
                script = seen[cur.shape_key()][1] + [m]
                seen[key] = (out, script)
                if any(c.a == a for c in _all_configs(out)):
                    return out, script
                nxt.append(out)
        queue = nxt
    return None


def _swap_in(g: GbsGraph, first: HalfEdge, a: AffineVector) -> tuple[GbsGraph, list[Move], ControlledConfig] | None:
    """Swap the controlling loop with a satellite based exactly at a."""
    for h in g.half_edges():
        if h.edge == first.edge or g.point(h.bar) != a:
            continue
        m = Swap(first, h)
        if check(g, m) is not None:
            continue
        out = apply(g, m)
        c = config_at(out, first)
        if c and c.a == a:
            return out, [m], c
    return None


# longer translations are given up on; the walk would be unreadable anyway
_MAX_TRANSLATION_STEPS = 400


def _cheap_combination(coeffs: list[int], kernel: list[list[int]], heavy: int) -> list[int]:
    """Adjust coefficients by relations so that the ``heavy`` one (a self-slide count) is small.

    The relation lattice is LLL-reduced under a weighting that makes the
    ``heavy`` coordinate expensive, the coefficient vector is reduced
    against it by nearest-plane rounding, and single relations are then
    added or subtracted while that lowers the total cost.
    """
    weights = [1] * len(coeffs)
    weights[heavy] = _HEAVY_WEIGHT

    def scaled(v: list[int]) -> list[int]:
        return [x * wt for x, wt in zip(v, weights)]

    def cost(v: list[int]) -> int:
        return sum(abs(x) * wt for x, wt in zip(v, weights))

    basis = _lll([scaled(k) for k in kernel])
    target = _babai(scaled(coeffs), basis)
    c = [x // wt for x, wt in zip(target, weights)]
    reduced = [[x // wt for x, wt in zip(k, weights)] for k in basis]
    improved = True
    while improved:
        improved = False
        for k in reduced:
            for sign in (1, -1):
                cand = [x + sign * y for x, y in zip(c, k)]
                if cost(cand) < cost(c):
                    c, improved = cand, True
    return c


_HEAVY_WEIGHT = 50


def _dot(u: list, v: list) -> Fraction:
    return sum((Fraction(x) * y for x, y in zip(u, v)), Fraction(0))


def _gram_schmidt(basis: list[list[int]]) -> tuple[list[list[Fraction]], list[list[Fraction]]]:
    ortho: list[list[Fraction]] = []
    mu = [[Fraction(0)] * len(basis) for _ in basis]
    for i, b in enumerate(basis):
        v = [Fraction(x) for x in b]
        for j in range(i):
            mu[i][j] = _dot(b, ortho[j]) / _dot(ortho[j], ortho[j])
            v = [x - mu[i][j] * y for x, y in zip(v, ortho[j])]
        ortho.append(v)
    return ortho, mu


def _lll(basis: list[list[int]], delta: Fraction = Fraction(3, 4)) -> list[list[int]]:
    """LLL reduction of a linearly independent integer basis (exact arithmetic)."""
    b = [list(v) for v in basis if any(v)]
    if not b:
        return b
    k = 1
    ortho, mu = _gram_schmidt(b)
    while k < len(b):
        for j in range(k - 1, -1, -1):
            q = round(mu[k][j])
            if q:
                b[k] = [x - q * y for x, y in zip(b[k], b[j])]
                ortho, mu = _gram_schmidt(b)
        if _dot(ortho[k], ortho[k]) >= (delta - mu[k][k - 1] ** 2) * _dot(ortho[k - 1], ortho[k - 1]):
            k += 1
        else:
            b[k], b[k - 1] = b[k - 1], b[k]
            ortho, mu = _gram_schmidt(b)
            k = max(k - 1, 1)
    return b


def _babai(v: list[int], basis: list[list[int]]) -> list[int]:
    """v minus a nearby lattice vector (nearest-plane rounding)."""
    if not basis:
        return list(v)
    ortho, _ = _gram_schmidt(basis)
    out = list(v)
    for i in range(len(basis) - 1, -1, -1):
        q = round(_dot(out, ortho[i]) / _dot(ortho[i], ortho[i]))
        if q:
            out = [x - q * y for x, y in zip(out, basis[i])]
    return out


def _translate_satellite(g: GbsGraph, first: HalfEdge, sat: HalfEdge, target: AffineVector) -> _Walk | None:
    """Move satellite ``sat`` so that its base is ``target`` (same coset mod H).

    The difference is written as alpha w + sum beta_j x_j.  The satellite is
    lifted by a multiple of w far enough that every intermediate position is
    controlled and lies above the edges it slides along; then it is
    translated by x_j (both endpoints slid along satellite j), by its own x
    (self-slides), and finally shifted by w down to the target.
    """
    walk = _Walk(g, first, sat)
    while not walk.x.is_nonneg():
        walk.top(1)
    c = config_at(walk.g, first)
    if not c:
        return None
    a, w, x = walk.a, walk.w, walk.x
    others = [s for s in c.satellites if s.half.edge != sat.edge]
    gens = [w, x] + [s.x for s in others]
    primes = set(_config_primes(c)) | target.primes()
    coeffs = solve(span(gens, primes), target - walk.b)
    if coeffs is None:
        return None
    coeffs = _cheap_combination(coeffs, relations(gens, primes), heavy=1)
    alpha, beta, rest = coeffs[0], coeffs[1], coeffs[2:]
    if abs(beta) + sum(abs(n) for n in rest) > _MAX_TRANSLATION_STEPS:
        return None
    plan: list[tuple[HalfEdge, AffineVector, AffineVector]] = []
    for s, n in zip(others, rest):
        along = s.half if n > 0 else s.half.bar
        step = s.x if n > 0 else -s.x
        plan += [(along, walk.g.point(along.bar), step)] * abs(n)
    sign = 1 if beta > 0 else -1

    # every requirement has the form "p + lift*w >= floor" with p, floor known
    # before lifting; collect them and take the least lift meeting all
    needs: list[tuple[AffineVector, AffineVector]] = []
    p = walk.b
    for _, base, step in plan:
        needs.append((p, base))
        p = p + step
        needs += [(p, a), (p + x, a)]
    for i in range(abs(beta) + 1):
        needs += [(p + (i * sign + j) * x, a) for j in (-1, 0, 1, 2)]
    lift = 0
    wsup = support(w)
    for pt, floor in needs:
        gap = floor - pt
        if not support(pt - a) <= wsup:
            return None
        for q, e in gap.exps.items():
            if e <= 0:
                continue
            if q not in wsup:
                return None
            lift = max(lift, -(-e // w.get(q)))
    walk.shift(lift)
    for along, _, _ in plan:
        walk.run([Slide(walk.t, along), Slide(walk.t.bar, along)])
    walk.translate(beta)
    walk.shift(alpha - lift)
    if walk.b != target:
        return None
    return walk


def _align_by_coset(g: GbsGraph, first: HalfEdge, a: AffineVector) -> tuple[GbsGraph, list[Move], ControlledConfig] | None:
    """Bring a satellite in the coset a + H to base exactly a and swap it with the controlling loop."""
    c = config_at(g, first)
    if not c:
        return None
    h_sub = reindex(c.subgroup(), a.primes())
    for sat in c.satellites:
        for h in (sat.half, sat.half.bar):
            if not member(h_sub, a - g.point(h.bar)):
                continue
            try:
                walk = _translate_satellite(g, first, h, a)
            except (MoveError, ValueError):
                continue
            if walk is None:
                continue
            done = _swap_in(walk.g, first, a)
            if done is not None:
                return done[0], walk.moves + done[1], done[2]
    return None


def build_control(g: GbsGraph, a: AffineVector, budget: int = 300) -> tuple[GbsGraph, list[Move], ControlledConfig] | None:
    """Try to make g (one vertex) controlled with base exactly a by slides and swaps.

    Loops reachable from a (bases above a, supported on primes already
    reached) are folded into one loop based at a or at a + sign, as in the
    collapsing procedure.  In the second case a satellite whose base lies
    in a + H is translated to base a and swapped with the folded loop.  A
    small breadth-first search is the fallback when nothing folds.
    Returns None when no configuration based at a was found.
    """
    _only_vertex(g)
    for c in _all_configs(g):
        if c.a == a:
            return g, [], c
    starts = []
    folded = _fold(g, a)
    if folded is not None:
        starts.append(folded)
    starts += [(g, [], c.controlling) for c in _all_configs(g) if c.a.unsigned() == a.unsigned()]
    for cur, script, first in starts:
        c = config_at(cur, first)
        if not c:
            continue
        if c.a == a:
            return cur, script, c
        for attempt in (_swap_in, _align_by_coset):
            done = attempt(cur, first, a)
            if done is not None:
                return done[0], script + done[1], done[2]
    if starts:
        return None
    found = _search_base(g, a, budget)
    if found is None:
        return None
    out, script = found
    c = next(c for c in _all_configs(out) if c.a == a)
    return out, script, c


def _prep(g: GbsGraph) -> GbsGraph:
    """Totally reduce graphs with several vertices; one-vertex graphs are kept as given."""
    if len(g.vertices) > 1 and not is_totally_reduced(g)[0]:
        g, _ = totally_reduce(g)
    return g


def _coset_list(h_sub: LatticeSubgroup, c: ControlledConfig) -> list[tuple]:
    return _coset_multiset(h_sub, (s.b for s in c.satellites))


def iso_controlled(
    g1: GbsGraph,
    g2: GbsGraph,
    allow: Iterable[str] = (),
    max_sign_edges: int = 14,
) -> Decision:
    """Decide whether g2 can be turned into g1 by moves, g1 being controlled.

    Without allowances the moves are slides, swaps and connections;
    ``allow`` may add "sign" (sign-changes) and "induction".
    """
    allow = set(allow)
    unknown = allow - {"sign", "induction"}
    if unknown:
        raise ValueError(f"unknown allowances {sorted(unknown)}")
    inputs = (g1, g2)
    g1 = _prep(g1)
    if len(g1.vertices) != 1:
        return Decision("no", "first graph does not reduce to one vertex, so it is not a controlled one-vertex graph")
    c1 = is_controlled(g1)
    if not c1:
        return Decision("no", f"first graph is not controlled: {c1.reason}")
    g2 = _prep(g2)
    if len(g2.vertices) != 1:
        return Decision("no", f"second graph reduces to {len(g2.vertices)} vertices, first to 1")
    if len(g2.edges) != len(g1.edges):
        return Decision("no", f"edge counts differ after reduction: {len(g1.edges)} vs {len(g2.edges)}")
    unrename: list[Move] = []
    if next(iter(g2.vertices)) != c1.vertex:
        unrename = [Rename("vertex", c1.vertex, next(iter(g2.vertices)))]
        g2 = replay(g2, [Rename("vertex", next(iter(g2.vertices)), c1.vertex)])
    # a witness is only meaningful when neither graph had to be reduced first
    as_given = g1 is inputs[0] and len(inputs[1].vertices) == 1
    inv1 = invariant(g1)
    h_sub = c1.subgroup()

    variants: list[tuple[GbsGraph, str]] = [(g2, "")]
    if "sign" in allow:
        names = g2.edge_names()
        if len(names) > max_sign_edges:
            return Decision("unknown", f"sign-change enumeration capped at {max_sign_edges} edges")
        inv2 = invariant(g2)
        torsion = member(inv2.subgroup, SIGN)
        if torsion:
            variants.append((replay(g2, [VertexSignChange(c1.vertex)]), " after a vertex sign-change"))
        else:
            variants = []
            for flips in itertools.product((False, True), repeat=len(names)):
                script = [EdgeSignChange(n) for n, f in zip(names, flips) if f]
                variants.append((replay(g2, script), " after sign-changes on " + ",".join(m.edge for m in script) if script else ""))

    last = "no controlled configuration of the second graph has the base of the first"
    for g, note in variants:
        inv2 = invariant(g)
        if not lattice_equal(inv1.subgroup, inv2.subgroup):
            last = f"difference subgroups differ: {inv1.subgroup} vs {inv2.subgroup}"
            continue
        if "induction" not in allow and inv1.cosets != inv2.cosets:
            last = "edge cosets mod H differ" + note
            continue
        built = build_control(g, c1.a)
        if built is None:
            last = f"cannot build a controlling edge based at {c1.a}" + note
            continue
        g2c, build, c2 = built
        if "induction" not in allow:
            dec = equiv_decide(c1, c2)
            if dec:
                witness = None
                if as_given and not note and len(c1.satellites) == 1:
                    witness = equiv_witness_m1(g1, g2c) + invert_script(g, build) + unrename
                return Decision("yes", dec.reason + note, witness)
            last = dec.reason + note
            continue
        if c1.a.primes():
            return Decision("no", "inductions only act on a controlling loop based at a sign-only point")
        mine = [s.b for s in c1.satellites]
        theirs = _coset_list(h_sub, c2)
        units = [AffineVector(0, {p: 1}) for p in support(c1.w)] + [SIGN]
        big = lattice_add(h_sub, span(units, set(h_sub.primes) | support(c1.w)))
        for cand in c2.satellites:
            d = cand.b - mine[0]
            if not member(big, d):
                continue
            moved = _coset_multiset(h_sub, (b + d for b in mine))
            if moved == theirs:
                return Decision("yes", "satellite cosets agree after a translation by induction" + note)
        last = "no induction translation matches the satellite cosets" + note
    return Decision("no", last)
