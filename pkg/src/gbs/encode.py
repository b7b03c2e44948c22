"""
Encodings that move the isomorphism question to simpler graphs.

``encode_one_vertex`` collapses a many-vertex graph onto a single vertex
``*``: every half-edge label is multiplied by a fresh prime attached to the
vertex the half-edge ends at, so the prime remembers where the endpoint
lived.  Slides, swaps and connections then correspond one to one.

``encode_positive`` removes signs from a one-vertex graph without +-1
labels.  A fresh prime ``q`` stands in for -1 (odd q-exponent means
negative), a fresh prime ``r`` squared keeps every label away from the new
edge ``f`` with labels (r q^2, r), and slides along ``f`` add or remove
``q^2`` at will.  Encoded graphs are kept canonical: every q-exponent is 0
or 1.
"""

from __future__ import annotations

import itertools
from collections.abc import Iterable, Mapping, Sequence
from dataclasses import dataclass

from .core import Edge, GbsGraph, GraphError, HalfEdge, is_prime, set_of_primes
from .moves import (
    Connection,
    EdgeSignChange,
    Move,
    MoveError,
    Slide,
    Swap,
    apply,
    check,
    connection_min_k,
)

__all__ = [
    "ONE_VERTEX",
    "PrimeAssignment",
    "Untranslatable",
    "decode_one_vertex",
    "decode_positive",
    "default_assignment",
    "encode_one_vertex",
    "encode_positive",
    "fresh_primes",
    "positive_f_edge",
    "translate_script_down",
    "translate_script_positive",
    "translate_script_positive_up",
    "translate_script_up",
]

ONE_VERTEX = "*"
_ALLOWED = (Slide, Swap, Connection, EdgeSignChange)


@dataclass(frozen=True)
class PrimeAssignment:
    """Fresh primes attached to the vertices of a graph."""

    primes: Mapping[str, int]

    def __post_init__(self) -> None:
        vals = list(self.primes.values())
        if len(set(vals)) != len(vals):
            raise GraphError("vertex primes must be distinct")
        bad = [p for p in vals if not is_prime(p)]
        if bad:
            raise GraphError(f"not prime: {bad}")

    def to_text(self) -> str:
        return "".join(f"prime {v} {p}\n" for v, p in sorted(self.primes.items()))


@dataclass(frozen=True)
class Untranslatable:
    """The first step of a script that has no counterpart on the other side."""

    step: int
    move: Move
    reason: str

    def __bool__(self) -> bool:
        return False


def fresh_primes(count: int, graphs: Iterable[GbsGraph] = (), avoid: Iterable[int] = ()) -> list[int]:
    """The ``count`` smallest primes above every prime used by ``graphs`` (and ``avoid``)."""
    used = set(avoid)
    for g in graphs:
        used |= set_of_primes(g)
    p = max(used, default=1)
    out = []
    while len(out) < count:
        p += 1
        if is_prime(p) and p not in used:
            out.append(p)
    return out


def _check_fresh(primes: Iterable[int], graphs: Iterable[GbsGraph]) -> None:
    used: set[int] = set()
    for g in graphs:
        used |= set_of_primes(g)
    clash = sorted(set(primes) & used)
    if clash:
        raise GraphError(f"primes {clash} already occur in the graph")


# ---------------------------------------------------------------------------
# many vertices -> one vertex
# ---------------------------------------------------------------------------


def encode_one_vertex(g: GbsGraph, pa: PrimeAssignment | None = None, others: Sequence[GbsGraph] = ()) -> GbsGraph:
    """One vertex ``*``, same edges, each label times the prime of its terminal vertex.

    ``others`` are further graphs whose primes must also be avoided (for
    instance the second graph of a pair being compared).  Without ``pa``
    the smallest primes above all occurring primes are used, assigned to
    the vertices in sorted order.
    """
    if pa is None:
        pa = default_assignment(g, others)
    missing = g.vertices - set(pa.primes)
    if missing:
        raise GraphError(f"no prime for vertices {sorted(missing)}")
    _check_fresh(pa.primes.values(), [g, *others])
    p = pa.primes
    edges = {
        name: Edge(ONE_VERTEX, ONE_VERTEX, p[e.src] * e.src_label, p[e.dst] * e.dst_label)
        for name, e in g.edges.items()
    }
    return GbsGraph([ONE_VERTEX], edges)


def default_assignment(g: GbsGraph, others: Sequence[GbsGraph] = ()) -> PrimeAssignment:
    vs = sorted(g.vertices)
    return PrimeAssignment(dict(zip(vs, fresh_primes(len(vs), [g, *others]))))


def decode_one_vertex(d: GbsGraph, pa: PrimeAssignment) -> GbsGraph:
    """Undo ``encode_one_vertex``: read each endpoint's vertex off its prime."""
    by_prime = {p: v for v, p in pa.primes.items()}

    def split(label: int) -> tuple[str, int]:
        hits = [p for p in by_prime if label % p == 0]
        if len(hits) != 1 or (label // hits[0]) % hits[0] == 0:
            raise GraphError(f"label {label} does not carry exactly one vertex prime")
        return by_prime[hits[0]], label // hits[0]

    edges = {}
    for name, e in d.edges.items():
        u, m = split(e.src_label)
        v, n = split(e.dst_label)
        edges[name] = Edge(u, v, m, n)
    return GbsGraph(sorted(pa.primes), edges)


def _allowed(m: Move) -> None:
    if not isinstance(m, _ALLOWED):
        raise MoveError(f"{type(m).__name__} is not a slide, swap, connection or edge sign-change")


def translate_script_down(g: GbsGraph, script: Sequence[Move], pa: PrimeAssignment) -> list[Move]:
    """The same moves, checked step by step against the encoded graph."""
    d = encode_one_vertex(g, pa)
    cur = g
    for i, m in enumerate(script):
        _allowed(m)
        cur = apply(cur, m)
        reason = check(d, m)
        if reason is not None:
            raise MoveError(f"step {i}: {reason}")
        d = apply(d, m)
        if d != encode_one_vertex(cur, pa):
            raise MoveError(f"step {i}: encoded graphs disagree")
    return list(script)


def translate_script_up(g: GbsGraph, script: Sequence[Move], pa: PrimeAssignment) -> list[Move] | Untranslatable:
    """Moves on ``encode_one_vertex(g, pa)`` read back on g.

    A move is translatable when the same move is valid on the current
    many-vertex graph and the encodings still agree afterwards; the first
    step where this fails is reported.
    """
    d = encode_one_vertex(g, pa)
    cur = g
    for i, m in enumerate(script):
        _allowed(m)
        reason = check(d, m)
        if reason is not None:
            raise MoveError(f"step {i}: {reason}")
        d = apply(d, m)
        up = check(cur, m)
        if up is not None:
            return Untranslatable(i, m, up)
        cur = apply(cur, m)
        if encode_one_vertex(cur, pa) != d:
            return Untranslatable(i, m, "labels do not carry the endpoint primes")
    return list(script)


# ---------------------------------------------------------------------------
# signed -> positive
# ---------------------------------------------------------------------------


def positive_f_edge(g: GbsGraph) -> str:
    """Name of the extra edge: ``f`` unless taken."""
    name, i = "f", 0
    while name in g.edges:
        i += 1
        name = f"f{i}"
    return name


def _q_exp(n: int, q: int) -> int:
    e = 0
    while n % q == 0:
        n //= q
        e += 1
    return e


def _positive_label(label: int, q: int, r: int, k: int) -> int:
    if label > 0:
        return r * r * q ** (2 * k) * label
    return r * r * q ** (2 * k + 1) * -label


def _only_vertex(g: GbsGraph) -> str:
    if len(g.vertices) != 1:
        raise GraphError("the positive encoding needs a one-vertex graph")
    (v,) = g.vertices
    return v


def encode_positive(
    g: GbsGraph, q: int | None = None, r: int | None = None, k: Mapping[HalfEdge, int] | None = None
) -> GbsGraph:
    """Positive, induction-free one-vertex graph with the extra edge f.

    ``k`` gives the number of extra q^2 factors per half-edge (default 0,
    the canonical choice).  Without q and r the two smallest fresh primes
    are used, q < r.
    """
    v = _only_vertex(g)
    if any(abs(x) == 1 for x in g.labels()):
        raise GraphError("graph is not induction-free (a label is +-1)")
    if q is None or r is None:
        q, r = fresh_primes(2, [g])
    if q == r or not (is_prime(q) and is_prime(r)):
        raise GraphError("q and r must be two distinct primes")
    _check_fresh((q, r), [g])
    k = k or {}
    edges = {}
    for name, e in g.edges.items():
        fwd, rev = HalfEdge(name, True), HalfEdge(name, False)
        edges[name] = Edge(
            v, v, _positive_label(e.src_label, q, r, k.get(rev, 0)), _positive_label(e.dst_label, q, r, k.get(fwd, 0))
        )
    edges[positive_f_edge(g)] = Edge(v, v, r * q * q, r)
    return GbsGraph([v], edges)


def decode_positive(omega: GbsGraph, q: int, r: int, f: str = "f") -> GbsGraph:
    """Strip r^2 and q-powers (odd power = negative) and drop f."""
    v = _only_vertex(omega)

    def back(label: int) -> int:
        if label <= 0 or label % (r * r) or (label // (r * r)) % r == 0:
            raise GraphError(f"label {label} is not r^2 times a q-power times an r-free number")
        rest = label // (r * r)
        e = _q_exp(rest, q)
        rest //= q**e
        return -rest if e % 2 else rest

    edges = {n: Edge(v, v, back(e.src_label), back(e.dst_label)) for n, e in omega.edges.items() if n != f}
    return GbsGraph([v], edges)


def _normalize(omega: GbsGraph, q: int, f: str, halves: Iterable[HalfEdge]) -> tuple[GbsGraph, list[Move]]:
    """Slide the given half-edges along f until their q-exponent is 0 or 1."""
    moves: list[Move] = []
    along = HalfEdge(f, True)
    for h in halves:
        while _q_exp(omega.psi(h), q) >= 2:
            m = Slide(h, along)
            omega = apply(omega, m)
            moves.append(m)
    return omega, moves


def _involved(m: Move) -> list[HalfEdge]:
    if isinstance(m, Slide):
        return [m.moved, m.along.bar, m.along]
    if isinstance(m, Swap):
        return [m.e1, m.e1.bar, m.e2, m.e2.bar]
    if isinstance(m, Connection):
        return [m.d, m.d.bar, m.e, m.e.bar]
    return []


def _distinct(halves: Sequence[HalfEdge]) -> list[HalfEdge]:
    out: list[HalfEdge] = []
    for h in halves:
        if h not in out:
            out.append(h)
    return out


def _raise_and_apply(
    omega: GbsGraph, seq: Sequence[Move], f: str, target: GbsGraph, q: int, max_raise: int
) -> list[Move] | None:
    """Raise q-exponents by even amounts until ``seq`` is valid and lands on ``target`` after normalizing.

    Raises are chosen separately before each move of ``seq`` (depth-first),
    since a later move may need padding that an earlier one must not see.
    """
    up = HalfEdge(f, False)
    if not seq:
        cur, post = _normalize(omega, q, f, [h for h in omega.half_edges() if h.edge != f])
        return post if cur == target else None
    m, rest = seq[0], seq[1:]
    halves = _distinct(_involved(m))
    for raises in itertools.product(range(max_raise + 1), repeat=len(halves)):
        pre: list[Move] = []
        for h, n in zip(halves, raises):
            pre += [Slide(h, up)] * n
        cur = omega
        for s in pre:
            cur = apply(cur, s)
        if check(cur, m) is not None:
            continue
        tail = _raise_and_apply(apply(cur, m), rest, f, target, q, max_raise)
        if tail is not None:
            return pre + [m] + tail
    return None


def _counterparts(g: GbsGraph, m: Move) -> list[list[Move]]:
    """Move sequences on g with the same effect as m, tried in order downstairs.

    A connection with k = 0 and l1 = -1 has no same-named counterpart (the
    q-exponent of l1 is odd while l^0 = 1); sliding d along e first and
    connecting with k + 1 has the same effect on both sides.
    """
    if not isinstance(m, Connection):
        return [[m]]
    k = m.k
    if k is None:
        n = g.psi(m.e.bar)
        k = connection_min_k(g.psi(m.d) // n, g.psi(m.e) // n)
    return [[Connection(m.d, m.e, k)], [Slide(m.d, m.e), Connection(m.d, m.e, k + 1)]]


def translate_script_positive(
    g: GbsGraph, script: Sequence[Move], q: int | None = None, r: int | None = None, max_raise: int = 2
) -> list[Move]:
    """A script on ``encode_positive(g, q, r)`` that tracks ``script`` on g.

    Each upstairs move becomes the same move, preceded by slides along the
    reverse of f that raise q-exponents (by 2 each) where divisibility needs
    it and followed by slides along f back to canonical exponents.  Raises
    :class:`MoveError` for a step with no such counterpart (an edge
    sign-change, which would flip q-parity, is one).
    """
    if q is None or r is None:
        q, r = fresh_primes(2, [g])
    f = positive_f_edge(g)
    omega = encode_positive(g, q, r)
    cur = g
    out: list[Move] = []
    for i, m in enumerate(script):
        _allowed(m)
        if isinstance(m, EdgeSignChange):
            raise MoveError(f"step {i}: an edge sign-change flips q-parity, which no move on positive graphs does")
        reason = check(cur, m)
        if reason is not None:
            raise MoveError(f"step {i}: {reason}")
        target = encode_positive(apply(cur, m), q, r)
        for seq in _counterparts(cur, m):
            steps = _raise_and_apply(omega, seq, f, target, q, max_raise)
            if steps is not None:
                break
        else:
            raise MoveError(f"step {i}: no q-normalized counterpart for {m}")
        out += steps
        cur = apply(cur, m)
        omega = target
    return out


def translate_script_positive_up(
    g: GbsGraph, script: Sequence[Move], q: int, r: int
) -> list[Move] | Untranslatable:
    """Read a script on ``encode_positive(g, q, r)`` back on g.

    Slides along f or its reverse only re-choose the q^2 padding and are
    dropped; every other move must be a slide, swap or connection not
    touching f that is valid on the decoded graph and commutes with decoding.
    """
    f = positive_f_edge(g)
    omega = encode_positive(g, q, r)
    cur = g
    out: list[Move] = []
    for i, m in enumerate(script):
        reason = check(omega, m)
        if reason is not None:
            raise MoveError(f"step {i}: {reason}")
        omega = apply(omega, m)
        if isinstance(m, Slide) and m.along.edge == f and m.moved.edge != f:
            continue
        if not isinstance(m, (Slide, Swap, Connection)) or f in {h.edge for h in _involved(m)}:
            return Untranslatable(i, m, "only slides along f may involve f")
        up = check(cur, m)
        if up is not None:
            return Untranslatable(i, m, up)
        cur = apply(cur, m)
        if decode_positive(omega, q, r, f) != cur:
            return Untranslatable(i, m, "decoded graph does not follow the move")
        out.append(m)
    return out
