"""
GBS graphs and their affine representation.

A GBS graph is a finite connected graph in which every half-edge carries a
nonzero integer.  Edges are stored once, with a fixed "forward" direction:

    edge e  vA:mA  vB:mB

means the forward half-edge ``e.fwd`` goes from ``vA`` to ``vB``.  The label
``mB`` is psi(e.fwd) and lives at the terminal vertex ``vB``; ``mA`` is
psi(e.rev) and lives at ``vA``.

Labels are turned into points of the abelian group A = Z/2 + (+)_p Z by prime
factorization: the sign becomes the Z/2 coordinate and each prime contributes
its exponent.  Vectors are sparse, so only primes that actually occur are
ever stored.

    >>> factorize(-24)
    AffineVector(sign=1, exps={2: 3, 3: 1})
    >>> g = parse("gbs 1\\nvertex v\\nedge e v:1 v:2\\n")
    >>> sorted(set_of_primes(g))
    [2]
"""

from __future__ import annotations

import warnings
from collections.abc import Iterable, Iterator, Mapping
from dataclasses import dataclass
from typing import NamedTuple

__all__ = [
    "SIGN",
    "ZERO",
    "AffineGraph",
    "AffinePoint",
    "AffineVector",
    "DisconnectedGraphWarning",
    "Edge",
    "GbsGraph",
    "GraphError",
    "HalfEdge",
    "ParseError",
    "controls",
    "factorize",
    "from_affine",
    "is_prime",
    "parse",
    "serialize",
    "set_of_primes",
    "support",
    "to_affine",
    "vector_to_int",
]


class GraphError(ValueError):
    """Raised for structurally invalid graphs or labels."""


class ParseError(GraphError):
    def __init__(self, message: str, line: int | None = None):
        self.line = line
        prefix = f"line {line}: " if line is not None else ""
        super().__init__(prefix + message)


class DisconnectedGraphWarning(UserWarning):
    pass


# ---------------------------------------------------------------------------
# Affine vectors
# ---------------------------------------------------------------------------


def _clean(exps: Mapping[int, int]) -> tuple[tuple[int, int], ...]:
    return tuple(sorted((p, e) for p, e in exps.items() if e != 0))


@dataclass(frozen=True, init=False)
class AffineVector:
    """An element of Z/2 + (+)_p Z stored as a sign bit and sparse exponents."""

    sign: int
    _items: tuple[tuple[int, int], ...]

    def __init__(self, sign: int = 0, exps: Mapping[int, int] | None = None):
        object.__setattr__(self, "sign", sign % 2)
        object.__setattr__(self, "_items", _clean(exps or {}))

    @classmethod
    def _raw(cls, sign: int, items: tuple[tuple[int, int], ...]) -> AffineVector:
        v = object.__new__(cls)
        object.__setattr__(v, "sign", sign % 2)
        object.__setattr__(v, "_items", items)
        return v

    @property
    def exps(self) -> dict[int, int]:
        return dict(self._items)

    def __repr__(self) -> str:
        return f"AffineVector(sign={self.sign}, exps={self.exps})"

    def __str__(self) -> str:
        parts = [f"{p}^{e}" for p, e in self._items]
        body = "*".join(parts) if parts else "1"
        return ("-" if self.sign else "") + body

    def get(self, p: int) -> int:
        for q, e in self._items:
            if q == p:
                return e
        return 0

    def _combine(self, other: AffineVector, k: int) -> AffineVector:
        acc = dict(self._items)
        for p, e in other._items:
            acc[p] = acc.get(p, 0) + k * e
        return AffineVector._raw(self.sign + k * other.sign, _clean(acc))

    def __add__(self, other: AffineVector) -> AffineVector:
        return self._combine(other, 1)

    def __sub__(self, other: AffineVector) -> AffineVector:
        return self._combine(other, -1)

    def __neg__(self) -> AffineVector:
        return AffineVector._raw(self.sign, tuple((p, -e) for p, e in self._items))

    def __rmul__(self, k: int) -> AffineVector:
        if not isinstance(k, int):
            return NotImplemented
        if k == 0:
            return ZERO
        return AffineVector._raw(k * self.sign, tuple((p, k * e) for p, e in self._items))

    def is_nonneg(self) -> bool:
        """True when every exponent is >= 0 (the sign bit is unconstrained)."""
        return all(e >= 0 for _, e in self._items)

    def dominates(self, other: AffineVector) -> bool:
        """self >= other in the order of A, which ignores the sign bit."""
        return (self - other).is_nonneg()

    def is_sign_only(self) -> bool:
        return not self._items

    def unsigned(self) -> AffineVector:
        return AffineVector._raw(0, self._items)

    def primes(self) -> frozenset[int]:
        return frozenset(p for p, _ in self._items)


ZERO = AffineVector()
SIGN = AffineVector(1)


# ---------------------------------------------------------------------------
# Factorization
# ---------------------------------------------------------------------------


def is_prime(n: int) -> bool:
    """Deterministic Miller-Rabin; exact for every n below 3.3 * 10^24."""
    if n < 2:
        return False
    small = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41)
    for p in small:
        if n % p == 0:
            return n == p
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in small:
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def _valuation(n: int, p: int) -> tuple[int, int]:
    """(e, n / p^e) with p^e the largest power of p dividing n; fast for huge powers."""
    if p == 2:
        e = (n & -n).bit_length() - 1
        return e, n >> e
    e = 0
    powers = [p]
    while n % powers[-1] == 0:
        n //= powers[-1]
        e += 1 << (len(powers) - 1)
        powers.append(powers[-1] * powers[-1])
    for i in range(len(powers) - 2, -1, -1):
        if n % powers[i] == 0:
            n //= powers[i]
            e += 1 << i
    return e, n


def _trial_factor(n: int) -> dict[int, int]:
    out: dict[int, int] = {}
    for p in (2, 3, 5):
        e, n = _valuation(n, p)
        if e:
            out[p] = e
    # wheel over residues coprime to 30
    p, steps, i = 7, (4, 2, 4, 2, 4, 6, 2, 6), 0
    settled = n == 1 or is_prime(n)
    while not settled and p * p <= n:
        if n % p == 0:
            out[p], n = _valuation(n, p)
            settled = n == 1 or is_prime(n)
        p += steps[i]
        i = (i + 1) % 8
    if n > 1:
        out[n] = out.get(n, 0) + 1
    return out


_FACTOR_CACHE: dict[int, AffineVector] = {}


def factorize(n: int) -> AffineVector:
    """Prime factorization of a nonzero integer as an affine vector."""
    if not isinstance(n, int) or isinstance(n, bool):
        raise TypeError(f"expected an integer, got {n!r}")
    if n == 0:
        raise GraphError("cannot factorize 0: labels must be nonzero")
    cached = _FACTOR_CACHE.get(n)
    if cached is None:
        cached = AffineVector(1 if n < 0 else 0, _trial_factor(abs(n)))
        if len(_FACTOR_CACHE) < 200_000:
            _FACTOR_CACHE[n] = cached
    return cached


def vector_to_int(v: AffineVector) -> int:
    """Inverse of factorize; every exponent must be nonnegative."""
    out = 1
    for p, e in v._items:
        if e < 0:
            raise GraphError(f"negative exponent {e} at prime {p} has no integer value")
        out *= p**e
    return -out if v.sign else out


def support(v: AffineVector) -> frozenset[int]:
    """Primes with nonzero exponent; the sign coordinate is never included."""
    return v.primes()


def controls(a: AffineVector, w: AffineVector, b: AffineVector) -> bool:
    """a, w controls b: b - a >= 0 and supp(b - a) is inside supp(w)."""
    diff = b - a
    return diff.is_nonneg() and support(diff) <= support(w)


# ---------------------------------------------------------------------------
# Graphs
# ---------------------------------------------------------------------------


class HalfEdge(NamedTuple):
    edge: str
    fwd: bool = True

    @property
    def bar(self) -> HalfEdge:
        return HalfEdge(self.edge, not self.fwd)

    def __str__(self) -> str:
        return f"{self.edge}.{'fwd' if self.fwd else 'rev'}"

    @classmethod
    def parse(cls, text: str) -> HalfEdge:
        name, dot, direction = text.rpartition(".")
        if not dot or direction not in ("fwd", "rev") or not name:
            raise ParseError(f"bad half-edge {text!r}; expected NAME.fwd or NAME.rev")
        return cls(name, direction == "fwd")


class Edge(NamedTuple):
    """Stored edge: forward half-edge runs src -> dst.

    ``src_label`` is psi(rev), living at src; ``dst_label`` is psi(fwd),
    living at dst.
    """

    src: str
    dst: str
    src_label: int
    dst_label: int

    def flipped(self) -> Edge:
        return Edge(self.dst, self.src, self.dst_label, self.src_label)

    def is_loop(self) -> bool:
        return self.src == self.dst


def _check_name(name: str, what: str) -> None:
    if not isinstance(name, str) or not name or any(c.isspace() for c in name) or ":" in name or "#" in name:
        raise GraphError(f"invalid {what} name {name!r}")


class GbsGraph:
    """Immutable GBS graph.

    Vertices and edges are named by strings; ``edges`` maps each edge name to
    an :class:`Edge`.  Use the ``iota``/``tau``/``psi`` accessors on half-edges
    rather than reading ``Edge`` fields directly when orientation matters.
    """

    __slots__ = ("_edges", "_hash", "_vertices")

    def __init__(self, vertices: Iterable[str], edges: Mapping[str, Edge] | Iterable[tuple[str, Edge]] = ()):
        vs = frozenset(vertices)
        es = dict(edges.items() if isinstance(edges, Mapping) else edges)
        for v in vs:
            _check_name(v, "vertex")
        for name, e in es.items():
            _check_name(name, "edge")
            if not isinstance(e, Edge):
                e = Edge(*e)
                es[name] = e
            for lab in (e.src_label, e.dst_label):
                if not isinstance(lab, int) or isinstance(lab, bool) or lab == 0:
                    raise GraphError(f"edge {name}: label {lab!r} must be a nonzero integer")
            if e.src not in vs or e.dst not in vs:
                raise GraphError(f"edge {name} references an unknown vertex")
        self._vertices = vs
        self._edges = es
        self._hash: int | None = None

    # -- basic accessors ----------------------------------------------------
    @property
    def vertices(self) -> frozenset[str]:
        return self._vertices

    @property
    def edges(self) -> Mapping[str, Edge]:
        return self._edges

    def edge_names(self) -> list[str]:
        return sorted(self._edges)

    def half_edges(self) -> Iterator[HalfEdge]:
        for name in sorted(self._edges):
            yield HalfEdge(name, True)
            yield HalfEdge(name, False)

    def _edge(self, h: HalfEdge) -> Edge:
        try:
            return self._edges[h.edge]
        except KeyError:
            raise GraphError(f"no edge named {h.edge!r}") from None

    def iota(self, h: HalfEdge) -> str:
        e = self._edge(h)
        return e.src if h.fwd else e.dst

    def tau(self, h: HalfEdge) -> str:
        e = self._edge(h)
        return e.dst if h.fwd else e.src

    def psi(self, h: HalfEdge) -> int:
        e = self._edge(h)
        return e.dst_label if h.fwd else e.src_label

    def point(self, h: HalfEdge) -> AffineVector:
        """Affine coordinate of the terminal end of h."""
        return factorize(self.psi(h))

    def is_loop(self, name: str) -> bool:
        return self._edges[name].is_loop()

    def incoming(self, v: str) -> list[HalfEdge]:
        """Half-edges h with tau(h) = v, in sorted order."""
        return [h for h in self.half_edges() if self.tau(h) == v]

    def outgoing(self, v: str) -> list[HalfEdge]:
        return [h for h in self.half_edges() if self.iota(h) == v]

    def loops_at(self, v: str) -> list[str]:
        return [n for n in sorted(self._edges) if self._edges[n].src == v and self._edges[n].dst == v]

    def labels(self) -> Iterator[int]:
        for e in self._edges.values():
            yield e.src_label
            yield e.dst_label

    def rank(self) -> int:
        """First Betti number of the underlying (connected) graph."""
        return len(self._edges) - len(self._vertices) + 1

    def is_connected(self) -> bool:
        if not self._vertices:
            return False
        adj: dict[str, set[str]] = {v: set() for v in self._vertices}
        for e in self._edges.values():
            adj[e.src].add(e.dst)
            adj[e.dst].add(e.src)
        start = min(self._vertices)
        seen, stack = {start}, [start]
        while stack:
            for w in adj[stack.pop()]:
                if w not in seen:
                    seen.add(w)
                    stack.append(w)
        return len(seen) == len(self._vertices)

    # -- functional updates -------------------------------------------------
    def with_edges(self, edges: Mapping[str, Edge | None], vertices: Iterable[str] | None = None) -> GbsGraph:
        es = dict(self._edges)
        for name, e in edges.items():
            if e is None:
                es.pop(name, None)
            else:
                es[name] = e
        return GbsGraph(self._vertices if vertices is None else vertices, es)

    def set_end(self, h: HalfEdge, vertex: str, label: int) -> GbsGraph:
        """Move the terminal end of h to ``vertex`` with label ``label``."""
        e = self._edge(h)
        new = e._replace(dst=vertex, dst_label=label) if h.fwd else e._replace(src=vertex, src_label=label)
        return self.with_edges({h.edge: new})

    def oriented(self, h: HalfEdge) -> Edge:
        """The edge seen from h: src = iota(h), dst = tau(h), labels psi(bar h), psi(h)."""
        e = self._edge(h)
        return e if h.fwd else e.flipped()

    # -- comparison -----------------------------------------------------------
    def _key(self):
        return (self._vertices, tuple(sorted(self._edges.items())))

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, GbsGraph):
            return NotImplemented
        return self._vertices == other._vertices and self._edges == other._edges

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash(self._key())
        return self._hash

    def shape_key(self) -> tuple:
        """Key ignoring edge names and stored orientation (vertex names kept)."""
        ends = []
        for e in self._edges.values():
            a, b = (e.src, e.src_label), (e.dst, e.dst_label)
            ends.append((a, b) if a <= b else (b, a))
        return (tuple(sorted(self._vertices)), tuple(sorted(ends)))

    def same_shape(self, other: GbsGraph) -> bool:
        return self.shape_key() == other.shape_key()

    def oriented_key(self) -> tuple:
        """Key ignoring stored orientation but keeping edge names."""
        out = []
        for name, e in self._edges.items():
            a, b = (e.src, e.src_label), (e.dst, e.dst_label)
            out.append((name,) + ((a, b) if a <= b else (b, a)))
        return (tuple(sorted(self._vertices)), tuple(sorted(out)))

    def __repr__(self) -> str:
        return f"GbsGraph({serialize(self)!r})"


# ---------------------------------------------------------------------------
# Affine representation
# ---------------------------------------------------------------------------


class AffinePoint(NamedTuple):
    vertex: str
    coord: AffineVector

    def __str__(self) -> str:
        return f"({self.vertex}, {self.coord})"


@dataclass(frozen=True)
class AffineGraph:
    vertices: frozenset[str]
    edges: Mapping[str, tuple[AffinePoint, AffinePoint]]


def to_affine(g: GbsGraph) -> AffineGraph:
    edges = {
        name: (AffinePoint(e.src, factorize(e.src_label)), AffinePoint(e.dst, factorize(e.dst_label)))
        for name, e in g.edges.items()
    }
    return AffineGraph(g.vertices, edges)


def from_affine(lam: AffineGraph) -> GbsGraph:
    edges = {}
    for name, (p, q) in lam.edges.items():
        for pt in (p, q):
            if not pt.coord.is_nonneg():
                raise GraphError(f"edge {name}: point {pt} is outside the positive cone")
        edges[name] = Edge(p.vertex, q.vertex, vector_to_int(p.coord), vector_to_int(q.coord))
    return GbsGraph(lam.vertices, edges)


def set_of_primes(g: GbsGraph) -> frozenset[int]:
    out: set[int] = set()
    for lab in g.labels():
        out |= factorize(lab).primes()
    return frozenset(out)


# ---------------------------------------------------------------------------
# Text format
# ---------------------------------------------------------------------------


def _parse_end(token: str, lineno: int) -> tuple[str, int]:
    vertex, colon, label = token.rpartition(":")
    if not colon or not vertex:
        raise ParseError(f"bad endpoint {token!r}; expected VERTEX:LABEL", lineno)
    try:
        value = int(label)
    except ValueError:
        raise ParseError(f"label {label!r} is not an integer", lineno) from None
    if value == 0:
        raise ParseError("label 0 is not allowed; labels are nonzero integers", lineno)
    return vertex, value


def parse(text: str, *, require_connected: bool = False) -> GbsGraph:
    """Read the line-oriented ``gbs 1`` format.

    A disconnected graph triggers :class:`DisconnectedGraphWarning`, or a
    :class:`ParseError` when ``require_connected`` is set.
    """
    vertices: list[str] = []
    edges: dict[str, Edge] = {}
    header_seen = False
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        words = line.split()
        if not header_seen:
            if words != ["gbs", "1"]:
                raise ParseError("expected header 'gbs 1'", lineno)
            header_seen = True
            continue
        kind = words[0]
        if kind == "vertex":
            if len(words) != 2:
                raise ParseError("expected 'vertex NAME'", lineno)
            if words[1] in vertices:
                raise ParseError(f"duplicate vertex {words[1]!r}", lineno)
            try:
                _check_name(words[1], "vertex")
            except GraphError as exc:
                raise ParseError(str(exc), lineno) from None
            vertices.append(words[1])
        elif kind == "edge":
            if len(words) != 4:
                raise ParseError("expected 'edge NAME vA:mA vB:mB'", lineno)
            name = words[1]
            if name in edges:
                raise ParseError(f"duplicate edge {name!r}", lineno)
            va, ma = _parse_end(words[2], lineno)
            vb, mb = _parse_end(words[3], lineno)
            for v in (va, vb):
                if v not in vertices:
                    raise ParseError(f"edge {name} references undeclared vertex {v!r}", lineno)
            try:
                _check_name(name, "edge")
            except GraphError as exc:
                raise ParseError(str(exc), lineno) from None
            edges[name] = Edge(va, vb, ma, mb)
        else:
            raise ParseError(f"unknown directive {kind!r}", lineno)
    if not header_seen:
        raise ParseError("empty input; expected header 'gbs 1'")
    if not vertices:
        raise ParseError("a GBS graph needs at least one vertex")
    g = GbsGraph(vertices, edges)
    if not g.is_connected():
        if require_connected:
            raise ParseError("graph is disconnected")
        warnings.warn("graph is disconnected", DisconnectedGraphWarning, stacklevel=2)
    return g


def serialize(g: GbsGraph) -> str:
    lines = ["gbs 1"]
    lines += [f"vertex {v}" for v in sorted(g.vertices)]
    for name in sorted(g.edges):
        e = g.edges[name]
        lines.append(f"edge {name} {e.src}:{e.src_label} {e.dst}:{e.dst_label}")
    return "\n".join(lines) + "\n"
