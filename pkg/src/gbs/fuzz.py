"""Random graphs and random applicable moves, for tests and benchmarks."""

from __future__ import annotations

import random
from collections.abc import Iterator

from .core import Edge, GbsGraph, HalfEdge, factorize
from .moves import (
    Connection,
    EdgeSignChange,
    Induction,
    Move,
    Slide,
    Swap,
    VertexSignChange,
    check,
    connection_min_k,
    induction_min_k,
    swap_exponents,
)

SMALL_PRIMES = (2, 3, 5, 7)


def random_label(rng: random.Random, bound: int = 360, primes=SMALL_PRIMES, signed: bool = True) -> int:
    """A random nonzero label with |label| <= bound built from ``primes``."""
    while True:
        n = 1
        for _ in range(rng.randint(0, 4)):
            p = rng.choice(primes)
            if n * p > bound:
                break
            n *= p
        if signed and rng.random() < 0.25:
            n = -n
        return n


def random_graph(
    rng: random.Random,
    max_vertices: int = 4,
    max_edges: int = 6,
    bound: int = 360,
    primes=SMALL_PRIMES,
    signed: bool = True,
    min_loops: int = 0,
) -> GbsGraph:
    """A random connected GBS graph (a random spanning tree plus extra edges)."""
    nv = rng.randint(1, max_vertices)
    vs = [f"v{i}" for i in range(nv)]
    edges: dict[str, Edge] = {}

    def add(a: str, b: str) -> None:
        name = f"e{len(edges)}"
        edges[name] = Edge(a, b, random_label(rng, bound, primes, signed), random_label(rng, bound, primes, signed))

    for i in range(1, nv):
        add(vs[rng.randrange(i)], vs[i])
    extra = rng.randint(0, max(0, max_edges - (nv - 1)))
    extra = max(extra, min(min_loops, max_edges - (nv - 1)))
    for i in range(extra):
        if i < min_loops:
            v = rng.choice(vs)
            add(v, v)
        else:
            add(rng.choice(vs), rng.choice(vs))
    return GbsGraph(vs, edges)


def _label_ok(g: GbsGraph, bound: int | None) -> bool:
    return bound is None or all(abs(x) <= bound for x in g.labels())


def candidate_moves(g: GbsGraph, rng: random.Random, kinds=("slide", "induct", "swap", "connect", "sign")) -> Iterator[Move]:
    """Yield applicable moves of the requested kinds, in random order."""
    halves = list(g.half_edges())
    cands: list[Move] = []
    if "slide" in kinds:
        for d in halves:
            for e in halves:
                if d.edge != e.edge and g.tau(d) == g.iota(e):
                    cands.append(Slide(d, e))
    loops = [h for h in halves if g.is_loop(h.edge)]
    if "induct" in kinds:
        for h in loops:
            if g.psi(h.bar) == 1:
                n = g.psi(h)
                for f in factorize(n).exps:
                    cands.append(Induction(h, f * rng.choice((1, -1))))
                cands.append(Induction(h, n))
                cands.append(Induction(h, -1))
    if "swap" in kinds:
        for a in loops:
            for b in loops:
                if a.edge != b.edge and g.tau(a) == g.tau(b):
                    cands.append(Swap(a, b))
    if "connect" in kinds:
        for d in halves:
            for e in loops:
                if d.edge != e.edge and g.tau(d) == g.iota(e):
                    cands.append(Connection(d, e))
    if "sign" in kinds:
        cands.extend(VertexSignChange(v) for v in sorted(g.vertices))
        cands.extend(EdgeSignChange(e) for e in sorted(g.edges))
    rng.shuffle(cands)
    for m in cands:
        if check(g, m) is None:
            yield m


def random_move(g: GbsGraph, rng: random.Random, kinds=("slide", "induct", "swap", "connect", "sign"), bound: int | None = None) -> Move | None:
    from .moves import apply

    for m in candidate_moves(g, rng, kinds):
        if bound is None or _label_ok(apply(g, m), bound):
            return m
    return None


def random_walk(g: GbsGraph, rng: random.Random, steps: int, kinds=("slide", "induct", "swap", "connect", "sign"), bound: int | None = None) -> list[Move]:
    from .moves import apply

    script: list[Move] = []
    for _ in range(steps):
        m = random_move(g, rng, kinds, bound)
        if m is None:
            break
        g = apply(g, m)
        script.append(m)
    return script


# -- instance generators for the derived moves --------------------------------


def _pick(rng: random.Random, primes=SMALL_PRIMES, lo: int = 0, hi: int = 2) -> int:
    n = 1
    for p in primes:
        n *= p ** rng.randint(lo, hi)
    return n


def _attach_rest(rng: random.Random, v: str, edges: dict[str, Edge], extra: int, bound: int) -> list[str]:
    """Add ``extra`` random edges at v (loops or edges to new leaves)."""
    vs = [v]
    for i in range(extra):
        name = f"x{i}"
        if rng.random() < 0.5:
            edges[name] = Edge(v, v, random_label(rng, bound), random_label(rng, bound))
        else:
            w = f"w{i}"
            vs.append(w)
            if rng.random() < 0.5:
                edges[name] = Edge(w, v, random_label(rng, bound), random_label(rng, bound))
            else:
                edges[name] = Edge(v, w, random_label(rng, bound), random_label(rng, bound))
    return vs


def random_induction_instance(rng: random.Random, bound: int = 60) -> tuple[GbsGraph, Induction]:
    n = 1
    while abs(n) == 1:
        n = _pick(rng, (2, 3, 5), 0, 2) * rng.choice((1, -1))
    edges = {"h": Edge("v", "v", 1, n)} if rng.random() < 0.5 else {"h": Edge("v", "v", n, 1)}
    h = HalfEdge("h", "h" in edges and edges["h"].src_label == 1)
    vs = _attach_rest(rng, "v", edges, rng.randint(0, 2), bound)
    g = GbsGraph(vs, edges)
    fn = factorize(n)
    k = rng.randint(1, 2)
    ell = 1
    for p, e in fn.exps.items():
        ell *= p ** rng.randint(0, e * k)
    if rng.random() < 0.3:
        ell = -ell
    use_k = induction_min_k(ell, n) if rng.random() < 0.5 else k
    return g, Induction(h, ell, use_k)


def random_swap_instance(rng: random.Random, bound: int = 60) -> tuple[GbsGraph, Swap]:
    while True:
        n = _pick(rng, (2, 3), 0, 1) * rng.choice((1, -1))
        c = _pick(rng, (2, 3), 0, 1) * rng.choice((1, 1, -1))
        m = n * c
        need = factorize(c).primes()
        ell1 = _pick(rng, (2, 3, 5), 0, 1) * rng.choice((1, -1))
        ell2 = _pick(rng, (2, 3, 5), 0, 1) * rng.choice((1, -1))
        for p in need:
            if ell1 % p:
                ell1 *= p
            if ell2 % p:
                ell2 *= p
        if swap_exponents(n, m, ell1, ell2) is not None:
            break
    edges = {"a": Edge("v", "v", n, ell1 * n), "b": Edge("v", "v", m, ell2 * m)}
    a, b = HalfEdge("a", True), HalfEdge("b", True)
    if rng.random() < 0.5:
        edges["a"] = edges["a"].flipped()
        a = a.bar
    if rng.random() < 0.5:
        edges["b"] = edges["b"].flipped()
        b = b.bar
    vs = _attach_rest(rng, "v", edges, rng.randint(0, 2), bound)
    return GbsGraph(vs, edges), Swap(a, b)


def random_connection_instance(rng: random.Random, bound: int = 60) -> tuple[GbsGraph, Connection]:
    while True:
        n = _pick(rng, (2, 3), 0, 1) * rng.choice((1, -1))
        ell = _pick(rng, (2, 3, 5), 0, 1) * rng.choice((1, -1))
        if abs(ell) > 1:
            break
    k = rng.randint(0, 2)
    ell1 = 1
    for p, e in factorize(ell).exps.items():
        ell1 *= p ** rng.randint(0, e * k)
    ell1 *= rng.choice((1, -1))
    mm = random_label(rng, 12)
    edges = {"e": Edge("v", "v", n, ell * n)}
    e = HalfEdge("e", True)
    if rng.random() < 0.5:
        edges["e"] = edges["e"].flipped()
        e = e.bar
    vs = ["v"]
    if rng.random() < 0.2:
        edges["d"] = Edge("v", "v", mm, ell1 * n)
    else:
        edges["d"] = Edge("u", "v", mm, ell1 * n)
        vs.append("u")
    d = HalfEdge("d", True)
    if rng.random() < 0.5:
        edges["d"] = edges["d"].flipped()
        d = d.bar
    vs += _attach_rest(rng, "v", edges, rng.randint(0, 2), bound)[1:]
    g = GbsGraph(vs, edges)
    kmin = connection_min_k(ell1, ell)
    return g, Connection(d, e, kmin if rng.random() < 0.5 else max(k, kmin))
