"""Acceptance suite: nine end-to-end criteria at their stated sizes and tolerances.

Every criterion is a function returning a :class:`Result`; the pytest
wrapper prints one ``PASS``/``FAIL`` line per criterion and then asserts it.
Run the file directly (``python3 tests/test_acceptance.py``) to get only the
summary lines.
"""

from __future__ import annotations

import itertools
import random
import sys
import time
from dataclasses import dataclass
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from instances import controlled_instance, redundant_instance
from oracles import brute_equal, brute_member

from gbs.controlled import invariant, is_controlled, iso_controlled, search_moves
from gbs.core import (
    ZERO,
    AffinePoint,
    AffineVector,
    Edge,
    GbsGraph,
    GraphError,
    HalfEdge,
    set_of_primes,
    vector_to_int,
)
from gbs.encode import (
    default_assignment,
    encode_one_vertex,
    encode_positive,
    fresh_primes,
    translate_script_down,
    translate_script_positive,
    translate_script_positive_up,
    translate_script_up,
)
from gbs.fuzz import (
    random_connection_instance,
    random_graph,
    random_induction_instance,
    random_swap_instance,
    random_walk,
)
from gbs.lattice import add, coset_rep, equal, member, span
from gbs.moves import (
    Contraction,
    EdgeSignChange,
    Expansion,
    Induction,
    apply,
    check,
    expand_connection,
    expand_induction,
    expand_swap,
    replay,
    replay_states,
)
from gbs.reduction import (
    CollapsingData,
    conjugate,
    default_constants,
    is_redundant,
    is_totally_reduced,
    project,
    project_as_moves,
    totally_reduce,
    validate_affine_path,
)

SLIDE_SWAP_CONNECT = ("slide", "swap", "connect")


@dataclass
class Result:
    ok: bool
    detail: str


def _peak(g: GbsGraph, script) -> int:
    return max((len(s.vertices) for s in replay_states(g, script)), default=len(g.vertices))


# ---------------------------------------------------------------------------
# 1. derived moves
# ---------------------------------------------------------------------------


def derived_moves(n: int = 200, seed: int = 1) -> Result:
    rng = random.Random(seed)
    start = time.perf_counter()
    cases = [
        ("induction", random_induction_instance, expand_induction, 1),
        ("swap", random_swap_instance, expand_swap, 2),
        ("connection", random_connection_instance, expand_connection, 2),
    ]
    failures = []
    for name, make, expand, extra in cases:
        bad = 0
        for _ in range(n):
            g, m = make(rng)
            script = expand(g, m)
            if replay(g, script) != apply(g, m) or _peak(g, script) > len(g.vertices) + extra:
                bad += 1
        if bad:
            failures.append(f"{name}: {bad}/{n}")
    elapsed = time.perf_counter() - start
    ok = not failures and elapsed < 10
    return Result(ok, f"{3 * n} instances, {elapsed:.2f}s" + (f", failures {failures}" if failures else ""))


# ---------------------------------------------------------------------------
# 2. projection as moves
# ---------------------------------------------------------------------------


def projection_decomposition(n: int = 100, seed: int = 2) -> Result:
    rng = random.Random(seed)
    start = time.perf_counter()
    bad = 0
    for _ in range(n):
        g, v = redundant_instance(rng)
        data = is_redundant(g, v)
        if data is None or replay(g, project_as_moves(g, data)) != project(g, data):
            bad += 1
    elapsed = time.perf_counter() - start
    return Result(bad == 0 and elapsed < 10, f"{n - bad}/{n} exact, {elapsed:.2f}s")


# ---------------------------------------------------------------------------
# 3. independence of collapsing constants and data
# ---------------------------------------------------------------------------


def _counts(g: GbsGraph) -> tuple:
    return len(g.vertices), len(g.edges), g.rank(), set_of_primes(g)


def _sign_blind(g: GbsGraph) -> tuple:
    """The controlled invariant with the sign bit added to H.

    Edge sign-changes move both ends of an edge by the sign, so they keep
    this coarser invariant while changing the finer one.
    """
    inv = invariant(g)
    h = add(inv.subgroup, span([AffineVector(1)]))
    return h.primes, h.rows, tuple(sorted(str(coset_rep(h, c)) for c in inv.cosets))


def _alternative_projections(g: GbsGraph, v: str) -> list[GbsGraph]:
    loops = [HalfEdge(n, f) for n in g.loops_at(v) for f in (True, False)]
    exits = [h for h in g.half_edges() if g.iota(h) == v and g.tau(h) != v]
    out = []
    for r in range(len(loops) + 1):
        for seq in itertools.permutations(loops, r):
            for e in exits:
                try:
                    out.append(project(g, CollapsingData(v, seq, e)))
                except GraphError:
                    pass
    return out


def independence(n: int = 60, seed: int = 3) -> Result:
    """Pairs of projections from different constants and from different data.

    Different constants must be joined by slides and swaps alone, with the
    full invariant equal.  Different data may also need edge sign-changes,
    so those pairs use the sign-blind invariant and allow the sign move.
    """
    rng = random.Random(seed)
    pairs: list[tuple[str, GbsGraph, GbsGraph]] = []
    while sum(1 for p in pairs if p[0] == "constants") < n:
        g, v = redundant_instance(rng)
        data = is_redundant(g, v)
        if len(g.edges) > 3 or data is None or not data.loops:
            continue
        k = default_constants(g, data)
        other = tuple(x + rng.randint(1, 2) for x in k)
        p1, p2 = project(g, data, k), project(g, data, other)
        if p1 != p2:
            pairs.append(("constants", p1, p2))
    while sum(1 for p in pairs if p[0] == "data") < n:
        g, v = redundant_instance(rng)
        data = is_redundant(g, v)
        if len(g.edges) > 3 or data is None:
            continue
        p1 = project(g, data)
        others = [p for p in _alternative_projections(g, v) if p != p1]
        if others:
            pairs.append(("data", p1, rng.choice(others)))
    inv_bad, found, misses = 0, 0, []
    for kind, p1, p2 in pairs:
        same = _counts(p1) == _counts(p2)
        if len(p1.vertices) == 1:
            same = same and (invariant(p1) == invariant(p2) if kind == "constants" else _sign_blind(p1) == _sign_blind(p2))
        inv_bad += not same
        kinds = SLIDE_SWAP_CONNECT if kind == "constants" else SLIDE_SWAP_CONNECT + ("sign",)
        res = search_moves(p1, p2, depth=8, kinds=kinds)
        if res.found and replay(p1, res.script) == p2:
            found += 1
        else:
            misses.append(kind)
    rate = found / len(pairs)
    detail = f"{len(pairs)} pairs, invariants equal {len(pairs) - inv_bad}/{len(pairs)}, witnesses {found}/{len(pairs)} ({rate:.0%})"
    if misses:
        counts = {k: misses.count(k) for k in sorted(set(misses))}
        detail += f", search-budget misses: {counts}"
    return Result(inv_bad == 0 and rate >= 0.9, detail)


# ---------------------------------------------------------------------------
# 4. totally reduced
# ---------------------------------------------------------------------------


def totally_reduced(n: int = 200, seed: int = 4) -> Result:
    rng = random.Random(seed)
    start = time.perf_counter()
    bad = 0
    for _ in range(n):
        g = random_graph(rng, max_vertices=5, max_edges=8, bound=360)
        out, script = totally_reduce(g)
        if not is_totally_reduced(out)[0] or totally_reduce(out) != (out, []) or replay(g, script) != out:
            bad += 1
    elapsed = time.perf_counter() - start
    return Result(bad == 0 and elapsed < 30, f"{n - bad}/{n} reduced and idempotent, {elapsed:.2f}s")


# ---------------------------------------------------------------------------
# 5. conjugacy
# ---------------------------------------------------------------------------


def conjugacy(n: int = 300, seed: int = 5) -> Result:
    origin = AffinePoint("v", ZERO)
    square = AffinePoint("v", AffineVector(0, {2: 1}))
    bs = conjugate(GbsGraph(["v"], {"t": Edge("v", "v", 1, 2)}), origin, square)
    bs_ok = bs.status == "yes" and len(bs.path) == 1
    loop = conjugate(GbsGraph(["v"], {"t": Edge("v", "v", 2, 4)}), origin, square)
    loop_ok = loop.status == "no" and not loop.pruned
    rng = random.Random(seed)
    yes = bad = 0
    for _ in range(n):
        g = random_graph(rng, max_vertices=2, max_edges=3, bound=60)
        v = rng.choice(sorted(g.vertices))
        target = AffinePoint(
            rng.choice(sorted(g.vertices)), AffineVector(rng.randint(0, 1), {2: rng.randint(0, 2), 3: rng.randint(0, 1)})
        )
        verdict = conjugate(g, AffinePoint(v, ZERO), target, budget=20000)
        if verdict.status == "yes":
            yes += 1
            bad += not validate_affine_path(g, AffinePoint(v, ZERO), target, verdict.path)
    ok = bs_ok and loop_ok and bad == 0 and yes > 0
    return Result(ok, f"BS(1,2) {bs.status}/{len(bs.path or [])} step, (2,4) loop {loop.status}, {yes - bad}/{yes} fuzzed paths valid")


# ---------------------------------------------------------------------------
# 6. controlled isomorphism
# ---------------------------------------------------------------------------


def _perturbed(rng: random.Random) -> tuple[GbsGraph, GbsGraph]:
    """A controlled graph and a copy with one satellite moved off its coset."""
    while True:
        g = controlled_instance(rng, max_sats=2)
        c = is_controlled(g)
        s = c.satellites[0]
        shifts = [AffineVector(1)] + [AffineVector(0, {p: 1}) for p in sorted(c.w.primes())]
        for shift in shifts:
            if member(c.subgroup(), shift):
                continue
            lo, hi = vector_to_int(s.b + shift), vector_to_int(s.b + shift + s.x)
            moved = Edge("v", "v", lo, hi) if s.half.fwd else Edge("v", "v", hi, lo)
            out = g.with_edges({s.half.edge: moved})
            if is_controlled(out) and is_totally_reduced(out)[0]:
                return g, out


def _induced(rng: random.Random) -> tuple[GbsGraph, GbsGraph]:
    while True:
        g = controlled_instance(rng)
        c = is_controlled(g)
        if c.a != ZERO:
            continue
        ell = rng.choice(sorted(c.w.primes()))
        m = Induction(c.controlling, ell ** rng.randint(1, 2) * rng.choice((1, -1)), 1)
        if check(g, m) is None:
            out = apply(g, m)
            if out != g and is_controlled(out):
                return g, out


def curated_iso_suite(seed: int = 6) -> list[tuple[str, GbsGraph, GbsGraph, tuple[str, ...], str]]:
    rng = random.Random(seed)
    cases = []
    fixed = [
        GbsGraph(["v"], {"c": Edge("v", "v", 2, 6), "s": Edge("v", "v", 2, 18)}),
        GbsGraph(["v"], {"c": Edge("v", "v", 1, 4), "s": Edge("v", "v", 2, 8)}),
        GbsGraph(["v"], {"c": Edge("v", "v", 1, 6)}),
    ]
    for g in fixed + [controlled_instance(rng) for _ in range(5)]:
        cases.append(("reflexive", g, g, (), "yes"))
    for _ in range(10):
        g = controlled_instance(rng)
        walk = random_walk(g, rng, 100, kinds=SLIDE_SWAP_CONNECT, bound=10**6)
        cases.append(("walk", g, replay(g, walk), (), "yes"))
    cases.append(("perturbed", fixed[0], GbsGraph(["v"], {"c": Edge("v", "v", 2, 6), "s": Edge("v", "v", 4, 12)}), (), "no"))
    for _ in range(5):
        g, out = _perturbed(rng)
        cases.append(("perturbed", g, out, (), "no"))
    for _ in range(4):
        g, out = _induced(rng)
        cases.append(("induction", g, out, ("induction",), "yes"))
    g = fixed[1]
    cases.append(("sign", g, apply(g, EdgeSignChange("s")), ("sign",), "yes"))
    cases.append(("sign", g, apply(g, EdgeSignChange("s")), (), "no"))
    return cases


def controlled_isomorphism() -> Result:
    cases = curated_iso_suite()
    bad, slow, worst = [], [], 0.0
    for i, (kind, g1, g2, allow, expected) in enumerate(cases):
        start = time.perf_counter()
        dec = iso_controlled(g1, g2, allow=allow)
        elapsed = time.perf_counter() - start
        worst = max(worst, elapsed)
        if dec.verdict != expected or (dec.witness is not None and replay(g1, dec.witness) != g2):
            bad.append(f"{i}:{kind}")
        if elapsed >= 1:
            slow.append(f"{i}:{kind}")
    ok = len(cases) == 30 and not bad and not slow
    detail = f"{len(cases) - len(bad)}/{len(cases)} correct, slowest {worst:.3f}s"
    if bad or slow:
        detail += f", wrong {bad}, slow {slow}"
    return Result(ok, detail)


# ---------------------------------------------------------------------------
# 7. encodings
# ---------------------------------------------------------------------------


def _induction_free_loops(rng: random.Random) -> GbsGraph:
    while True:
        g = random_graph(rng, max_vertices=1, max_edges=3, bound=60)
        if g.edges and all(abs(x) != 1 for x in g.labels()):
            return g


def encodings(n: int = 200, seed: int = 7) -> Result:
    rng = random.Random(seed)
    one = one_bad = 0
    while one < n:
        g = random_graph(rng, max_vertices=3, max_edges=4, bound=60)
        script = random_walk(g, rng, 6, kinds=SLIDE_SWAP_CONNECT, bound=10**6)
        if not script:
            continue
        one += 1
        pa = default_assignment(g)
        down = translate_script_down(g, script, pa)
        square = replay(encode_one_vertex(g, pa), down) == encode_one_vertex(replay(g, script), pa)
        one_bad += not (square and translate_script_up(g, down, pa) == script)
    pos = pos_bad = 0
    while pos < n:
        g = _induction_free_loops(rng)
        script = random_walk(g, rng, 5, kinds=SLIDE_SWAP_CONNECT, bound=10**6)
        if not script:
            continue
        pos += 1
        q, r = fresh_primes(2, [g])
        omega = encode_positive(g, q, r)
        shape = all(x > 0 and x != 1 for x in omega.labels())
        down = translate_script_positive(g, script, q, r)
        end = replay(g, script)
        square = replay(omega, down) == encode_positive(end, q, r)
        up = translate_script_positive_up(g, down, q, r)
        pos_bad += not (shape and square and isinstance(up, list) and replay(g, up) == end)
    ok = one_bad == 0 and pos_bad == 0
    return Result(ok, f"one-vertex {one - one_bad}/{one}, positive {pos - pos_bad}/{pos} scripts commute")


# ---------------------------------------------------------------------------
# 8. global invariants
# ---------------------------------------------------------------------------


def _vertex_move(g: GbsGraph, rng: random.Random):
    if rng.random() < 0.5:
        ps = sorted(set_of_primes(g)) or [1]
        k = rng.choice(ps) ** rng.randint(0, 2) * rng.choice((1, -1))
        return Expansion(rng.choice(sorted(g.vertices)), k, "_x", "_xe")
    for e in g.edges.values():
        if e.src != e.dst and abs(e.src_label) == 1:
            return Contraction(e.src)
    return None


def global_invariants(n: int = 1000, seed: int = 8) -> Result:
    rng = random.Random(seed)
    applied = bad = 0
    while applied < n:
        g = random_graph(rng, max_vertices=3, max_edges=5, bound=120)
        for m in random_walk(g, rng, 10, bound=10**6) + [_vertex_move(g, rng)]:
            if m is None or check(g, m) is not None:
                continue
            out = apply(g, m)
            applied += 1
            bad += set_of_primes(out) != set_of_primes(g) or out.rank() != g.rank()
            g = out
    return Result(bad == 0, f"{applied - bad}/{applied} applications keep primes and rank")


# ---------------------------------------------------------------------------
# 9. lattice oracle
# ---------------------------------------------------------------------------


def _random_vector(rng: random.Random, ps: list[int]) -> AffineVector:
    return AffineVector(rng.randint(0, 1), {p: rng.randint(-4, 4) for p in ps})


def lattice_oracle(n: int = 500, seed: int = 9) -> Result:
    rng = random.Random(seed)
    decided = agree = undecided = 0
    for i in range(n):
        ps = [2, 3, 5, 7][: rng.randint(1, 4)]
        gens = [_random_vector(rng, ps) for _ in range(rng.randint(1, 4))]
        if i % 2:
            v = _random_vector(rng, ps)
            want, got = brute_member(gens, v, ps), member(span(gens, ps), v)
        else:
            other = [_random_vector(rng, ps) for _ in range(rng.randint(1, 4))]
            if rng.random() < 0.4:
                # the same subgroup under a unimodular change of generators
                other = gens[1:] + [gens[0] + gens[-1]] if len(gens) > 1 else [-gens[0]]
            want, got = brute_equal(gens, other, ps), equal(span(gens, ps), span(other, ps))
        if want is None:
            undecided += 1
            continue
        decided += 1
        agree += want == got
    ok = decided >= 500 and agree == decided
    return Result(ok, f"{agree}/{decided} agree, {undecided} left undecided by the oracle")


# ---------------------------------------------------------------------------

CRITERIA = {
    1: ("derived-move equivalence", derived_moves),
    2: ("projection decomposition", projection_decomposition),
    3: ("independence of collapsing choices", independence),
    4: ("totally reduced correctness", totally_reduced),
    5: ("conjugacy oracle", conjugacy),
    6: ("controlled isomorphism", controlled_isomorphism),
    7: ("encoding round trips", encodings),
    8: ("global invariant preservation", global_invariants),
    9: ("lattice oracle agreement", lattice_oracle),
}


def report(number: int) -> Result:
    name, fn = CRITERIA[number]
    res = fn()
    print(f"criterion {number} {'PASS' if res.ok else 'FAIL'} {name}: {res.detail}")
    return res


@pytest.mark.parametrize("number", sorted(CRITERIA))
def test_criterion(number, capsys):
    with capsys.disabled():
        res = report(number)
    assert res.ok, res.detail


if __name__ == "__main__":
    results = [report(k) for k in sorted(CRITERIA)]
    sys.exit(0 if all(r.ok for r in results) else 1)
