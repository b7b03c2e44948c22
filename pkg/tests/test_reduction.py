
import pytest
from conftest import rngs
from hypothesis import assume, given
from instances import redundant_instance

from gbs.core import (
    ZERO,
    AffinePoint,
    AffineVector,
    Edge,
    GbsGraph,
    HalfEdge,
    set_of_primes,
)
from gbs.fuzz import random_graph, random_move
from gbs.lattice import equal, span
from gbs.moves import apply, replay
from gbs.reduction import (
    CollapsingData,
    conjugate,
    is_redundant,
    is_totally_reduced,
    loop_support_closure,
    origin_conjugate_support,
    project,
    project_as_moves,
    totally_reduce,
    validate_affine_path,
    w_sequence,
)


def H(name, fwd=True):
    return HalfEdge(name, fwd)


def P(v, n=1, **exps):
    return AffinePoint(v, AffineVector(0 if n > 0 else 1, {int(k[1:]): e for k, e in exps.items()}))


# -- loop support closure and redundancy -------------------------------------


def test_closure_chain():
    g = GbsGraph(["v"], {"e1": Edge("v", "v", 1, 2), "e2": Edge("v", "v", 2, 6)})
    s, order = loop_support_closure(g, "v")
    assert s == {2, 3}
    assert order == [H("e1"), H("e2")]


@pytest.mark.parametrize("labels", [(2, 4), (1, 1)])
def test_closure_empty(labels):
    g = GbsGraph(["v"], {"e": Edge("v", "v", *labels)})
    assert loop_support_closure(g, "v")[0] == frozenset()


def test_isolated_loop_not_redundant():
    g = GbsGraph(["u", "v"], {"e": Edge("v", "v", 2, 4), "x": Edge("v", "u", 2, 3)})
    assert is_redundant(g, "v") is None


def test_unit_exit_is_redundant():
    g = GbsGraph(["u", "v"], {"e": Edge("v", "v", 2, 4), "x": Edge("v", "u", -1, 3)})
    data = is_redundant(g, "v")
    assert data == CollapsingData("v", (), H("x"))


def test_two_vertex_redundancy(two_vertex):
    assert is_redundant(two_vertex, "v") is None
    data = is_redundant(two_vertex, "u")
    assert data is not None
    assert data.loops == (H("e3"),) and data.exit == H("e1", False)


def test_w_sequence_one_loop():
    g = GbsGraph(["u", "v"], {"e1": Edge("v", "v", 1, 2), "e": Edge("v", "u", 2, 3)})
    ws, w = w_sequence(g, CollapsingData("v", (H("e1"),), H("e")), (2,))
    assert ws == [AffineVector(0, {2: 1})]
    assert w == AffineVector(0, {2: 1})


def test_w_sequence_two_loops():
    g = GbsGraph(
        ["u", "v"],
        {"e1": Edge("v", "v", 1, 2), "e2": Edge("v", "v", 2, 3), "e": Edge("v", "u", 2, 3)},
    )
    ws, _ = w_sequence(g, CollapsingData("v", (H("e1"), H("e2")), H("e")), (2, 2))
    assert ws[1] == AffineVector(0, {2: 1, 3: 1})


def test_w_sequence_no_loops():
    g = GbsGraph(["u", "v"], {"e": Edge("v", "u", 1, 3)})
    ws, w = w_sequence(g, CollapsingData("v", (), H("e")), ())
    assert ws == [] and w == ZERO


def test_w_sequence_rejects_small_constants():
    g = GbsGraph(["u", "v"], {"e1": Edge("v", "v", 1, 4), "e": Edge("v", "u", 2, 3)})
    with pytest.raises(ValueError):
        w_sequence(g, CollapsingData("v", (H("e1"),), H("e")), (2,))


# -- totally reduced ---------------------------------------------------------


def test_bs23_is_totally_reduced():
    g = GbsGraph(["v"], {"e": Edge("v", "v", 2, 3)})
    assert is_totally_reduced(g) == (True, "totally reduced")


def test_uncontrolled_loop_is_reported():
    g = GbsGraph(["v"], {"e": Edge("v", "v", 1, 2), "d": Edge("v", "v", 1, 3)})
    ok, reason = is_totally_reduced(g)
    assert not ok and "controls" in reason


def test_two_vertex_reduces_to_one_vertex(two_vertex):
    out, script = totally_reduce(two_vertex)
    assert len(out.vertices) == 1
    assert is_totally_reduced(out)[0]
    assert replay(two_vertex, script) == out
    assert out.rank() == two_vertex.rank()


def test_reduced_graph_has_empty_script():
    g = GbsGraph(["v"], {"e": Edge("v", "v", 2, 3)})
    assert totally_reduce(g) == (g, [])


# -- conjugacy ---------------------------------------------------------------


def test_conjugate_same_point():
    g = GbsGraph(["v"], {"e": Edge("v", "v", 2, 4)})
    v = conjugate(g, P("v"), P("v"))
    assert v.status == "yes" and v.path == []


def test_conjugate_bs12():
    g = GbsGraph(["v"], {"e": Edge("v", "v", 1, 2)})
    v = conjugate(g, P("v"), P("v", p2=1))
    assert v.status == "yes"
    assert v.path == [(H("e"), ZERO)]
    assert validate_affine_path(g, P("v"), P("v", p2=1), v.path)


def test_conjugate_definitive_no():
    g = GbsGraph(["v"], {"e": Edge("v", "v", 2, 4)})
    v = conjugate(g, P("v"), P("v", p2=1))
    assert v.status == "no" and not v.pruned and v.explored == 1


def test_conjugate_budget_gives_unknown():
    g = GbsGraph(["v"], {"e": Edge("v", "v", 1, 2), "d": Edge("v", "v", 1, 3)})
    v = conjugate(g, P("v"), P("v", p5=1), budget=5)
    assert v.status == "unknown"


# -- properties --------------------------------------------------------------


@given(rngs)
def test_project_matches_its_move_script(rng):
    g, v = redundant_instance(rng)
    data = is_redundant(g, v)
    assert data is not None
    out = project(g, data)
    assert replay(g, project_as_moves(g, data)) == out
    assert len(out.vertices) == len(g.vertices) - 1
    assert len(out.edges) == len(g.edges) - 1
    assert out.rank() == g.rank()
    assert set_of_primes(out) <= set_of_primes(g)


@given(rngs)
def test_w_sequence_spans_the_loop_differences(rng):
    g, v = redundant_instance(rng)
    data = is_redundant(g, v)
    k = max((abs(e) for h in g.incoming(v) for e in g.point(h).exps.values()), default=0)
    consts = tuple(k + 1 + rng.randint(0, 2) for _ in data.loops)
    ws, w = w_sequence(g, data, consts)
    assert all(x.is_nonneg() for x in ws) and w.is_nonneg()
    if ws:
        diffs = [g.point(h) - g.point(h.bar) for h in data.loops]
        assert equal(span(ws), span(diffs))


@given(rngs)
def test_totally_reduce_is_idempotent(rng):
    g = random_graph(rng, max_vertices=3, max_edges=4, bound=60)
    out, script = totally_reduce(g)
    assert is_totally_reduced(out)[0]
    assert totally_reduce(out) == (out, [])
    assert replay(g, script) == out


@given(rngs)
def test_conjugate_paths_validate(rng):
    g = random_graph(rng, max_vertices=2, max_edges=3, bound=60)
    v = rng.choice(sorted(g.vertices))
    target = AffinePoint(rng.choice(sorted(g.vertices)), AffineVector(0, {2: rng.randint(0, 2), 3: rng.randint(0, 1)}))
    verdict = conjugate(g, AffinePoint(v, ZERO), target, budget=20000)
    if verdict.status == "yes":
        assert validate_affine_path(g, AffinePoint(v, ZERO), target, verdict.path)


@given(rngs)
def test_conjugacy_survives_slides(rng):
    g = random_graph(rng, max_vertices=2, max_edges=3, bound=60)
    v = rng.choice(sorted(g.vertices))
    p = AffinePoint(v, ZERO)
    q = AffinePoint(v, AffineVector(0, {2: 1}))
    before = conjugate(g, p, q, budget=5000)
    m = random_move(g, rng, kinds=("slide",))
    assume(before.status == "yes" and m is not None)
    assert conjugate(apply(g, m), p, q, budget=50000).status != "no"


@given(rngs)
def test_closure_matches_bounded_search_when_not_redundant(rng):
    g = random_graph(rng, max_vertices=2, max_edges=3, bound=60)
    for v in sorted(g.vertices):
        if is_redundant(g, v) is not None:
            continue
        found, complete = origin_conjugate_support(g, v)
        s, _ = loop_support_closure(g, v)
        assert found <= s
        if complete:
            assert found == s
