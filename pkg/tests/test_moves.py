import random

import pytest
from conftest import graphs, rngs
from hypothesis import given
from hypothesis import strategies as st

from gbs.core import Edge, GbsGraph, HalfEdge, ParseError, set_of_primes
from gbs.fuzz import (
    random_connection_instance,
    random_induction_instance,
    random_move,
    random_swap_instance,
    random_walk,
)
from gbs.moves import (
    Connection,
    Contraction,
    EdgeSignChange,
    Expansion,
    Induction,
    MoveError,
    ReplayError,
    Slide,
    Swap,
    VertexSignChange,
    apply,
    check,
    expand_connection,
    expand_induction,
    expand_swap,
    format_script,
    invert,
    invert_script,
    parse_script,
    replay,
    replay_report,
    replay_states,
)

F, R = True, False


def H(name, fwd=True):
    return HalfEdge(name, fwd)


def one(edges):
    return GbsGraph(["v"], edges)


# -- check -------------------------------------------------------------------


def test_slide_divisibility():
    g = one({"e": Edge("v", "v", 2, 3), "d": Edge("v", "v", 5, 4)})
    assert check(g, Slide(H("d"), H("e"))) is None
    g = one({"e": Edge("v", "v", 2, 3), "d": Edge("v", "v", 5, 3)})
    assert check(g, Slide(H("d"), H("e"))) is not None


def test_slide_effect():
    # psi(e-bar)=2, psi(e)=3, psi(d)=4: the end of d moves to label 2*3
    g = one({"e": Edge("v", "v", 2, 3), "d": Edge("v", "v", 5, 4)})
    out = apply(g, Slide(H("d"), H("e")))
    assert out.edges["d"] == Edge("v", "v", 5, 6)


def test_slide_moves_the_end_to_the_other_vertex():
    g = GbsGraph(["u", "v"], {"e": Edge("u", "v", 2, 5), "d": Edge("u", "u", 7, 6)})
    out = apply(g, Slide(H("d"), H("e")))
    assert out.edges["d"] == Edge("u", "v", 7, 15)


def test_slide_along_own_edge_rejected():
    g = one({"e": Edge("v", "v", 1, 1)})
    assert check(g, Slide(H("e"), H("e", R))) is not None


def test_swap_known():
    g = one({"a": Edge("v", "v", 2, 4), "b": Edge("v", "v", 4, 24)})
    assert check(g, Swap(H("a"), H("b"))) is None
    out = apply(g, Swap(H("a"), H("b")))
    assert out.edges["a"] == Edge("v", "v", 4, 8)
    assert out.edges["b"] == Edge("v", "v", 2, 12)


def test_swap_same_edge_rejected():
    g = one({"a": Edge("v", "v", 2, 4)})
    assert check(g, Swap(H("a"), H("a"))) is not None


def test_vertex_sign_change_on_fig(two_vertex):
    out = apply(two_vertex, VertexSignChange("u"))
    assert out.edges["e1"] == Edge("v", "u", 4, -12)
    assert out.edges["e2"] == Edge("v", "u", 3, -3)
    assert out.edges["e3"] == Edge("u", "u", -1, -24)


def test_edge_sign_change_twice_is_identity(two_vertex):
    assert replay(two_vertex, [EdgeSignChange("e1")] * 2) == two_vertex


def test_induction_inverse_restores():
    g = one({"h": Edge("v", "v", 1, 4), "x": Edge("v", "v", 3, 6)})
    m = Induction(H("h"), 2, 1)
    out = apply(g, m)
    assert out != g
    assert replay(out, invert(g, m)) == g


def test_induction_by_one_is_identity():
    g = one({"h": Edge("v", "v", 1, 4), "x": Edge("v", "v", 3, 6)})
    assert apply(g, Induction(H("h"), 1, 0)) == g
    assert replay(g, expand_induction(g, Induction(H("h"), 1, 0))) == g


def test_connection_example():
    # e = (2, 6) so ell = 3; d ends at 2*3, ell1 = 3, k = 1, ell2 = 1
    g = GbsGraph(["u", "v"], {"e": Edge("v", "v", 2, 6), "d": Edge("u", "v", 5, 6)})
    m = Connection(H("d"), H("e"), 1)
    assert check(g, m) is None
    out = apply(g, m)
    assert replay(g, expand_connection(g, m)) == out


def test_expansion_and_contraction_are_inverse(two_vertex):
    m = Expansion("u", 6, "w", "x")
    out = apply(two_vertex, m)
    assert len(out.vertices) == 3 and len(out.edges) == 4
    assert replay(out, invert(two_vertex, m)) == two_vertex


def test_replay_error_carries_step(two_vertex):
    script = [EdgeSignChange("e1"), Slide(H("e1"), H("e1"))]
    with pytest.raises(ReplayError) as info:
        replay(two_vertex, script)
    assert info.value.index == 1
    _, report = replay_report(two_vertex, script)
    assert report[0].startswith("step 0 ok") and report[1].startswith("step 1 fail")


def test_apply_rejects_invalid(two_vertex):
    with pytest.raises(MoveError):
        apply(two_vertex, Contraction("nowhere"))


def test_empty_script(two_vertex):
    assert replay(two_vertex, []) == two_vertex


def test_swap_of_identical_loops_is_identity():
    g = one({"a": Edge("v", "v", 2, 4), "b": Edge("v", "v", 2, 4)})
    m = Swap(H("a"), H("b"))
    assert apply(g, m) == g
    assert replay(g, expand_swap(g, m)) == g


def test_swap_worked_instance_through_expansion():
    g = one({"a": Edge("v", "v", 2, 4), "b": Edge("v", "v", 4, 24)})
    m = Swap(H("a"), H("b"))
    script = expand_swap(g, m)
    assert replay(g, script) == apply(g, m)
    assert _peak(g, script) <= 3


# -- script text -------------------------------------------------------------

SCRIPT = """\
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
"""


def test_script_text_round_trip():
    assert format_script(parse_script(SCRIPT)) == SCRIPT


@pytest.mark.parametrize("line", ["slide d along e.fwd", "swap a.fwd", "expand v x AS a b", "hop v"])
def test_script_parse_errors(line):
    with pytest.raises(ParseError):
        parse_script(line + "\n")


# -- properties --------------------------------------------------------------


def _peak(g, script):
    return max((len(s.vertices) for s in replay_states(g, script)), default=len(g.vertices))


def _expansion_or_contraction(g: GbsGraph, rng: random.Random):
    if rng.random() < 0.5:
        ps = sorted(set_of_primes(g)) or [1]
        k = rng.choice(ps) ** rng.randint(0, 2) * rng.choice((1, -1))
        return Expansion(rng.choice(sorted(g.vertices)), k, "_new", "_enew")
    for name, e in sorted(g.edges.items()):
        if e.src != e.dst and abs(e.src_label) == 1:
            return Contraction(e.src)
    return None


@given(graphs, rngs)
def test_counts_rank_and_primes_preserved(g, rng):
    m = random_move(g, rng) if rng.random() < 0.8 else _expansion_or_contraction(g, rng)
    if m is None or check(g, m) is not None:
        return
    out = apply(g, m)
    dv = len(out.vertices) - len(g.vertices)
    assert dv == len(out.edges) - len(g.edges)
    assert dv == {Expansion: 1, Contraction: -1}.get(type(m), 0)
    assert out.rank() == g.rank()
    assert set_of_primes(out) == set_of_primes(g)


@given(graphs, st.integers(min_value=-400, max_value=400).filter(bool))
def test_expansion_only_adds_the_primes_of_k(g, k):
    v = min(g.vertices)
    out = apply(g, Expansion(v, k, "_new", "_enew"))
    assert set_of_primes(out) == set_of_primes(g) | set_of_primes(GbsGraph(["x"], {"e": Edge("x", "x", k, k)}))


@given(graphs, rngs)
def test_invert_undoes(g, rng):
    m = random_move(g, rng) if rng.random() < 0.8 else _expansion_or_contraction(g, rng)
    if m is None or check(g, m) is not None:
        return
    assert replay(apply(g, m), invert(g, m)) == g


@given(graphs, rngs)
def test_invert_script_undoes_walks(g, rng):
    script = random_walk(g, rng, 6, bound=10**5)
    assert replay(replay(g, script), invert_script(g, script)) == g


@given(rngs)
def test_induction_expansion_property(rng):
    g, m = random_induction_instance(rng)
    script = expand_induction(g, m)
    assert replay(g, script) == apply(g, m)
    assert _peak(g, script) <= len(g.vertices) + 1


@given(rngs)
def test_swap_expansion_property(rng):
    g, m = random_swap_instance(rng)
    script = expand_swap(g, m)
    assert replay(g, script) == apply(g, m)
    assert _peak(g, script) <= len(g.vertices) + 2


@given(rngs)
def test_connection_expansion_property(rng):
    g, m = random_connection_instance(rng)
    script = expand_connection(g, m)
    assert replay(g, script) == apply(g, m)
    assert _peak(g, script) <= len(g.vertices) + 2


@given(graphs, st.data())
def test_script_text_round_trip_on_walks(g, data):
    rng = data.draw(rngs)
    script = random_walk(g, rng, 5)
    assert parse_script(format_script(script)) == script
