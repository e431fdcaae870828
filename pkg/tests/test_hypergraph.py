import random

import pytest

from lexjoin.errors import InputError
from lexjoin.hypergraph import (
    Hypergraph,
    component_from,
    disruptive_trios,
    gyo_reduce,
    induced,
    neighbors,
)

# The five-variable cycle-of-attention fixture used throughout the suite:
# a path graph x1-x5-x3-x4-x2 written as four binary scopes.
FIVE = Hypergraph.build(
    [["x1", "x5"], ["x2", "x4"], ["x3", "x4"], ["x3", "x5"]],
    vertices=("x1", "x2", "x3", "x4", "x5"),
)


def test_build_normalizes():
    h = Hypergraph.build([["a", "b"], ["b", "a"], [], ["a", "b"]])
    assert h.edges == (frozenset({"a", "b"}),)
    assert h.vertices == ("a", "b")


def test_build_rejects_unknown_vertex():
    with pytest.raises(InputError):
        Hypergraph.build([["a", "z"]], vertices=("a",))


def test_gyo_single_edge_acyclic():
    report = gyo_reduce(Hypergraph.build([["a", "b"]]))
    assert report.acyclic
    assert sorted(report.elimination_order) == ["a", "b"]


def test_gyo_triangle_cyclic_with_full_witness():
    h = Hypergraph.build([["a", "b"], ["b", "c"], ["a", "c"]])
    report = gyo_reduce(h)
    assert not report.acyclic
    assert report.witness is not None
    assert sorted(report.witness.vertices) == ["a", "b", "c"]
    assert len(report.witness.edges) == 3


def test_gyo_on_augmented_five_variable_graph():
    # The original four scopes plus the five order-induced bags stay acyclic.
    h = Hypergraph.build(
        [
            ["x1", "x5"],
            ["x2", "x4"],
            ["x3", "x4"],
            ["x3", "x5"],
            ["x1", "x3", "x5"],
            ["x2", "x3", "x4"],
            ["x1", "x2", "x3"],
            ["x1", "x2"],
            ["x1"],
        ],
        vertices=FIVE.vertices,
    )
    assert gyo_reduce(h).acyclic


def test_gyo_isolated_vertex_is_eliminable():
    h = Hypergraph.build([["a"]], vertices=("a", "b"))
    assert gyo_reduce(h).acyclic


def test_gyo_order_insensitive():
    rng = random.Random(42)
    for _ in range(60):
        nv = rng.randint(1, 6)
        vertices = [f"v{i}" for i in range(nv)]
        edges = [rng.sample(vertices, rng.randint(1, nv)) for _ in range(rng.randint(1, 6))]
        base = gyo_reduce(Hypergraph.build(edges, vertices=vertices)).acyclic
        for _ in range(3):
            shuffled_edges = edges[:]
            rng.shuffle(shuffled_edges)
            shuffled_vertices = vertices[:]
            rng.shuffle(shuffled_vertices)
            again = gyo_reduce(
                Hypergraph.build(shuffled_edges, vertices=shuffled_vertices)
            ).acyclic
            assert again == base


def test_induced_five_variable_prefix():
    h = induced(FIVE, {"x1", "x2", "x3"})
    assert set(h.edges) == {frozenset({"x1"}), frozenset({"x2"}), frozenset({"x3"})}


def test_induced_identity_and_empty():
    assert set(induced(FIVE, FIVE.vertices).edges) == set(FIVE.edges)
    empty = induced(FIVE, set())
    assert empty.vertices == () and empty.edges == ()


def test_induced_unknown_vertex():
    with pytest.raises(InputError):
        induced(FIVE, {"nope"})


def test_induced_edges_come_from_generators():
    rng = random.Random(5)
    for _ in range(40):
        nv = rng.randint(1, 6)
        vertices = [f"v{i}" for i in range(nv)]
        edges = [rng.sample(vertices, rng.randint(1, nv)) for _ in range(rng.randint(1, 6))]
        h = Hypergraph.build(edges, vertices=vertices)
        s = set(rng.sample(vertices, rng.randint(0, nv)))
        for e in induced(h, s).edges:
            assert any(e == (orig & s) for orig in h.edges)


def test_neighbors_examples():
    assert neighbors(FIVE, {"x3", "x4", "x5"}) == {"x1", "x2"}
    assert neighbors(FIVE, {"x5"}) == {"x1", "x3"}
    assert neighbors(FIVE, set()) == frozenset()


def test_component_examples():
    assert component_from(FIVE, "x3", {"x3", "x4", "x5"}) == {"x3", "x4", "x5"}
    assert component_from(FIVE, "x5", {"x5"}) == {"x5"}
    assert component_from(FIVE, "x2", {"x2", "x3", "x4", "x5"}) == {"x2", "x3", "x4", "x5"}


def test_component_requires_membership():
    with pytest.raises(InputError):
        component_from(FIVE, "x1", {"x2"})


def test_components_partition():
    rng = random.Random(9)
    for _ in range(40):
        h = Hypergraph.build(
            [rng.sample([f"v{i}" for i in range(6)], rng.randint(1, 4)) for _ in range(5)],
            vertices=[f"v{i}" for i in range(6)],
        )
        allowed = set(rng.sample(h.vertices, rng.randint(1, 6)))
        comps = {}
        for v in allowed:
            comps[v] = component_from(h, v, allowed)
        for u in allowed:
            for v in allowed:
                c, d = comps[u], comps[v]
                assert c == d or not (c & d)


def test_disruptive_trios_on_hypergraph():
    h = Hypergraph.build([["x1", "x3"], ["x2", "x3"]], vertices=("x1", "x2", "x3"))
    assert disruptive_trios(h, ("x1", "x2", "x3")) == [("x1", "x2", "x3")]
    # With the shared variable first, nothing comes after both others.
    assert disruptive_trios(h, ("x3", "x1", "x2")) == []
