import json

import pytest

from graphrepair.cra import CRA_TYPES, cart_session_model
from graphrepair.graph import (
    EMPTY, GraphError, TypeGraph, TypedGraph, check_graph, fresh_id, graph_from_json, graph_to_json,
    validate_graph,
)

TG = TypeGraph(["A", "B"], {"x": ("A", "B")})


def test_json_round_trip_keeps_graph_and_types():
    g = cart_session_model()
    data = json.loads(json.dumps(graph_to_json(g)))
    back = graph_from_json(data)
    assert back == g
    assert back.typegraph == CRA_TYPES


def test_typegraph_round_trip():
    assert TypeGraph.from_json(TG.to_json()) == TG


def test_indexes_are_sorted_by_id():
    g = TypedGraph({"a": "A", "b": "B", "c": "B"},
                   {"e2": ("x", "a", "c"), "e1": ("x", "a", "b")}, TG)
    assert g.out_index["a"]["x"] == ("e1", "e2")
    assert g.in_index["c"]["x"] == ("e2",)
    assert g.nodes_by_type["B"] == ("b", "c")
    assert g.incident_edges("a") == ["e1", "e2"]


def test_parallel_edges_are_kept():
    g = TypedGraph({"a": "A", "b": "B"}, {"e1": ("x", "a", "b"), "e2": ("x", "a", "b")}, TG)
    assert not validate_graph(g)
    assert len(g.out_index["a"]["x"]) == 2


@pytest.mark.parametrize("nodes,edges,msg", [
    ({"a": "C"}, {}, "type"),
    ({"a": "A"}, {"e": ("x", "a", "zz")}, "zz"),
    ({"a": "A", "b": "A"}, {"e": ("x", "a", "b")}, "x"),
    ({"a": "A", "b": "B"}, {"e": ("y", "a", "b")}, "y"),
])
def test_validation_reports_problems(nodes, edges, msg):
    problems = validate_graph(TypedGraph(nodes, edges, TG))
    assert problems and any(msg in p for p in problems)
    with pytest.raises(GraphError):
        check_graph(TypedGraph(nodes, edges, TG))


def test_from_json_rejects_duplicates_and_garbage():
    with pytest.raises(GraphError):
        graph_from_json({"nodes": [{"id": "a", "type": "A"}, {"id": "a", "type": "A"}], "edges": []}, TG)
    with pytest.raises(GraphError):
        graph_from_json([1, 2, 3])
    with pytest.raises(GraphError):
        graph_from_json({"nodes": [{"id": "a"}]}, TG)


def test_fresh_id_primes_until_free():
    assert fresh_id("n", {"m"}) == "n"
    assert fresh_id("n", {"n", "n'"}) == "n''"


def test_remove_and_extend():
    g = TypedGraph({"a": "A", "b": "B"}, {"e": ("x", "a", "b")}, TG)
    assert g.remove(edges=["e"]).edges == {}
    assert g.extend({"c": "B"}, {"f": ("x", "a", "c")}).size() == 5
    with pytest.raises(GraphError):
        g.extend({"a": "A"})


def test_equality_ignores_typegraph_and_empty_graph():
    g = TypedGraph({"a": "A"}, {}, TG)
    assert g == TypedGraph({"a": "A"})
    assert hash(g) == hash(TypedGraph({"a": "A"}))
    assert EMPTY.is_empty()
