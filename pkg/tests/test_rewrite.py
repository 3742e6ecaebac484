import random

import pytest
from hypothesis import given, settings, strategies as st

from graphrepair.cra import cart_session_model, move_method_rule
from graphrepair.graph import TypedGraph
from graphrepair.matching import graphs_isomorphic
from graphrepair.morphism import Morphism
from graphrepair.randomgen import SMALL_TYPES, host_with_match, random_rule
from graphrepair.rewrite import (
    Rule, RuleError, applicable_matches, apply_raw, apply_rule, check_rule, dangling_edges,
    invert_rule, parallel_independent, rule_from_json, rule_to_json, rules_from_json, track_total,
)

seeds = st.integers(0, 2**31 - 1)


def _transformation(seed):
    rng = random.Random(seed)
    rule = random_rule(rng)
    host = host_with_match(rng, rule)
    ms = applicable_matches(rule, host)
    if not ms:
        return None
    m = ms[rng.randrange(len(ms))]
    return rng, rule, host, ms, apply_rule(rule, m, 0)


@settings(max_examples=300)
@given(seeds)
def test_inverse_application_restores_the_graph(seed):
    case = _transformation(seed)
    if case is None:
        return
    _, rule, host, _, t = case
    back = apply_raw(invert_rule(rule), t.result, t.comatch.nodes, t.comatch.edges)
    assert back is not None
    assert graphs_isomorphic(back.result, host)


@settings(max_examples=300)
@given(seeds)
def test_element_counts_and_track(seed):
    case = _transformation(seed)
    if case is None:
        return
    _, rule, host, _, t = case
    h = t.result
    assert len(h.nodes) == len(host.nodes) - len(rule.deleted_nodes) + len(rule.created_nodes)
    assert len(h.edges) == len(host.edges) - len(rule.deleted_edges) + len(rule.created_edges)
    tr = t.track
    assert tr.is_injective()
    assert not (tr.image_nodes() & t.created_nodes) and not (tr.image_edges() & t.created_edges)
    assert t.comatch.is_injective()


@settings(max_examples=200)
@given(seeds)
def test_parallel_independence_is_symmetric(seed):
    case = _transformation(seed)
    if case is None:
        return
    rng, rule, host, ms, t1 = case
    t2 = apply_rule(rule, ms[rng.randrange(len(ms))], 1)
    assert parallel_independent(t1, t2) == parallel_independent(t2, t1)


def test_move_method_on_running_example():
    g = cart_session_model()
    r = move_method_rule()
    m = Morphism(r.lhs, g, {"c1": "Cart", "c2": "Session", "m": "checkout"}, {"e1": "Cart->checkout"})
    t = apply_rule(r, m, 3)
    assert "Cart->checkout" not in t.result.edges
    new = t.comatch.edges["e2"]
    assert new == "moveMethod#step3:e2"
    assert t.result.edges[new] == ("contains-method", "Session", "checkout")
    assert track_total(t, Morphism(r.lhs, g, m.nodes, m.edges)) is None


def test_dangling_condition_blocks_node_deletion():
    lhs = TypedGraph({"a": "A"}, {}, SMALL_TYPES)
    r = Rule("del", lhs, TypedGraph({}, {}, SMALL_TYPES))
    host = TypedGraph({"x": "A", "y": "B"}, {"e": ("y", "x", "y")}, SMALL_TYPES)
    m = Morphism(lhs, host, {"a": "x"}, {})
    assert dangling_edges(r, host, m.nodes, m.edges) == ["e"]
    assert apply_raw(r, host, m.nodes, m.edges) is None
    with pytest.raises(RuleError):
        apply_rule(r, m)


def test_rule_validation():
    lhs = TypedGraph({"a": "A", "b": "B"}, {"e": ("y", "a", "b")}, SMALL_TYPES)
    bad = Rule("bad", lhs, TypedGraph({"a": "A"}, {"e": ("y", "a", "b")}, SMALL_TYPES))
    with pytest.raises(RuleError):
        check_rule(bad)
    retyped = Rule("retype", lhs, TypedGraph({"a": "B"}, {}, SMALL_TYPES))
    with pytest.raises(RuleError):
        check_rule(retyped)


def test_rule_json_round_trip_and_inverse_name():
    r = move_method_rule()
    back = rule_from_json(rule_to_json(r), r.lhs.typegraph)
    assert back == r
    assert invert_rule(invert_rule(r)) == r
    assert invert_rule(r).name == "moveMethod^-1"
    with pytest.raises(RuleError):
        rules_from_json([rule_to_json(r), rule_to_json(r)], r.lhs.typegraph)
    with pytest.raises(RuleError):
        rule_from_json({"name": "x"})
