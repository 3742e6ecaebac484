import random

from hypothesis import assume, given, settings, strategies as st

from cases import shift_case, transformation_case
from graphrepair.condition import TRUE, Not, holds
from graphrepair.graph import TypedGraph
from graphrepair.morphism import compose, identity, inclusion
from graphrepair.oracle import brute_holds, brute_monomorphisms
from graphrepair.randomgen import SMALL_TYPES, add_random_elements, random_condition
from graphrepair.rewrite import Rule, apply_raw, invert_rule, keep_namer
from graphrepair.shift import shift_along, shift_over_rule, transport
from graphrepair.simplify import simplify

seeds = st.integers(0, 2**31 - 1)


def _pair(m):
    return dict(m.nodes), dict(m.edges)


@settings(max_examples=500)
@given(seeds)
def test_shift_preserves_satisfaction(seed):
    e, c, p2 = shift_case(seed)
    shifted = shift_along(e, c)
    host = p2.cod
    assert brute_holds(shifted, _pair(p2), host) == brute_holds(c, _pair(compose(e, p2)), host)


@settings(max_examples=500)
@given(seeds)
def test_left_shift_matches_comatch_satisfaction(seed):
    case = transformation_case(seed)
    assume(case is not None)
    rule, m, t, c = case
    left = shift_over_rule(rule, c)
    assert brute_holds(left, _pair(m), t.original) == brute_holds(c, _pair(t.comatch), t.result)


def _violations(x, body, anchor, host):
    return sum(1 for q in brute_monomorphisms(x.cod, host)
               if all(q[0][x.nodes[k]] == v for k, v in anchor[0].items())
               and all(q[1][x.edges[k]] == v for k, v in anchor[1].items())
               and not brute_holds(body, q, host))


@settings(max_examples=500)
@given(seeds)
def test_left_shift_keeps_the_number_of_violations(seed):
    """A universal condition over the right side has as many violations at the
    comatch as its shifted form has at the match."""
    case = transformation_case(seed)
    assume(case is not None)
    rule, m, t, _ = case
    rng = random.Random(seed + 7)
    q = add_random_elements(rng, rule.rhs, rng.randint(0, 2), rng.randint(0, 2), "u")
    x = inclusion(rule.rhs, q)
    body = random_condition(rng, q, 1, "v")
    after = _violations(x, body, _pair(t.comatch), t.result)
    back = apply_raw(invert_rule(rule), q, x.nodes, x.edges, keep_namer)
    if back is None:
        assert after == 0
        return
    x2 = back.comatch
    body2 = shift_over_rule(Rule("d", back.result, q), body)
    assert _violations(x2, body2, _pair(m), t.original) == after


@settings(max_examples=200)
@given(seeds)
def test_simplification_preserves_satisfaction(seed):
    e, c, p2 = shift_case(seed)
    rng = random.Random(seed + 3)
    hard_graph = add_random_elements(rng, TypedGraph(typegraph=SMALL_TYPES), 1, 1, "z")
    host = p2.cod
    if brute_monomorphisms(hard_graph, host):
        hard = ()
    else:
        hard = (hard_graph,)
    s = simplify(shift_along(e, c), hard)
    assert brute_holds(s, _pair(p2), host) == brute_holds(c, _pair(compose(e, p2)), host)


def test_transport_along_identity_changes_nothing():
    e, c, p2 = shift_case(11)
    shifted = shift_along(e, c)
    moved = transport(shifted, identity(e.cod))
    assert holds(moved, *_pair(p2), p2.cod) == holds(shifted, *_pair(p2), p2.cod)


def test_shift_of_constants():
    e, _, _ = shift_case(1)
    assert shift_along(e, TRUE) == TRUE
    assert isinstance(shift_along(e, Not(TRUE)), Not)
