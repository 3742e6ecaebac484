import random

import pytest
from hypothesis import assume, given, settings, strategies as st

from cases import rule_case
from graphrepair.condition import count_violations
from graphrepair.cra import (
    base_constraints, cart_session_model, cra_rules, generate_synthetic, move_method_rule, w1, w2,
)
from graphrepair.morphism import Morphism
from graphrepair.oracle import actual_delta, brute_direct_flags, verify_delta_theorem
from graphrepair.ranking import (
    Ranker, RepairConfig, TheoremViolation, classify_transformation, greedy_repair, predicted_counts,
    predicted_delta, rank_all,
)
from graphrepair.repair import ACBundle, derive_bundle
from graphrepair.rewrite import apply_raw

seeds = st.integers(0, 2**31 - 1)

TABLE = {
    ("moveMethod", "checkout", "Cart", "Session"): {"w1": (4, 0), "w2": (1, 0)},
    ("moveAttribute", "username", "Session", "Cart"): {"w1": (2, 0), "w2": (2, 1)},
    ("moveMethod", "print", "Cart", "Session"): {"w1": (2, 0), "w2": (1, 1)},
    ("moveMethod", "addItem", "Cart", "Session"): {"w1": (2, 2), "w2": (0, 1)},
}


def _row_key(r):
    n = r.match["nodes"]
    return r.rule, n.get("m", n.get("a")), n["c1"], n["c2"]


def test_running_example_table():
    ranked = rank_all(cart_session_model(), cra_rules(), base_constraints())
    by_key = {_row_key(r): r for r in ranked}
    for key, want in TABLE.items():
        got = {s.constraint: (s.repair, s.impair) for s in by_key[key].scores}
        assert got == want, key
    top = ranked[0]
    assert _row_key(top) == ("moveMethod", "checkout", "Cart", "Session")
    assert top.gain == 5 and top.delta == -5


def test_running_example_predictions_are_exact():
    g = cart_session_model()
    for r in rank_all(g, cra_rules(), base_constraints()):
        rule = next(x for x in cra_rules() if x.name == r.rule)
        t = apply_raw(rule, g, r.match["nodes"], r.match["edges"])
        for s in r.scores:
            c = w1() if s.constraint == "w1" else w2()
            assert s.delta == count_violations(c, t.result) - count_violations(c, g)


def _predict(host, rule, nmap, emap, constraint):
    rep, imp = predicted_counts(derive_bundle(rule, constraint), host, nmap, emap)
    return imp - rep


@settings(max_examples=1000)
@given(seeds)
def test_predicted_change_equals_recount(seed):
    case = rule_case(seed)
    assume(case is not None)
    rule, c, host, m = case
    ok, predicted, actual = verify_delta_theorem(host, rule, m.nodes, m.edges, c, _predict)
    assert ok, (predicted, actual)


@settings(max_examples=500)
@given(seeds)
def test_direct_flags_agree_with_definitions(seed):
    case = rule_case(seed)
    assume(case is not None)
    rule, c, host, m = case
    b = derive_bundle(rule, c)
    flags = classify_transformation(rule, m, c, b)
    brute = brute_direct_flags(host, rule, m.nodes, m.edges, c)
    assert flags["directSustaining"] == brute["directSustaining"]
    assert flags["directImproving"] == brute["directImproving"]
    delta = actual_delta(host, rule, m.nodes, m.edges, c)
    assert flags["sustaining"] == (delta <= 0) and flags["improving"] == (delta < 0)


@settings(max_examples=200)
@given(seeds)
def test_weighted_prediction_equals_weighted_recount(seed):
    rng = random.Random(seed)
    cases = [rule_case(seed * 3 + k) for k in range(3)]
    case = cases[0]
    assume(case is not None)
    rule, c0, host, m = case
    cs = [c0] + [x[1] for x in cases[1:] if x is not None]
    for i, c in enumerate(cs):
        object.__setattr__(c, "name", f"k{i}")
    weights = {c.name: rng.choice([0, 0.5, 1, 2, 3.25]) for c in cs}
    pred = sum(weights[c.name] * predicted_delta(rule, m, c, derive_bundle(rule, c)) for c in cs)
    act = sum(weights[c.name] * actual_delta(host, rule, m.nodes, m.edges, c) for c in cs)
    assert pred == pytest.approx(act, abs=1e-9)


def test_scaling_weights_keeps_the_best_match():
    g = generate_synthetic(4, 2)
    base = rank_all(g, cra_rules(), base_constraints(), weights={"w1": 1, "w2": 2})[0]
    scaled = rank_all(g, cra_rules(), base_constraints(), weights={"w1": 3.5, "w2": 7})[0]
    assert (base.rule, base.match) == (scaled.rule, scaled.match)


def test_bad_weights_are_rejected():
    from graphrepair.condition import ConditionError
    with pytest.raises(ConditionError):
        Ranker(cra_rules(), base_constraints(), weights={"nope": 1})
    with pytest.raises(ConditionError):
        Ranker(cra_rules(), base_constraints(), weights={"w1": -1})


def test_cached_scores_survive_steps():
    g = generate_synthetic(4, 1)
    ranker = Ranker(cra_rules(), base_constraints())
    res = greedy_repair(g, cra_rules(), base_constraints(), RepairConfig(max_iterations=6), ranker=ranker)
    fresh = Ranker(cra_rules(), base_constraints()).rank(res.graph)
    assert [r.to_json() for r in ranker.rank(res.graph)] == [r.to_json() for r in fresh]


@pytest.mark.parametrize("seed", [0, 1, 2])
def test_greedy_is_monotone_and_trace_adds_up(seed):
    g = generate_synthetic(6, seed)
    res = greedy_repair(g, cra_rules(), base_constraints())
    assert res.reason == "no improving move"
    scores = [res.initial_score] + [sum(s.totals.values()) for s in res.steps]
    assert all(b < a for a, b in zip(scores, scores[1:]))
    for name in res.initial:
        assert res.final[name] == res.initial[name] + sum(s.actual[name] for s in res.steps)
    assert Ranker(cra_rules(), base_constraints()).rank(res.graph)[0].delta >= 0


def test_budget_restarts_are_reproducible():
    g = generate_synthetic(4, 3)
    cfg = RepairConfig(restarts=3, initial_impair_budget=3, seed=9)
    a = greedy_repair(g, cra_rules(), base_constraints(), cfg).to_json()
    b = greedy_repair(g, cra_rules(), base_constraints(), cfg).to_json()
    assert a == b


def test_consistent_input_gives_empty_trace():
    g = cart_session_model()
    res = greedy_repair(g, cra_rules(), base_constraints())
    again = greedy_repair(res.graph, cra_rules(), base_constraints())
    assert again.steps == [] and again.final == again.initial


def test_wrong_conditions_are_caught():
    rule, c = move_method_rule(), w1()
    good = derive_bundle(rule, c)
    broken = ACBundle(rule, c, good.impairment, good.repair, [], good.rule_hash, good.constraint_hash)
    ranker = Ranker([rule], [c], bundles={(rule.name, c.name): broken})
    with pytest.raises(TheoremViolation):
        greedy_repair(cart_session_model(), [rule], [c], RepairConfig(), ranker=ranker)


def test_predicted_delta_checks_the_match_domain():
    rule = move_method_rule()
    g = cart_session_model()
    bad = Morphism(rule.rhs, g, {"c1": "Cart", "c2": "Session", "m": "print"}, {"e2": "Cart->print"})
    from graphrepair.condition import ConditionError
    with pytest.raises(ConditionError):
        predicted_delta(rule, bad, w1(), derive_bundle(rule, w1()))
