"""Seeded random instances shared by the property tests."""
from __future__ import annotations

import random

from graphrepair.morphism import Morphism, inclusion
from graphrepair.randomgen import (
    add_random_elements, host_with_match, random_condition, random_constraint, random_graph,
    random_rule,
)
from graphrepair.rewrite import applicable_matches, apply_raw


def rule_case(seed: int):
    """(rule, constraint, host, match) or None when the rule has no applicable match."""
    rng = random.Random(seed)
    rule = random_rule(rng, f"r{seed}")
    constraint = random_constraint(rng, f"c{seed}")
    host = host_with_match(rng, rule)
    matches = applicable_matches(rule, host)
    if not matches:
        return None
    return rule, constraint, host, matches[rng.randrange(len(matches))]


def transformation_case(seed: int):
    """(rule, match, transformation, condition over the right side) or None."""
    rng = random.Random(seed)
    rule = random_rule(rng, f"r{seed}")
    host = host_with_match(rng, rule)
    matches = applicable_matches(rule, host)
    if not matches:
        return None
    m = matches[rng.randrange(len(matches))]
    t = apply_raw(rule, host, m.nodes, m.edges)
    c = random_condition(rng, rule.rhs, 2, "q")
    return rule, m, t, c


def shift_case(seed: int):
    """(e: P -> P', condition over P, p': P' -> G)."""
    rng = random.Random(seed)
    p = random_graph(rng, 3, 2, "p")
    big = add_random_elements(rng, p, rng.randint(0, 2), rng.randint(0, 2), "s")
    e = inclusion(p, big)
    c = random_condition(rng, p, 2, "q")
    host = add_random_elements(rng, big, rng.randint(0, 3), rng.randint(0, 6), "h")
    return e, c, inclusion(big, host)


def premise_case(seed: int):
    """(rule, match, premise graph) for overlap completeness."""
    rng = random.Random(seed)
    rule = random_rule(rng, f"r{seed}")
    host = host_with_match(rng, rule, max_nodes=6, max_edges=8)
    matches = applicable_matches(rule, host)
    premise = random_graph(rng, 3, 3, "p")
    if not matches:
        return None
    return rule, matches[rng.randrange(len(matches))], premise


def as_pair(m: Morphism) -> tuple[dict, dict]:
    return dict(m.nodes), dict(m.edges)


def small_instance_optimality(seeds, restarts=50, budget=5):
    """Per seed: (optimum, best greedy score) on a random 9-feature model."""
    from graphrepair.cra import (
        cra_optimal_assignment, cra_rules, extended_constraints, feature_model_from_json,
        random_feature_model,
    )
    from graphrepair.ranking import Ranker, RepairConfig, greedy_repair

    ranker = Ranker(cra_rules(), extended_constraints())
    out = []
    for seed in seeds:
        g = feature_model_from_json(random_feature_model(9, seed))
        best, _ = cra_optimal_assignment(g)
        cfg = RepairConfig(restarts=restarts, initial_impair_budget=budget, seed=seed)
        res = greedy_repair(g, cra_rules(), extended_constraints(), cfg, ranker=ranker)
        out.append((best, res.final_score))
    return out
