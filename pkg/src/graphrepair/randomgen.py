"""Seeded generators of small random graphs, rules and constraints."""
from __future__ import annotations

import random

from .condition import (
    FALSE, TRUE, Condition, Constraint, Exists, ForAll, Not, Or, normalize_universal,
)
from .graph import EMPTY, TypeGraph, TypedGraph
from .morphism import Morphism, inclusion
from .rewrite import Rule

SMALL_TYPES = TypeGraph(["A", "B"], {"x": ("A", "A"), "y": ("A", "B"), "z": ("B", "A")})


def _edge_types_between(tg: TypeGraph, s: str, t: str) -> list[str]:
    return sorted(e for e, (a, b) in tg.edge_types.items() if a == s and b == t)


def add_random_elements(rng: random.Random, g: TypedGraph, n_nodes: int, n_edges: int,
                        prefix: str, tg: TypeGraph = SMALL_TYPES) -> TypedGraph:
    """Extend ``g`` by up to ``n_nodes`` nodes and ``n_edges`` edges with fresh ids."""
    nodes = dict(g.nodes)
    edges = dict(g.edges)
    types = sorted(tg.node_types)
    for i in range(n_nodes):
        nodes[f"{prefix}n{i}"] = rng.choice(types)
    ids = sorted(nodes)
    k = 0
    for _ in range(n_edges * 3):
        if k >= n_edges or not ids:
            break
        s, t = rng.choice(ids), rng.choice(ids)
        ets = _edge_types_between(tg, nodes[s], nodes[t])
        if not ets:
            continue
        edges[f"{prefix}e{k}"] = (rng.choice(ets), s, t)
        k += 1
    return TypedGraph(nodes, edges, tg)


def random_graph(rng: random.Random, max_nodes: int = 6, max_edges: int = 8,
                 prefix: str = "g", tg: TypeGraph = SMALL_TYPES) -> TypedGraph:
    return add_random_elements(rng, TypedGraph(typegraph=tg), rng.randint(1, max_nodes),
                               rng.randint(0, max_edges), prefix, tg)


def random_rule(rng: random.Random, name: str = "r", tg: TypeGraph = SMALL_TYPES) -> Rule:
    """A rule with at most 3 left-hand nodes that deletes and/or creates a few elements."""
    lhs = random_graph(rng, 3, 3, "l", tg)
    keep_n = {n for n in lhs.nodes if rng.random() < 0.75}
    keep_e = {e for e, (_, s, t) in lhs.edges.items() if s in keep_n and t in keep_n and rng.random() < 0.6}
    k = TypedGraph({n: lhs.nodes[n] for n in keep_n}, {e: lhs.edges[e] for e in keep_e}, tg)
    rhs = add_random_elements(rng, k, rng.randint(0, 1), rng.randint(0, 2), "r", tg)
    if rhs == lhs:
        rhs = add_random_elements(rng, k, 0, 1, "r", tg)
    return Rule(name, lhs, rhs)


def _extension(rng: random.Random, base: TypedGraph, prefix: str, tg: TypeGraph) -> Morphism:
    big = add_random_elements(rng, base, rng.randint(0, 1), rng.randint(1, 2), prefix, tg)
    if big == base:
        big = add_random_elements(rng, base, 1, 0, prefix, tg)
    return inclusion(base, big)


def random_condition(rng: random.Random, ctx: TypedGraph, depth: int, prefix: str = "q",
                     tg: TypeGraph = SMALL_TYPES) -> Condition:
    roll = rng.random()
    if depth <= 0 or roll < 0.15:
        return rng.choice([TRUE, FALSE]) if roll < 0.05 else Exists(_extension(rng, ctx, prefix, tg))
    if roll < 0.55:
        e = _extension(rng, ctx, prefix, tg)
        return Exists(e, random_condition(rng, e.cod, depth - 1, prefix + "q", tg))
    if roll < 0.7:
        return Not(random_condition(rng, ctx, depth - 1, prefix, tg))
    if roll < 0.85:
        return Or((random_condition(rng, ctx, depth - 1, prefix + "a", tg),
                   random_condition(rng, ctx, depth - 1, prefix + "b", tg)))
    e = _extension(rng, ctx, prefix, tg)
    return ForAll(e, random_condition(rng, e.cod, depth - 1, prefix + "q", tg))


def random_constraint(rng: random.Random, name: str = "c", tg: TypeGraph = SMALL_TYPES) -> Constraint:
    """A universal constraint with a premise of at most 3 nodes and a nested conclusion."""
    p = random_graph(rng, 3, 3, "p", tg)
    if rng.random() < 0.2:
        body = FALSE
    else:
        body = random_condition(rng, p, 2, "q", tg)
    return normalize_universal(ForAll(inclusion(EMPTY, p), body), name)


def host_with_match(rng: random.Random, rule: Rule, max_nodes: int = 8, max_edges: int = 10,
                    tg: TypeGraph = SMALL_TYPES) -> TypedGraph:
    """A random host that contains a copy of the rule's left side (same ids)."""
    base = rule.lhs.with_typegraph(tg)
    extra = max(0, max_nodes - len(base.nodes))
    return add_random_elements(rng, base, rng.randint(0, extra), rng.randint(0, max_edges), "h", tg)
