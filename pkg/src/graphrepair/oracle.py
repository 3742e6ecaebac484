"""Brute-force reference semantics, kept independent of the engine.

Nothing here uses the backtracking matcher, the condition evaluator, the
shifting code or the derived application conditions.  Morphisms are found by
trying every typed node assignment and every edge assignment, conditions are
evaluated by direct recursion over the tree (sugar included), and violation
changes are counted by applying the rule and recounting.
"""
from __future__ import annotations

import itertools
from typing import Callable

from .condition import (
    And, Condition, Constraint, Exists, FalseCond, ForAll, Implies, Not, Or, TrueCond,
)
from .graph import TypedGraph
from .rewrite import Rule, apply_raw


def brute_monomorphisms(pattern: TypedGraph, host: TypedGraph) -> list[tuple[dict, dict]]:
    """Every injective morphism, by exhaustive enumeration."""
    key = ("brute", pattern)
    cached = host.cache.get(key)
    if cached is not None:
        return cached
    pnodes = sorted(pattern.nodes)
    pedges = sorted(pattern.edges)
    options = [[h for h in sorted(host.nodes) if host.nodes[h] == pattern.nodes[p]] for p in pnodes]
    out = []
    for assign in itertools.product(*options):
        if len(set(assign)) != len(assign):
            continue
        nmap = dict(zip(pnodes, assign))
        eopts = []
        for pe in pedges:
            t, s, g = pattern.edges[pe]
            eopts.append([he for he in sorted(host.edges)
                          if host.edges[he] == (t, nmap[s], nmap[g])])
        for eassign in itertools.product(*eopts):
            if len(set(eassign)) != len(eassign):
                continue
            out.append((nmap, dict(zip(pedges, eassign))))
    host.cache[key] = out
    return out


def _extends(q: tuple[dict, dict], e, p: tuple[dict, dict]) -> bool:
    qn, qe = q
    pn, pe = p
    return (all(qn[e.nodes[x]] == pn[x] for x in e.nodes)
            and all(qe[e.edges[x]] == pe[x] for x in e.edges))


def brute_holds(c: Condition, p: tuple[dict, dict], host: TypedGraph) -> bool:
    if isinstance(c, TrueCond):
        return True
    if isinstance(c, FalseCond):
        return False
    if isinstance(c, Exists):
        e = c.morphism
        return any(brute_holds(c.body, q, host)
                   for q in brute_monomorphisms(e.cod, host) if _extends(q, e, p))
    if isinstance(c, ForAll):
        e = c.morphism
        return all(brute_holds(c.body, q, host)
                   for q in brute_monomorphisms(e.cod, host) if _extends(q, e, p))
    if isinstance(c, Not):
        return not brute_holds(c.inner, p, host)
    if isinstance(c, Or):
        return any(brute_holds(x, p, host) for x in c.parts)
    if isinstance(c, And):
        return all(brute_holds(x, p, host) for x in c.parts)
    if isinstance(c, Implies):
        return not brute_holds(c.premise, p, host) or brute_holds(c.conclusion, p, host)
    raise TypeError(f"unexpected condition {c!r}")


def brute_violations(host: TypedGraph, constraint: Constraint, anchor=({}, {})) -> list:
    e = constraint.premise
    return [q for q in brute_monomorphisms(e.cod, host)
            if _extends(q, e, anchor) and not brute_holds(constraint.conclusion, q, host)]


def oracle_nv(host: TypedGraph, constraint: Constraint) -> int:
    """Number of violating premise occurrences, by exhaustive search."""
    return len(brute_violations(host, constraint))


def actual_delta(host: TypedGraph, rule: Rule, nmap: dict, emap: dict, constraint: Constraint) -> int:
    t = apply_raw(rule, host, nmap, emap)
    if t is None:
        raise ValueError("rule not applicable at this match")
    return oracle_nv(t.result, constraint) - oracle_nv(host, constraint)


def verify_delta_theorem(host: TypedGraph, rule: Rule, nmap: dict, emap: dict,
                         constraint: Constraint, predict: Callable[..., int]) -> tuple[bool, int, int]:
    """Compare ``predict(host, rule, nmap, emap, constraint)`` with the recounted change."""
    actual = actual_delta(host, rule, nmap, emap, constraint)
    predicted = predict(host, rule, nmap, emap, constraint)
    return predicted == actual, predicted, actual


def repaired_and_impaired(host: TypedGraph, rule: Rule, nmap: dict, emap: dict,
                          constraint: Constraint) -> tuple[int, int]:
    """Counts of repaired and impaired premise occurrences, straight from their definitions."""
    t = apply_raw(rule, host, nmap, emap)
    if t is None:
        raise ValueError("rule not applicable at this match")
    e = constraint.premise
    d = constraint.conclusion
    h = t.result
    dn, de = t.deleted_nodes, t.deleted_edges

    def tracked(q):
        qn, qe = q
        if set(qn.values()) & dn or set(qe.values()) & de:
            return None
        return qn, qe   # preserved elements keep their ids

    repaired = 0
    for q in brute_monomorphisms(e.cod, host):
        if brute_holds(d, q, host):
            continue
        tq = tracked(q)
        if tq is None or brute_holds(d, tq, h):
            repaired += 1
    before = {(tuple(sorted(q[0].items())), tuple(sorted(q[1].items()))): q
              for q in brute_monomorphisms(e.cod, host)}
    impaired = 0
    for q in brute_monomorphisms(e.cod, h):
        if brute_holds(d, q, h):
            continue
        k = (tuple(sorted(q[0].items())), tuple(sorted(q[1].items())))
        pre = before.get(k)
        if pre is None or brute_holds(d, pre, host):
            impaired += 1
    return repaired, impaired


def brute_direct_flags(host: TypedGraph, rule: Rule, nmap: dict, emap: dict,
                       constraint: Constraint) -> dict:
    repaired, impaired = repaired_and_impaired(host, rule, nmap, emap, constraint)
    return {"directSustaining": impaired == 0, "directImproving": impaired == 0 and repaired > 0}
