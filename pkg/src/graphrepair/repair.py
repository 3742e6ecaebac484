"""Repair- and impairment-indicating application conditions.

For a rule and a universal constraint ``forall(P, d)`` every applicable
overlap of the rule's left side with ``P`` yields one condition
``forall(i: L -> PL, post => pre)`` over ``L``.  At a match ``m`` its
violation count is the number of premise occurrences that are violated
before the step and destroyed or fixed by it (repair); the same construction
for the inverse rule, shifted back over the rule, counts occurrences that
become violated (impairment).  The difference of the two sums is the exact
change of the constraint's violation count.
"""
from __future__ import annotations

import hashlib
import json
import logging
from dataclasses import dataclass, field
from typing import Any

from .condition import (
    TRUE, And, Condition, Constraint, ConditionError, Exists, ForAll, Implies, Not, Or,
    condition_from_json,
    condition_to_json, constraint_to_json, holds, lower,
)
from .graph import GraphError, TypeGraph, graph_from_json, graph_to_json
from .matching import search
from .morphism import Morphism
from .overlap import induced_transformation, rule_overlap_classes
from .rewrite import Rule, apply_raw, invert_rule, keep_namer, rule_to_json
from .shift import shift_along, shift_over_rule
from .simplify import equivalent, is_true, simplify, violates_hard


log = logging.getLogger(__name__)


class StaleBundleError(GraphError):
    """The bundle was derived for a different rule or constraint."""


@dataclass(eq=False)
class ApplicationCondition:
    """``forall(anchor: L -> PL, body)`` attached to a rule."""

    kind: str                 # "repair" or "impairment"
    branch: str               # "pre" or "con"
    constraint: str
    anchor: Morphism
    body: Condition
    multiplicity: int = 1
    sources: list = field(default_factory=list)
    explanation: dict | None = None

    @property
    def graph(self):
        return self.anchor.cod

    def as_condition(self) -> Condition:
        """The condition over ``L`` as ``not exists(anchor, not body)``."""
        return Not(Exists(self.anchor, Not(self.body)))

    def same_as(self, other: "ApplicationCondition") -> bool:
        return equivalent(Exists(self.anchor, Not(self.body)), Exists(other.anchor, Not(other.body)))


def _corr_json(ov) -> dict:
    return {"nodes": [list(p) for p in ov.correspondence.nodes],
            "edges": [list(p) for p in ov.correspondence.edges]}


def _require_graph_constraint(constraint: Constraint) -> None:
    if not constraint.context.is_empty():
        raise ConditionError(f"constraint {constraint.name} is not stated over the empty graph")


def _raw_repair(rule: Rule, constraint: Constraint, explain: bool) -> list[ApplicationCondition]:
    _require_graph_constraint(constraint)
    premise = constraint.premise_graph
    d = lower(constraint.conclusion)
    pre_ovs, con_ovs = rule_overlap_classes(rule, premise)
    out = []
    for ov in pre_ovs:
        pre = shift_along(ov.right, d)
        ac = ApplicationCondition("repair", "pre", constraint.name, ov.left, pre,
                                  sources=[_corr_json(ov)])
        if explain:
            ac.explanation = {"pre": pre, "post": TRUE}
        out.append(ac)
    for ov in con_ovs:
        t = induced_transformation(rule, ov)
        pre = shift_along(ov.right, d)
        hx = Morphism(premise, t.result, ov.right.nodes, ov.right.edges)
        derived = Rule(rule.name + "@" + "overlap", ov.graph, t.result)
        post = shift_over_rule(derived, shift_along(hx, d))
        ac = ApplicationCondition("repair", "con", constraint.name, ov.left, lower(Implies(post, pre)),
                                  sources=[_corr_json(ov)])
        if explain:
            ac.explanation = {"pre": pre, "post": post}
        out.append(ac)
    return out


def _finish(acs: list[ApplicationCondition], hard: tuple, simplify_bodies: bool) -> list[ApplicationCondition]:
    kept = []
    for ac in acs:
        if violates_hard(ac.graph, hard):
            log.debug("pruned %s/%s %s condition (hard pattern): %s", ac.constraint, ac.branch,
                      ac.kind, ac.sources)
            continue
        if simplify_bodies:
            ac.body = simplify(ac.body, hard)
        if is_true(ac.body):
            log.debug("pruned %s/%s %s condition (body is true): %s", ac.constraint, ac.branch,
                      ac.kind, ac.sources)
            continue
        kept.append(ac)
    return merge_equivalent(kept)


def merge_equivalent(acs: list[ApplicationCondition]) -> list[ApplicationCondition]:
    """Collapse conditions equal up to isomorphism; their count goes into ``multiplicity``."""
    out: list[ApplicationCondition] = []
    for ac in acs:
        for prev in out:
            if prev.branch == ac.branch and prev.same_as(ac):
                prev.multiplicity += ac.multiplicity
                prev.sources.extend(ac.sources)
                break
        else:
            out.append(ac)
    return out


def derive_repair_acs(rule: Rule, constraint: Constraint, hard: tuple = (),
                      explain: bool = False, simplify_bodies: bool = True) -> list[ApplicationCondition]:
    """Repair-indicating conditions of ``rule`` for ``constraint``.

    ``hard`` holds forbidden patterns the host graphs are known to avoid;
    they are used to prune impossible overlaps and sub-conditions.
    """
    return _finish(_raw_repair(rule, constraint, explain), tuple(hard), simplify_bodies)


def derive_impairment_acs(rule: Rule, constraint: Constraint, hard: tuple = (),
                          explain: bool = False, simplify_bodies: bool = True) -> list[ApplicationCondition]:
    """Impairment-indicating conditions: repair conditions of the inverse rule moved to the left side."""
    inv = invert_rule(rule)
    out = []
    for ac in _raw_repair(inv, constraint, explain):
        ir = ac.anchor
        t = apply_raw(inv, ir.cod, ir.nodes, ir.edges, keep_namer)
        if t is None:
            continue
        back = Rule(rule.name + "@back", t.result, ir.cod)
        body = shift_over_rule(back, ac.body)
        new = ApplicationCondition("impairment", ac.branch, constraint.name, t.comatch, body,
                                   sources=ac.sources)
        if explain:
            new.explanation = {"pre": shift_over_rule(back, ac.explanation["pre"]),
                               "post": shift_over_rule(back, ac.explanation["post"])}
        out.append(new)
    return _finish(out, tuple(hard), simplify_bodies)


def _fingerprint(obj: Any) -> str:
    return hashlib.sha256(json.dumps(obj, sort_keys=True).encode()).hexdigest()[:16]


def rule_fingerprint(rule: Rule) -> str:
    return _fingerprint(rule_to_json(rule))


def constraint_fingerprint(constraint: Constraint) -> str:
    return _fingerprint(constraint_to_json(constraint))


@dataclass(eq=False)
class ACBundle:
    """All conditions of one rule for one constraint, with mutual cancellations."""

    rule: Rule
    constraint: Constraint
    repair: list
    impairment: list
    cancelled: list = field(default_factory=list)  # (repair idx, impairment idx, copies)
    rule_hash: str = ""
    constraint_hash: str = ""

    def effective(self) -> tuple[list, list]:
        """``[(ac, multiplicity)]`` for repair and impairment after cancellation."""
        rep = [ac.multiplicity for ac in self.repair]
        imp = [ac.multiplicity for ac in self.impairment]
        for i, j, k in self.cancelled:
            rep[i] -= k
            imp[j] -= k
        return ([(a, n) for a, n in zip(self.repair, rep) if n > 0],
                [(a, n) for a, n in zip(self.impairment, imp) if n > 0])

    def check_fresh(self, rule: Rule, constraint: Constraint) -> None:
        if rule_fingerprint(rule) != self.rule_hash or constraint_fingerprint(constraint) != self.constraint_hash:
            raise StaleBundleError(f"bundle for ({self.rule.name}, {self.constraint.name}) is stale")


def cancel_mutual(repair: list, impairment: list) -> list[tuple[int, int, int]]:
    """Pairs of syntactically equal repair/impairment conditions that cancel out."""
    left = [ac.multiplicity for ac in impairment]
    out = []
    for i, r in enumerate(repair):
        budget = r.multiplicity
        for j, v in enumerate(impairment):
            if budget == 0:
                break
            if left[j] and r.same_as(v):
                k = min(budget, left[j])
                out.append((i, j, k))
                budget -= k
                left[j] -= k
    return out


def derive_bundle(rule: Rule, constraint: Constraint, hard: tuple = (), cancel: bool = True,
                  explain: bool = False) -> ACBundle:
    rep = derive_repair_acs(rule, constraint, hard, explain)
    imp = derive_impairment_acs(rule, constraint, hard, explain)
    return ACBundle(rule, constraint, rep, imp, cancel_mutual(rep, imp) if cancel else [],
                    rule_fingerprint(rule), constraint_fingerprint(constraint))


# evaluation ---------------------------------------------------------------

def ac_count_raw(ac: ApplicationCondition, host, nmap: dict, emap: dict, reads: set | None = None) -> int:
    """Number of occurrences of ``ac.graph`` over the match that violate the body."""
    a = ac.anchor
    an = {a.nodes[x]: nmap[x] for x in a.nodes}
    ae = {a.edges[x]: emap[x] for x in a.edges}
    body = ac.body
    box = [0]

    def visit(qn, qe):
        if not holds(body, qn, qe, host, reads):
            box[0] += 1
        return False

    search(a.extension_plan(), host, an, ae, reads, visit)
    return box[0]


def relevant_elements(ac: ApplicationCondition) -> tuple[tuple, tuple]:
    """Rule-side nodes and edges whose images can influence :func:`ac_count_raw`.

    A node matters if some graph of the condition has an edge at its image or
    an unanchored node of the same type (injectivity); an edge matters only for
    injectivity against unanchored edges of its type.
    """
    a = ac.anchor
    keep_n: set = set()
    keep_e: set = set()
    L = a.dom

    def walk(g, nmap: dict, emap: dict, c) -> None:
        img_n = set(nmap.values())
        img_e = set(emap.values())
        free_nt = {t for n, t in g.nodes.items() if n not in img_n}
        free_et = {t for e, (t, _, _) in g.edges.items() if e not in img_e}
        touched = set()
        for _, s, t in g.edges.values():
            touched.add(s)
            touched.add(t)
        for x, y in nmap.items():
            if y in touched or L.nodes[x] in free_nt:
                keep_n.add(x)
        for x in emap:
            if L.edges[x][0] in free_et:
                keep_e.add(x)
        for m, body in _quantifiers(c):
            walk(m.cod, {x: m.nodes[y] for x, y in nmap.items()},
                 {x: m.edges[y] for x, y in emap.items()}, body)

    walk(a.cod, dict(a.nodes), dict(a.edges), ac.body)
    return tuple(sorted(keep_n)), tuple(sorted(keep_e))


def _quantifiers(c):
    """Top-level quantifier nodes of ``c`` (not descending into their bodies)."""
    if isinstance(c, (Exists, ForAll)):
        yield c.morphism, c.body
    elif isinstance(c, Not):
        yield from _quantifiers(c.inner)
    elif isinstance(c, (Or, And)):
        for p in c.parts:
            yield from _quantifiers(p)
    elif isinstance(c, Implies):
        yield from _quantifiers(c.premise)
        yield from _quantifiers(c.conclusion)


def ac_violation_count(m: Morphism, ac: ApplicationCondition) -> int:
    if m.dom != ac.anchor.dom:
        raise ConditionError("match domain differs from the condition's rule side")
    return ac_count_raw(ac, m.cod, m.nodes, m.edges)


# JSON ---------------------------------------------------------------------

def ac_to_json(ac: ApplicationCondition, explain: bool = False) -> dict:
    out = {
        "kind": ac.kind,
        "branch": ac.branch,
        "sourceConstraint": ac.constraint,
        "multiplicity": ac.multiplicity,
        "anchorGraph": graph_to_json(ac.graph, False),
        "anchorEmbedding": {"nodeMap": dict(sorted(ac.anchor.nodes.items())),
                            "edgeMap": dict(sorted(ac.anchor.edges.items()))},
        "body": condition_to_json(ac.body),
        "sourceOverlaps": ac.sources,
    }
    if explain and ac.explanation is not None:
        out["explain"] = {k: condition_to_json(v) for k, v in sorted(ac.explanation.items())}
    return out


def ac_from_json(data: dict, rule_side, typegraph: TypeGraph | None = None) -> ApplicationCondition:
    try:
        g = graph_from_json(data["anchorGraph"], typegraph)
        emb = data["anchorEmbedding"]
        anchor = Morphism(rule_side, g, emb.get("nodeMap", {}), emb.get("edgeMap", {}))
        body = condition_from_json(data["body"], g, typegraph)
        return ApplicationCondition(data["kind"], data["branch"], data["sourceConstraint"], anchor,
                                    body, int(data.get("multiplicity", 1)), list(data.get("sourceOverlaps", [])))
    except (KeyError, TypeError) as exc:
        raise ConditionError(f"malformed application condition: {exc}") from None


def bundle_to_json(b: ACBundle, explain: bool = False) -> dict:
    return {
        "rule": b.rule.name,
        "constraint": b.constraint.name,
        "ruleHash": b.rule_hash,
        "constraintHash": b.constraint_hash,
        "repair": [ac_to_json(a, explain) for a in b.repair],
        "impairment": [ac_to_json(a, explain) for a in b.impairment],
        "cancelled": [{"repair": i, "impairment": j, "copies": k} for i, j, k in b.cancelled],
    }


def bundle_from_json(data: dict, rule: Rule, constraint: Constraint,
                     typegraph: TypeGraph | None = None) -> ACBundle:
    b = ACBundle(rule, constraint,
                 [ac_from_json(a, rule.lhs, typegraph) for a in data.get("repair", [])],
                 [ac_from_json(a, rule.lhs, typegraph) for a in data.get("impairment", [])],
                 [(c["repair"], c["impairment"], c["copies"]) for c in data.get("cancelled", [])],
                 data.get("ruleHash", ""), data.get("constraintHash", ""))
    b.check_fresh(rule, constraint)
    return b
