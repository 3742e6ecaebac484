"""Exact gain prediction, match ranking and greedy repair.

The predicted change of a constraint's violation count at a match is the sum
of impairment-condition counts minus the sum of repair-condition counts; a
negative ``delta`` is an improvement.  ``gain`` is ``-delta``.
"""
from __future__ import annotations

import logging
import random
from dataclasses import dataclass, field
from typing import Iterable

from .condition import Constraint, ConditionError, count_violations
from .graph import GraphError, TypedGraph
from .morphism import Morphism
from .repair import ACBundle, ac_count_raw, derive_bundle, relevant_elements
from .rewrite import Rule, apply_raw, default_namer, iter_applicable_matches
from .simplify import hard_patterns

log = logging.getLogger(__name__)


class TheoremViolation(AssertionError):
    """Predicted and recomputed violation changes disagree."""


@dataclass
class ConstraintScore:
    constraint: str
    repair: int
    impair: int
    weight: float = 1.0

    @property
    def delta(self) -> int:
        return self.impair - self.repair


@dataclass
class RankedMatch:
    rule: str
    match: dict          # {"nodes": {...}, "edges": {...}} over the rule's left side
    scores: list
    delta: float

    @property
    def gain(self) -> float:
        return 0.0 - self.delta

    def to_json(self) -> dict:
        return {
            "rule": self.rule,
            "match": {"nodes": dict(sorted(self.match["nodes"].items())),
                      "edges": dict(sorted(self.match["edges"].items()))},
            "delta": plain_number(self.delta),
            "gain": plain_number(self.gain),
            "perConstraint": [{"constraint": s.constraint, "repair": s.repair, "impair": s.impair,
                               "weight": plain_number(s.weight)} for s in self.scores],
        }


def plain_number(x: float):
    """Integral floats as ints, so JSON output reads ``3`` rather than ``3.0``."""
    return int(x) if float(x).is_integer() else x


def match_key(rule: Rule, nmap: dict, emap: dict) -> tuple:
    return (tuple(nmap[n] for n in sorted(rule.lhs.nodes)),
            tuple(emap[e] for e in sorted(rule.lhs.edges)))


def predicted_delta(rule: Rule, m: Morphism, constraint: Constraint, bundle: ACBundle,
                    cancelled: bool = True) -> int:
    """Predicted ``nv(H) - nv(G)`` for applying ``rule`` at ``m``."""
    bundle.check_fresh(rule, constraint)
    if m.dom != rule.lhs:
        raise ConditionError("match domain is not the rule's left-hand side")
    rep, imp = predicted_counts(bundle, m.cod, m.nodes, m.edges, None, cancelled)
    return imp - rep


def predicted_counts(bundle: ACBundle, host: TypedGraph, nmap: dict, emap: dict, reads=None,
                     cancelled: bool = True) -> tuple[int, int]:
    """Weighted-by-multiplicity (repair, impairment) condition counts at a raw match."""
    if cancelled:
        rep_acs, imp_acs = bundle.effective()
    else:
        rep_acs = [(a, a.multiplicity) for a in bundle.repair]
        imp_acs = [(a, a.multiplicity) for a in bundle.impairment]
    rep = sum(k * ac_count_raw(a, host, nmap, emap, reads) for a, k in rep_acs)
    imp = sum(k * ac_count_raw(a, host, nmap, emap, reads) for a, k in imp_acs)
    return rep, imp


def classify_transformation(rule: Rule, m: Morphism, constraint: Constraint, bundle: ACBundle) -> dict:
    """Sustaining/improving flags; the direct variants use the uncancelled conditions."""
    bundle.check_fresh(rule, constraint)
    rep, imp = predicted_counts(bundle, m.cod, m.nodes, m.edges, None, cancelled=False)
    delta = imp - rep
    direct = all(ac_count_raw(a, m.cod, m.nodes, m.edges) == 0 for a in bundle.impairment)
    return {
        "sustaining": delta <= 0,
        "improving": delta < 0,
        "directSustaining": direct,
        "directImproving": direct and rep > 0,
    }


class Ranker:
    """Scores every applicable match of a rule set against weighted constraints.

    Each condition count is cached under the match restricted to the elements
    the condition can depend on, together with the adjacency lists it read;
    :meth:`invalidate` drops exactly the entries a graph change can affect.
    """

    def __init__(self, rules: Iterable[Rule], constraints: Iterable[Constraint],
                 weights: dict | None = None, cancel: bool = True, bundles: dict | None = None,
                 hard: tuple | None = None):
        self.rules = list(rules)
        constraints = list(constraints)
        self.hard = hard_patterns(constraints) if hard is None else tuple(hard)
        self.constraints = [c for c in constraints if c.kind == "weak"]
        weights = dict(weights or {})
        unknown = set(weights) - {c.name for c in self.constraints}
        if unknown:
            raise ConditionError(f"weights for unknown constraints {sorted(unknown)}")
        for w in weights.values():
            if not isinstance(w, (int, float)) or w < 0:
                raise ConditionError("weights must be non-negative numbers")
        self.weights = {c.name: float(weights.get(c.name, c.weight)) for c in self.constraints}
        self.cancel = cancel
        self.bundles = dict(bundles or {})
        for r in self.rules:
            for c in self.constraints:
                key = (r.name, c.name)
                if key in self.bundles:
                    self.bundles[key].check_fresh(r, c)
                else:
                    self.bundles[key] = derive_bundle(r, c, self.hard, cancel)
        self._acs: list = []
        self._plan: dict = {}
        for r in self.rules:
            for c in self.constraints:
                b = self.bundles[(r.name, c.name)]
                if cancel:
                    rep, imp = b.effective()
                else:
                    rep = [(a, a.multiplicity) for a in b.repair]
                    imp = [(a, a.multiplicity) for a in b.impairment]
                self._plan[(r.name, c.name)] = ([(self._register(a), k) for a, k in rep],
                                                [(self._register(a), k) for a, k in imp])
        self._cache: dict = {}
        self._by_read: dict = {}

    def _register(self, ac) -> int:
        self._acs.append((ac,) + relevant_elements(ac))
        return len(self._acs) - 1

    # caching -------------------------------------------------------------
    def invalidate(self, changed: set) -> None:
        dead = set()
        for k in changed:
            dead |= self._by_read.pop(k, set())
        for key in dead:
            entry = self._cache.pop(key, None)
            if entry is None:
                continue
            for r in entry[1]:
                s = self._by_read.get(r)
                if s is not None:
                    s.discard(key)

    def clear(self) -> None:
        self._cache.clear()
        self._by_read.clear()

    def _count(self, i: int, host: TypedGraph, nmap: dict, emap: dict) -> int:
        ac, pn, pe = self._acs[i]
        key = (i, tuple(nmap[n] for n in pn), tuple(emap[e] for e in pe))
        hit = self._cache.get(key)
        if hit is not None:
            return hit[0]
        reads: set = set()
        n = ac_count_raw(ac, host, nmap, emap, reads)
        self._cache[key] = (n, reads)
        for r in reads:
            self._by_read.setdefault(r, set()).add(key)
        return n

    def _score(self, rule: Rule, host: TypedGraph, nmap: dict, emap: dict) -> list:
        scores = []
        for c in self.constraints:
            rep_acs, imp_acs = self._plan[(rule.name, c.name)]
            rep = sum(k * self._count(i, host, nmap, emap) for i, k in rep_acs)
            imp = sum(k * self._count(i, host, nmap, emap) for i, k in imp_acs)
            scores.append((c.name, rep, imp))
        return scores

    def rank(self, host: TypedGraph, top: int | None = None) -> list[RankedMatch]:
        """All applicable matches, best (lowest delta) first; ties broken by rule and match ids."""
        out = []
        for rule in self.rules:
            for nmap, emap in iter_applicable_matches(rule, host):
                scores = self._score(rule, host, nmap, emap)
                delta = sum(self.weights[n] * (imp - rep) for n, rep, imp in scores)
                out.append((delta, rule.name, match_key(rule, nmap, emap),
                            RankedMatch(rule.name, {"nodes": nmap, "edges": emap},
                                        [ConstraintScore(n, rep, imp, self.weights[n])
                                         for n, rep, imp in scores], delta)))
        out.sort(key=lambda t: t[:3])
        res = [t[3] for t in out]
        return res[:top] if top is not None else res

    def rule(self, name: str) -> Rule:
        for r in self.rules:
            if r.name == name:
                return r
        raise KeyError(name)


def rank_all(host: TypedGraph, rules: Iterable[Rule], constraints: Iterable[Constraint],
             weights: dict | None = None, cancel: bool = True, top: int | None = None,
             bundles: dict | None = None) -> list[RankedMatch]:
    return Ranker(rules, constraints, weights, cancel, bundles).rank(host, top)


# greedy repair ------------------------------------------------------------

@dataclass
class RepairConfig:
    max_iterations: int = 10_000
    restarts: int = 1
    initial_impair_budget: int = 0
    budget_top_k: int | None = None
    seed: int = 0
    cancel: bool = True
    check: bool = True


@dataclass
class TraceStep:
    rule: str
    match: dict
    predicted: dict
    actual: dict
    delta: float
    totals: dict

    def to_json(self) -> dict:
        return {"rule": self.rule,
                "match": {"nodes": dict(sorted(self.match["nodes"].items())),
                          "edges": dict(sorted(self.match["edges"].items()))},
                "predicted": dict(sorted(self.predicted.items())),
                "actual": dict(sorted(self.actual.items())),
                "delta": plain_number(self.delta), "totals": dict(sorted(self.totals.items()))}


@dataclass
class RepairResult:
    graph: TypedGraph
    steps: list = field(default_factory=list)
    initial: dict = field(default_factory=dict)
    final: dict = field(default_factory=dict)
    initial_score: float = 0.0
    final_score: float = 0.0
    reason: str = ""
    restart: int = 0

    def to_json(self) -> dict:
        return {"steps": [s.to_json() for s in self.steps],
                "initial": dict(sorted(self.initial.items())),
                "final": dict(sorted(self.final.items())),
                "initialScore": plain_number(self.initial_score), "finalScore": plain_number(self.final_score),
                "reason": self.reason, "restart": self.restart}


def _changed_keys(t) -> set:
    """Index keys (as recorded by the matcher) touched by a transformation."""
    keys = set()
    for g, es in ((t.original, t.deleted_edges), (t.result, t.created_edges)):
        for e in es:
            et, s, d = g.edges[e]
            keys.add(("o", s, et))
            keys.add(("i", d, et))
    for g, ns in ((t.original, t.deleted_nodes), (t.result, t.created_nodes)):
        for n in ns:
            keys.add(("t", g.nodes[n]))
    return keys


def violation_totals(host: TypedGraph, constraints: Iterable[Constraint]) -> dict:
    return {c.name: count_violations(c, host) for c in constraints}


def _weighted(totals: dict, weights: dict) -> float:
    return sum(weights[n] * v for n, v in totals.items())


def _greedy_run(ranker: Ranker, host: TypedGraph, config: RepairConfig, rng: random.Random,
                budget: int) -> RepairResult:
    ranker.clear()
    totals = violation_totals(host, ranker.constraints)
    res = RepairResult(host, initial=dict(totals), initial_score=_weighted(totals, ranker.weights))
    g = host
    step = 0
    while True:
        if step >= config.max_iterations:
            res.reason = "max iterations"
            break
        ranked = ranker.rank(g)
        if not ranked:
            res.reason = "no applicable match"
            break
        if step < budget:
            pool = ranked[:config.budget_top_k] if config.budget_top_k else ranked
            choice = pool[rng.randrange(len(pool))]
        else:
            choice = ranked[0]
            if choice.delta >= 0:
                res.reason = "no improving move"
                break
        rule = ranker.rule(choice.rule)
        t = apply_raw(rule, g, choice.match["nodes"], choice.match["edges"], default_namer(rule, step))
        if t is None:
            raise GraphError("ranked match is not applicable")
        predicted = {s.constraint: s.delta for s in choice.scores}
        if config.check:
            new_totals = violation_totals(t.result, ranker.constraints)
            actual = {n: new_totals[n] - totals[n] for n in totals}
            if actual != predicted:
                raise TheoremViolation(f"step {step}: predicted {predicted}, recomputed {actual}")
        else:
            new_totals = {n: totals[n] + predicted[n] for n in totals}
            actual = dict(predicted)
        ranker.invalidate(_changed_keys(t))
        g = t.result
        totals = new_totals
        res.steps.append(TraceStep(choice.rule, {"nodes": dict(choice.match["nodes"]),
                                                 "edges": dict(choice.match["edges"])},
                                   predicted, actual, choice.delta, dict(totals)))
        step += 1
    res.graph = g
    res.final = dict(totals)
    res.final_score = _weighted(totals, ranker.weights)
    return res


def greedy_repair(host: TypedGraph, rules: Iterable[Rule], constraints: Iterable[Constraint],
                  config: RepairConfig | None = None, weights: dict | None = None,
                  ranker: Ranker | None = None) -> RepairResult:
    """Repeatedly apply the best-ranked match; keep the best of ``config.restarts`` runs.

    Run ``r`` uses ``random.Random(seed + r)``.  The first run spends no
    budget, so one restart without budget is plain greedy descent.
    """
    config = config or RepairConfig()
    if config.restarts < 1:
        raise ValueError("restarts must be at least 1")
    ranker = ranker or Ranker(rules, constraints, weights, config.cancel)
    best = None
    for r in range(config.restarts):
        rng = random.Random(config.seed + r)
        budget = config.initial_impair_budget if (r > 0 or config.restarts == 1) else 0
        res = _greedy_run(ranker, host, config, rng, budget)
        res.restart = r
        log.debug("restart %d: %s -> %s (%s)", r, res.initial_score, res.final_score, res.reason)
        if best is None or res.final_score < best.final_score:
            best = res
    return best
