"""A scikit-learn style wrapper around ranking and greedy repair.

Samples are whole graphs, so ``X`` is a graph or a sequence of graphs (as
:class:`TypedGraph`, parsed JSON, or a path).  ``fit`` only derives the
application conditions; it learns nothing from the data.
"""
from __future__ import annotations

import json
from typing import Any, Sequence

from sklearn.base import BaseEstimator
from sklearn.utils.validation import check_is_fitted

from .condition import Constraint, count_violations
from .cra import base_constraints, cra_rules
from .graph import GraphError, TypedGraph, check_graph, graph_from_json
from .ranking import RankedMatch, Ranker, RepairConfig, RepairResult, greedy_repair
from .rewrite import Rule, check_rule


def check_graph_input(X: Any) -> list[TypedGraph]:
    """Normalise ``X`` into a list of validated graphs."""
    if isinstance(X, (TypedGraph, dict, str)):
        X = [X]
    if not isinstance(X, Sequence):
        raise GraphError(f"expected a graph or a sequence of graphs, got {type(X).__name__}")
    out = []
    for x in X:
        if isinstance(x, TypedGraph):
            out.append(check_graph(x))
        elif isinstance(x, dict):
            out.append(graph_from_json(x))
        elif isinstance(x, str):
            with open(x, encoding="utf-8") as fh:
                out.append(graph_from_json(json.load(fh)))
        else:
            raise GraphError(f"cannot read a graph from {type(x).__name__}")
    return out


def check_rules_and_constraints(rules, constraints) -> tuple[list[Rule], list[Constraint]]:
    rules = list(cra_rules() if rules is None else rules)
    constraints = list(base_constraints() if constraints is None else constraints)
    if not rules:
        raise GraphError("at least one rule is required")
    for r in rules:
        if not isinstance(r, Rule):
            raise GraphError(f"not a rule: {r!r}")
        check_rule(r)
    names = [r.name for r in rules]
    if len(set(names)) != len(names):
        raise GraphError("rule names must be unique")
    for c in constraints:
        if not isinstance(c, Constraint):
            raise GraphError(f"not a constraint: {c!r}")
    return rules, constraints


class GraphRepairer(BaseEstimator):
    """Greedy consistency repair.

    ``predict`` returns the best-ranked match per graph (or ``None``),
    ``transform`` the repaired graphs, and ``score`` the negated mean weighted
    violation count, so higher is better.
    """

    def __init__(self, rules=None, constraints=None, weights=None, cancel=True, restarts=1,
                 budget=0, budget_top_k=None, seed=0, max_iterations=10_000, check=True):
        self.rules = rules
        self.constraints = constraints
        self.weights = weights
        self.cancel = cancel
        self.restarts = restarts
        self.budget = budget
        self.budget_top_k = budget_top_k
        self.seed = seed
        self.max_iterations = max_iterations
        self.check = check

    def fit(self, X=None, y=None):
        rules, constraints = check_rules_and_constraints(self.rules, self.constraints)
        if X is not None:
            check_graph_input(X)
        self.rules_ = rules
        self.constraints_ = constraints
        self.ranker_ = Ranker(rules, constraints, self.weights, self.cancel)
        self.bundles_ = self.ranker_.bundles
        return self

    def rank(self, graph, top: int | None = None) -> list[RankedMatch]:
        check_is_fitted(self, "ranker_")
        (g,) = check_graph_input(graph)
        self.ranker_.clear()
        return self.ranker_.rank(g, top)

    def predict(self, X) -> list[RankedMatch | None]:
        check_is_fitted(self, "ranker_")
        out = []
        for g in check_graph_input(X):
            self.ranker_.clear()
            ranked = self.ranker_.rank(g, 1)
            out.append(ranked[0] if ranked else None)
        return out

    def repair(self, graph) -> RepairResult:
        check_is_fitted(self, "ranker_")
        (g,) = check_graph_input(graph)
        config = RepairConfig(self.max_iterations, self.restarts, self.budget, self.budget_top_k,
                              self.seed, self.cancel, self.check)
        return greedy_repair(g, self.rules_, self.constraints_, config, ranker=self.ranker_)

    def transform(self, X) -> list[TypedGraph]:
        return [self.repair(g).graph for g in check_graph_input(X)]

    def fit_transform(self, X, y=None) -> list[TypedGraph]:
        return self.fit(X).transform(X)

    def score(self, X, y=None) -> float:
        check_is_fitted(self, "ranker_")
        graphs = check_graph_input(X)
        w = self.ranker_.weights
        totals = [sum(w[c.name] * count_violations(c, g) for c in self.ranker_.constraints) for g in graphs]
        return -sum(totals) / len(totals) if totals else 0.0
