"""Nested graph conditions, their satisfaction semantics and violation counting.

A condition is always read relative to a context graph ``P``: ``Exists(e, d)``
with ``e: P -> Q`` holds for ``p: P -> G`` iff some injective ``q: Q -> G``
with ``q . e = p`` satisfies ``d``.  The core forms are ``TRUE``, ``Exists``,
``Not`` and ``Or``; ``FALSE``, ``And``, ``Implies`` and ``ForAll`` are sugar
and :func:`lower` rewrites them away.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Iterable

from .graph import EMPTY, GraphError, TypeGraph, TypedGraph, graph_from_json, graph_to_json
from .matching import iter_matches, search
from .morphism import Morphism, identity, morphism_problems


class ConditionError(GraphError):
    """Raised for malformed conditions or mismatched contexts."""


class Condition:
    __slots__ = ()


@dataclass(frozen=True)
class TrueCond(Condition):
    def __repr__(self) -> str:
        return "TRUE"


@dataclass(frozen=True)
class FalseCond(Condition):
    def __repr__(self) -> str:
        return "FALSE"


TRUE = TrueCond()
FALSE = FalseCond()


@dataclass(frozen=True)
class Exists(Condition):
    morphism: Morphism
    body: Condition = TRUE


@dataclass(frozen=True)
class ForAll(Condition):
    morphism: Morphism
    body: Condition = TRUE


@dataclass(frozen=True)
class Not(Condition):
    inner: Condition


@dataclass(frozen=True)
class Or(Condition):
    parts: tuple = field(default_factory=tuple)


@dataclass(frozen=True)
class And(Condition):
    parts: tuple = field(default_factory=tuple)


@dataclass(frozen=True)
class Implies(Condition):
    premise: Condition
    conclusion: Condition


def disjunction(parts: Iterable[Condition]) -> Condition:
    parts = tuple(parts)
    if len(parts) == 1:
        return parts[0]
    return Or(parts)


def context_graph(c: Condition) -> TypedGraph | None:
    """The graph a condition is stated over, when it can be read off the tree."""
    if isinstance(c, (Exists, ForAll)):
        return c.morphism.dom
    if isinstance(c, Not):
        return context_graph(c.inner)
    if isinstance(c, (Or, And)):
        for p in c.parts:
            g = context_graph(p)
            if g is not None:
                return g
        return None
    if isinstance(c, Implies):
        return context_graph(c.premise) or context_graph(c.conclusion)
    return None


def lower(c: Condition) -> Condition:
    """Rewrite sugar into the core forms TRUE, Exists, Not, Or."""
    if isinstance(c, TrueCond):
        return c
    if isinstance(c, FalseCond):
        return Not(TRUE)
    if isinstance(c, Exists):
        return Exists(c.morphism, lower(c.body))
    if isinstance(c, ForAll):
        return Not(Exists(c.morphism, Not(lower(c.body))))
    if isinstance(c, Not):
        return Not(lower(c.inner))
    if isinstance(c, Or):
        return Or(tuple(lower(p) for p in c.parts))
    if isinstance(c, And):
        return Not(Or(tuple(Not(lower(p)) for p in c.parts)))
    if isinstance(c, Implies):
        return Or((Not(lower(c.premise)), lower(c.conclusion)))
    raise ConditionError(f"not a condition: {c!r}")


def condition_size(c: Condition) -> int:
    if isinstance(c, (Exists, ForAll)):
        return 1 + condition_size(c.body)
    if isinstance(c, Not):
        return 1 + condition_size(c.inner)
    if isinstance(c, (Or, And)):
        return 1 + sum(condition_size(p) for p in c.parts)
    if isinstance(c, Implies):
        return 1 + condition_size(c.premise) + condition_size(c.conclusion)
    return 1


def iter_exists_graphs(c: Condition):
    """Yield every (morphism, body) of quantifier nodes in the tree."""
    if isinstance(c, (Exists, ForAll)):
        yield c.morphism, c.body
        yield from iter_exists_graphs(c.body)
    elif isinstance(c, Not):
        yield from iter_exists_graphs(c.inner)
    elif isinstance(c, (Or, And)):
        for p in c.parts:
            yield from iter_exists_graphs(p)
    elif isinstance(c, Implies):
        yield from iter_exists_graphs(c.premise)
        yield from iter_exists_graphs(c.conclusion)


# semantics ----------------------------------------------------------------

def _extensions(e: Morphism, nmap: dict, emap: dict, host: TypedGraph, reads):
    anchor_n = {q: nmap[p] for p, q in e.nodes.items()}
    anchor_e = {q: emap[p] for p, q in e.edges.items()}
    return iter_matches(e.cod, host, anchor_n, anchor_e, reads)


def _anchor(e: Morphism, nmap: dict, emap: dict) -> tuple[dict, dict]:
    an = {q: nmap[p] for p, q in e.nodes.items()}
    ae = {q: emap[p] for p, q in e.edges.items()}
    return an, ae


def holds(c: Condition, nmap: dict, emap: dict, host: TypedGraph, reads: set | None = None) -> bool:
    """Satisfaction of ``c`` by the match given as raw id maps (trusted, fast path)."""
    if isinstance(c, Exists):
        body = c.body
        an, ae = _anchor(c.morphism, nmap, emap)
        if isinstance(body, TrueCond):
            return search(c.morphism.extension_plan(), host, an, ae, reads, _yes)
        return search(c.morphism.extension_plan(), host, an, ae, reads,
                      lambda qn, qe: holds(body, qn, qe, host, reads))
    if isinstance(c, Not):
        return not holds(c.inner, nmap, emap, host, reads)
    if isinstance(c, Or):
        for p in c.parts:
            if holds(p, nmap, emap, host, reads):
                return True
        return False
    if isinstance(c, TrueCond):
        return True
    if isinstance(c, FalseCond):
        return False
    if isinstance(c, ForAll):
        body = c.body
        an, ae = _anchor(c.morphism, nmap, emap)
        return not search(c.morphism.extension_plan(), host, an, ae, reads,
                          lambda qn, qe: not holds(body, qn, qe, host, reads))
    if isinstance(c, And):
        return all(holds(p, nmap, emap, host, reads) for p in c.parts)
    if isinstance(c, Implies):
        return (not holds(c.premise, nmap, emap, host, reads)) or holds(c.conclusion, nmap, emap, host, reads)
    raise ConditionError(f"not a condition: {c!r}")


def _yes(qn, qe) -> bool:
    return True


def satisfies(p: Morphism, c: Condition) -> bool:
    """Whether the match ``p: P -> G`` satisfies the condition ``c`` over ``P``."""
    ctx = context_graph(c)
    if ctx is not None and ctx != p.dom:
        raise ConditionError("condition context differs from the domain of the match")
    return holds(c, p.nodes, p.edges, p.cod)


def graph_satisfies(g: TypedGraph, c: Condition) -> bool:
    """Satisfaction of a constraint (condition over the empty graph)."""
    return holds(c, {}, {}, g)


# constraints --------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class Constraint:
    """A universally quantified condition ``forall(premise, conclusion)`` with metadata."""

    name: str
    premise: Morphism
    conclusion: Condition = TRUE
    kind: str = "weak"
    weight: float = 1.0

    @property
    def premise_graph(self) -> TypedGraph:
        return self.premise.cod

    @property
    def context(self) -> TypedGraph:
        return self.premise.dom

    def as_condition(self) -> Condition:
        return ForAll(self.premise, self.conclusion)

    def is_forbidden_pattern(self) -> bool:
        return self.context.is_empty() and isinstance(self.conclusion, FalseCond)


def normalize_universal(c: Condition, name: str = "c", kind: str = "weak", weight: float = 1.0,
                        context: TypedGraph | None = None) -> Constraint:
    """Bring a condition into the shape ``forall(e, d)``.

    Conditions that already have that shape keep it; anything else is wrapped
    as ``forall(id, c)`` so its violation count is 0 or 1.
    """
    if kind not in ("hard", "weak"):
        raise ConditionError(f"unknown constraint kind {kind!r}")
    if isinstance(c, ForAll):
        return Constraint(name, c.morphism, c.body, kind, weight)
    if (isinstance(c, Not) and isinstance(c.inner, Exists) and isinstance(c.inner.body, Not)):
        return Constraint(name, c.inner.morphism, c.inner.body.inner, kind, weight)
    ctx = context if context is not None else (context_graph(c) or EMPTY)
    return Constraint(name, identity(ctx), c, kind, weight)


@dataclass
class ViolationSet:
    anchor: Morphism
    witnesses: list = field(default_factory=list)

    def __len__(self) -> int:
        return len(self.witnesses)


def iter_violations(constraint: Constraint, host: TypedGraph, nmap: dict | None = None,
                    emap: dict | None = None, reads: set | None = None):
    """Yield raw (node_map, edge_map) copies of premise occurrences that violate."""
    e = constraint.premise
    body = constraint.conclusion
    for qn, qe in _extensions(e, nmap or {}, emap or {}, host, reads):
        if not holds(body, qn, qe, host, reads):
            yield dict(qn), dict(qe)


def violations_of(p: Morphism, constraint: Constraint) -> ViolationSet:
    if p.dom != constraint.context:
        raise ConditionError("anchor domain differs from the constraint context")
    from .matching import _sort_key
    ws = [Morphism(constraint.premise_graph, p.cod, n, e)
          for n, e in iter_violations(constraint, p.cod, p.nodes, p.edges)]
    ws.sort(key=_sort_key(constraint.premise_graph))
    return ViolationSet(p, ws)


def count_violations(constraint: Constraint, host: TypedGraph, anchor: Morphism | None = None) -> int:
    """Number of premise occurrences that violate the conclusion (ordered, not deduplicated)."""
    if anchor is None:
        if not constraint.context.is_empty():
            raise ConditionError("constraint has a non-empty context; pass an anchor")
        return sum(1 for _ in iter_violations(constraint, host))
    return sum(1 for _ in iter_violations(constraint, host, anchor.nodes, anchor.edges))


# JSON ---------------------------------------------------------------------

def _embedding_json(m: Morphism) -> dict:
    return {"nodeMap": dict(sorted(m.nodes.items())), "edgeMap": dict(sorted(m.edges.items()))}


def condition_to_json(c: Condition) -> Any:
    if isinstance(c, TrueCond):
        return {"true": True}
    if isinstance(c, FalseCond):
        return {"false": True}
    if isinstance(c, (Exists, ForAll)):
        tag = "exists" if isinstance(c, Exists) else "forall"
        return {tag: {"graph": graph_to_json(c.morphism.cod, with_typegraph=False),
                      "embedding": _embedding_json(c.morphism),
                      "body": condition_to_json(c.body)}}
    if isinstance(c, Not):
        return {"not": condition_to_json(c.inner)}
    if isinstance(c, Or):
        return {"or": [condition_to_json(p) for p in c.parts]}
    if isinstance(c, And):
        return {"and": [condition_to_json(p) for p in c.parts]}
    if isinstance(c, Implies):
        return {"implies": [condition_to_json(c.premise), condition_to_json(c.conclusion)]}
    raise ConditionError(f"not a condition: {c!r}")


def condition_from_json(data: Any, context: TypedGraph = EMPTY,
                        typegraph: TypeGraph | None = None) -> Condition:
    """Parse a condition tree stated over ``context``."""
    if data in ("true", True):
        return TRUE
    if data in ("false", False):
        return FALSE
    if not isinstance(data, dict) or len(data) != 1:
        raise ConditionError(f"condition node must be an object with one key, got {data!r}")
    (tag, val), = data.items()
    if tag == "true":
        return TRUE
    if tag == "false":
        return FALSE
    if tag in ("exists", "forall"):
        if not isinstance(val, dict) or "graph" not in val:
            raise ConditionError(f"{tag} node needs a graph")
        q = graph_from_json(val["graph"], typegraph)
        if q.typegraph is None:
            q = q.with_typegraph(typegraph)
        emb = val.get("embedding", {}) or {}
        m = Morphism(context, q, emb.get("nodeMap", {}), emb.get("edgeMap", {}))
        problems = morphism_problems(m)
        if problems:
            raise ConditionError(f"bad embedding in {tag} node: " + "; ".join(problems))
        body = condition_from_json(val.get("body", {"true": True}), q, typegraph)
        return Exists(m, body) if tag == "exists" else ForAll(m, body)
    if tag == "not":
        return Not(condition_from_json(val, context, typegraph))
    if tag in ("or", "and"):
        if not isinstance(val, list):
            raise ConditionError(f"{tag} node needs a list")
        parts = tuple(condition_from_json(v, context, typegraph) for v in val)
        return Or(parts) if tag == "or" else And(parts)
    if tag == "implies":
        if not isinstance(val, list) or len(val) != 2:
            raise ConditionError("implies node needs two operands")
        return Implies(condition_from_json(val[0], context, typegraph),
                       condition_from_json(val[1], context, typegraph))
    raise ConditionError(f"unknown condition node {tag!r}")


_TREE_KEYS = ("forall", "exists", "not", "or", "and", "implies", "true", "false")


def constraint_to_json(c: Constraint) -> dict:
    out = condition_to_json(c.as_condition())
    out.update({"name": c.name, "kind": c.kind, "weight": c.weight})
    return out


def constraint_from_json(data: Any, typegraph: TypeGraph | None = None) -> Constraint:
    if not isinstance(data, dict):
        raise ConditionError("constraint must be an object")
    kind = data.get("kind", "weak")
    weight = data.get("weight", 1.0)
    if not isinstance(weight, (int, float)) or isinstance(weight, bool):
        raise ConditionError("constraint weight must be a number")
    if "condition" in data:
        tree = data["condition"]
    else:
        tree = {k: v for k, v in data.items() if k in _TREE_KEYS}
    cond = condition_from_json(tree, EMPTY, typegraph)
    return normalize_universal(cond, str(data.get("name", "c")), kind, weight)


def constraints_from_json(data: Any, typegraph: TypeGraph | None = None) -> list[Constraint]:
    """Parse ``{"typegraph":..., "constraints":[...]}`` or a bare list."""
    if isinstance(data, dict):
        if "typegraph" in data:
            typegraph = TypeGraph.from_json(data["typegraph"])
        if "constraints" not in data:
            raise ConditionError("expected a 'constraints' list")
        items = data["constraints"]
    else:
        items = data
    if not isinstance(items, list):
        raise ConditionError("constraints must be a list")
    out = [constraint_from_json(d, typegraph) for d in items]
    names = [c.name for c in out]
    if len(set(names)) != len(names):
        raise ConditionError("constraint names must be unique")
    return out


def constraints_to_json(cs: list[Constraint], typegraph: TypeGraph | None = None) -> dict:
    out: dict[str, Any] = {"constraints": [constraint_to_json(c) for c in cs]}
    if typegraph is not None:
        out["typegraph"] = typegraph.to_json()
    return out
