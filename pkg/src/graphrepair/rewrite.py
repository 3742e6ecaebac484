"""Double-pushout rules and transformations.

A rule is given by its left- and right-hand side graphs; the interface is the
set of ids present in both sides (with identical type and endpoints).
Elements of the left side outside the interface are deleted, elements of the
right side outside it are created.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Any, Callable

from .graph import GraphError, TypeGraph, TypedGraph, fresh_id, graph_from_json, graph_to_json
from .matching import iter_matches
from .morphism import Morphism, inclusion, morphism_problems


class RuleError(GraphError):
    """Raised for malformed rules or inapplicable matches."""


class Rule:
    __slots__ = ("name", "lhs", "rhs", "iface_nodes", "iface_edges", "_hash")

    def __init__(self, name: str, lhs: TypedGraph, rhs: TypedGraph):
        self.name = name
        self.lhs = lhs
        self.rhs = rhs
        self.iface_nodes = frozenset(n for n in lhs.nodes if n in rhs.nodes)
        self.iface_edges = frozenset(e for e in lhs.edges if e in rhs.edges)
        self._hash = None

    def __eq__(self, other: object) -> bool:
        return (isinstance(other, Rule) and self.name == other.name
                and self.lhs == other.lhs and self.rhs == other.rhs)

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash((self.name, self.lhs, self.rhs))
        return self._hash

    def __repr__(self) -> str:
        return f"Rule({self.name!r})"

    @property
    def interface(self) -> TypedGraph:
        return TypedGraph({n: self.lhs.nodes[n] for n in self.iface_nodes},
                          {e: self.lhs.edges[e] for e in self.iface_edges}, self.lhs.typegraph)

    @property
    def deleted_nodes(self) -> list[str]:
        return sorted(n for n in self.lhs.nodes if n not in self.iface_nodes)

    @property
    def deleted_edges(self) -> list[str]:
        return sorted(e for e in self.lhs.edges if e not in self.iface_edges)

    @property
    def created_nodes(self) -> list[str]:
        return sorted(n for n in self.rhs.nodes if n not in self.iface_nodes)

    @property
    def created_edges(self) -> list[str]:
        return sorted(e for e in self.rhs.edges if e not in self.iface_edges)


def rule_problems(rule: Rule) -> list[str]:
    out = []
    for n in rule.iface_nodes:
        if rule.lhs.nodes[n] != rule.rhs.nodes[n]:
            out.append(f"interface node {n!r} changes type")
    for e in rule.iface_edges:
        if rule.lhs.edges[e] != rule.rhs.edges[e]:
            out.append(f"interface edge {e!r} differs between sides")
        _, s, g = rule.lhs.edges[e]
        if s not in rule.iface_nodes or g not in rule.iface_nodes:
            out.append(f"interface edge {e!r} has an endpoint outside the interface")
    return out


def check_rule(rule: Rule) -> Rule:
    problems = rule_problems(rule)
    if problems:
        raise RuleError(f"rule {rule.name}: " + "; ".join(problems))
    return rule


def invert_rule(rule: Rule) -> Rule:
    """Swap the two sides; inverting twice gives back the original rule."""
    name = rule.name[:-3] if rule.name.endswith("^-1") else rule.name + "^-1"
    return Rule(name, rule.rhs, rule.lhs)


def deleted_image(rule: Rule, nmap: dict, emap: dict) -> tuple[set, set]:
    return ({nmap[n] for n in rule.lhs.nodes if n not in rule.iface_nodes},
            {emap[e] for e in rule.lhs.edges if e not in rule.iface_edges})


def dangling_edges(rule: Rule, host: TypedGraph, nmap: dict, emap: dict) -> list[str]:
    """Host edges that would be left without an endpoint."""
    dn, de = deleted_image(rule, nmap, emap)
    bad = []
    for n in dn:
        for e in host.incident_edges(n):
            if e not in de:
                bad.append(e)
    return sorted(set(bad))


def is_applicable(rule: Rule, host: TypedGraph, nmap: dict, emap: dict) -> bool:
    dn, de = deleted_image(rule, nmap, emap)
    if not dn:
        return True
    out_idx = host.out_index
    in_idx = host.in_index
    for n in dn:
        for idx in (out_idx, in_idx):
            for es in idx.get(n, {}).values():
                for e in es:
                    if e not in de:
                        return False
    return True


@dataclass(eq=False)
class Transformation:
    """One rule application ``G <- D -> H``."""

    rule: Rule
    match: Morphism          # L -> G
    original: TypedGraph     # G
    interface: TypedGraph    # D
    result: TypedGraph       # H
    comatch: Morphism        # R -> H
    deleted_nodes: frozenset
    deleted_edges: frozenset
    created_nodes: frozenset
    created_edges: frozenset

    @property
    def g(self) -> Morphism:
        return inclusion(self.interface, self.original)

    @property
    def h(self) -> Morphism:
        return inclusion(self.interface, self.result)

    @property
    def track(self) -> Morphism:
        """Partial morphism G -> H, defined on preserved elements."""
        return Morphism(self.original, self.result, {n: n for n in self.interface.nodes},
                        {e: e for e in self.interface.edges})

    def derived_rule(self) -> Rule:
        """The rule ``G <- D -> H`` (interface by shared ids)."""
        return Rule(f"der({self.rule.name})", self.original, self.result)


def default_namer(rule: Rule, step: int) -> Callable[[str, set], str]:
    def name(rid: str, taken: set) -> str:
        return fresh_id(f"{rule.name}#step{step}:{rid}", taken)
    return name


def keep_namer(rid: str, taken: set) -> str:
    return fresh_id(rid, taken)


def apply_raw(rule: Rule, host: TypedGraph, nmap: dict, emap: dict,
              namer: Callable[[str, set], str] = keep_namer,
              avoid: set | None = None) -> Transformation | None:
    """Apply ``rule`` at a trusted match; ``None`` when the dangling condition fails.

    New element ids come from ``namer(rhs_id, taken)``; ``taken`` includes the
    ids of ``host`` and ``avoid``.
    """
    if not is_applicable(rule, host, nmap, emap):
        return None
    dn, de = deleted_image(rule, nmap, emap)
    interface = host.remove(dn, de)
    taken_n = set(host.nodes) | (avoid or set())
    taken_e = set(host.edges) | (avoid or set())
    cn: dict[str, str] = {}
    new_nodes = {}
    for r in sorted(rule.rhs.nodes):
        if r in rule.iface_nodes:
            cn[r] = nmap[r]
        else:
            nid = namer(r, taken_n)
            taken_n.add(nid)
            cn[r] = nid
            new_nodes[nid] = rule.rhs.nodes[r]
    ce: dict[str, str] = {}
    new_edges = {}
    for r in sorted(rule.rhs.edges):
        if r in rule.iface_edges:
            ce[r] = emap[r]
        else:
            eid = namer(r, taken_e)
            taken_e.add(eid)
            ce[r] = eid
            t, s, g = rule.rhs.edges[r]
            new_edges[eid] = (t, cn[s], cn[g])
    result = interface.extend(new_nodes, new_edges)
    match = Morphism(rule.lhs, host, nmap, emap)
    comatch = Morphism(rule.rhs, result, cn, ce)
    return Transformation(rule, match, host, interface, result, comatch,
                          frozenset(dn), frozenset(de), frozenset(new_nodes), frozenset(new_edges))


def apply_rule(rule: Rule, match: Morphism, step: int = 0,
               namer: Callable[[str, set], str] | None = None) -> Transformation:
    """Apply ``rule`` at ``match``; raises :class:`RuleError` if not applicable."""
    if match.dom != rule.lhs:
        raise RuleError("match domain is not the rule's left-hand side")
    problems = morphism_problems(match)
    if problems:
        raise RuleError("invalid match: " + "; ".join(problems))
    t = apply_raw(rule, match.cod, match.nodes, match.edges, namer or default_namer(rule, step))
    if t is None:
        raise RuleError(f"rule {rule.name} not applicable: dangling edges "
                        f"{dangling_edges(rule, match.cod, match.nodes, match.edges)}")
    return t


def iter_applicable_matches(rule: Rule, host: TypedGraph):
    """Yield raw (node_map, edge_map) copies of every applicable match."""
    for n, e in iter_matches(rule.lhs, host):
        if is_applicable(rule, host, n, e):
            yield dict(n), dict(e)


def applicable_matches(rule: Rule, host: TypedGraph) -> list[Morphism]:
    from .matching import _sort_key
    res = [Morphism(rule.lhs, host, n, e) for n, e in iter_applicable_matches(rule, host)]
    res.sort(key=_sort_key(rule.lhs))
    return res


def parallel_independent(t1: Transformation, t2: Transformation) -> bool:
    """Neither transformation deletes something the other one matched."""
    if t1.original != t2.original:
        raise RuleError("transformations start from different graphs")
    m1n, m1e = t1.match.image_nodes(), t1.match.image_edges()
    m2n, m2e = t2.match.image_nodes(), t2.match.image_edges()
    return (not (m1n & t2.deleted_nodes) and not (m1e & t2.deleted_edges)
            and not (m2n & t1.deleted_nodes) and not (m2e & t1.deleted_edges))


def track_total(t: Transformation, p: Morphism) -> Morphism | None:
    """``track . p`` when every image element of ``p`` survives, else ``None``."""
    if p.image_nodes() & t.deleted_nodes or p.image_edges() & t.deleted_edges:
        return None
    return Morphism(p.dom, t.result, p.nodes, p.edges)


# JSON ---------------------------------------------------------------------

def rule_to_json(rule: Rule) -> dict:
    return {"name": rule.name, "lhs": graph_to_json(rule.lhs, False),
            "rhs": graph_to_json(rule.rhs, False)}


def rule_from_json(data: Any, typegraph: TypeGraph | None = None) -> Rule:
    if not isinstance(data, dict) or not {"name", "lhs", "rhs"} <= set(data):
        raise RuleError("rule needs name, lhs and rhs")
    lhs = graph_from_json(data["lhs"], typegraph)
    rhs = graph_from_json(data["rhs"], typegraph)
    if lhs.typegraph is None:
        lhs = lhs.with_typegraph(typegraph)
    if rhs.typegraph is None:
        rhs = rhs.with_typegraph(typegraph)
    return check_rule(Rule(str(data["name"]), lhs, rhs))


def rules_from_json(data: Any, typegraph: TypeGraph | None = None) -> list[Rule]:
    if isinstance(data, dict) and "rules" in data:
        if "typegraph" in data:
            typegraph = TypeGraph.from_json(data["typegraph"])
        data = data["rules"]
    elif isinstance(data, dict):
        data = [data]
    if not isinstance(data, list):
        raise RuleError("rules must be a list")
    out = [rule_from_json(d, typegraph) for d in data]
    if len({r.name for r in out}) != len(out):
        raise RuleError("rule names must be unique")
    return out


def rules_to_json(rules: list[Rule], typegraph: TypeGraph | None = None) -> dict:
    out: dict[str, Any] = {"rules": [rule_to_json(r) for r in rules]}
    if typegraph is not None:
        out["typegraph"] = typegraph.to_json()
    return out
