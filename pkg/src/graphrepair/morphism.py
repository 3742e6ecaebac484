"""Graph morphisms: structure- and type-preserving maps between typed graphs."""
from __future__ import annotations

from typing import Mapping

from .graph import GraphError, TypedGraph


class Morphism:
    """A (possibly partial) map ``dom -> cod`` given by node and edge id maps.

    Construction does not check anything; use :func:`morphism_problems` or
    :func:`check_morphism` on untrusted input.
    """

    __slots__ = ("dom", "cod", "nodes", "edges", "_hash", "_plan")

    def __init__(self, dom: TypedGraph, cod: TypedGraph,
                 nodes: Mapping[str, str] | None = None, edges: Mapping[str, str] | None = None):
        self.dom = dom
        self.cod = cod
        self.nodes: dict[str, str] = dict(nodes or {})
        self.edges: dict[str, str] = dict(edges or {})
        self._hash = None
        self._plan = None

    def __eq__(self, other: object) -> bool:
        return (isinstance(other, Morphism) and self.nodes == other.nodes
                and self.edges == other.edges and self.dom == other.dom and self.cod == other.cod)

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash((frozenset(self.nodes.items()), frozenset(self.edges.items()),
                               self.dom, self.cod))
        return self._hash

    def __repr__(self) -> str:
        return f"Morphism(nodes={self.nodes}, edges={self.edges})"

    def is_total(self) -> bool:
        return len(self.nodes) == len(self.dom.nodes) and len(self.edges) == len(self.dom.edges)

    def is_injective(self) -> bool:
        return (len(set(self.nodes.values())) == len(self.nodes)
                and len(set(self.edges.values())) == len(self.edges))

    def is_iso(self) -> bool:
        return (self.is_total() and self.is_injective()
                and len(self.cod.nodes) == len(self.dom.nodes)
                and len(self.cod.edges) == len(self.dom.edges))

    def image_nodes(self) -> set[str]:
        return set(self.nodes.values())

    def image_edges(self) -> set[str]:
        return set(self.edges.values())

    def inverse(self) -> "Morphism":
        return Morphism(self.cod, self.dom, {v: k for k, v in self.nodes.items()},
                        {v: k for k, v in self.edges.items()})

    def extension_plan(self) -> tuple:
        """Search plan for extending a match of ``dom`` along this (total, injective) map."""
        if self._plan is None:
            from .matching import plan_for
            self._plan = plan_for(self.cod, self.nodes.values(), self.edges.values())
        return self._plan

    def key(self) -> tuple:
        """Hashable identity of the mapping, ignoring the graphs."""
        return (tuple(sorted(self.nodes.items())), tuple(sorted(self.edges.items())))


def identity(g: TypedGraph) -> Morphism:
    return Morphism(g, g, {n: n for n in g.nodes}, {e: e for e in g.edges})


def inclusion(sub: TypedGraph, sup: TypedGraph) -> Morphism:
    """Identity-on-ids map from ``sub`` into ``sup``."""
    return Morphism(sub, sup, {n: n for n in sub.nodes}, {e: e for e in sub.edges})


def empty_morphism(g: TypedGraph) -> Morphism:
    from .graph import EMPTY
    return Morphism(EMPTY, g)


def compose(f: Morphism, g: Morphism) -> Morphism:
    """Return ``g . f`` (first ``f``, then ``g``); undefined points stay undefined."""
    if f.cod != g.dom:
        raise GraphError("cannot compose: codomain and domain differ")
    nodes = {k: g.nodes[v] for k, v in f.nodes.items() if v in g.nodes}
    edges = {k: g.edges[v] for k, v in f.edges.items() if v in g.edges}
    return Morphism(f.dom, g.cod, nodes, edges)


def morphism_problems(f: Morphism, partial: bool = False, injective: bool = True) -> list[str]:
    out = []
    dom, cod = f.dom, f.cod
    for n, m in f.nodes.items():
        if n not in dom.nodes:
            out.append(f"node {n!r} not in domain")
        elif m not in cod.nodes:
            out.append(f"node image {m!r} not in codomain")
        elif dom.nodes[n] != cod.nodes[m]:
            out.append(f"node {n!r} type {dom.nodes[n]} mapped to type {cod.nodes[m]}")
    for e, d in f.edges.items():
        if e not in dom.edges:
            out.append(f"edge {e!r} not in domain")
            continue
        if d not in cod.edges:
            out.append(f"edge image {d!r} not in codomain")
            continue
        t, s, g = dom.edges[e]
        t2, s2, g2 = cod.edges[d]
        if t != t2:
            out.append(f"edge {e!r} type {t} mapped to type {t2}")
        if f.nodes.get(s) != s2 or f.nodes.get(g) != g2:
            out.append(f"edge {e!r} endpoints not preserved")
    if not partial:
        missing_n = set(dom.nodes) - set(f.nodes)
        missing_e = set(dom.edges) - set(f.edges)
        if missing_n or missing_e:
            out.append(f"not total: unmapped {sorted(missing_n | missing_e)}")
    if injective and not f.is_injective():
        out.append("not injective")
    return out


def check_morphism(f: Morphism, partial: bool = False, injective: bool = True) -> Morphism:
    problems = morphism_problems(f, partial, injective)
    if problems:
        raise GraphError("; ".join(problems))
    return f
