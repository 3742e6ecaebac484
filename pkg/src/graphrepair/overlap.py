"""Jointly surjective overlaps of two graphs.

An overlap of ``A`` and ``B`` is a pair of injective morphisms into a common
graph that together cover it.  Up to isomorphism commuting with both
morphisms, overlaps correspond one-to-one to *correspondences*: partial
injective, type-respecting matchings between elements of ``A`` and ``B``
where an edge pair is only allowed if its endpoints are paired the same way.
Enumerating correspondences therefore yields exactly one representative per
equivalence class.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator

from .graph import TypedGraph, fresh_id
from .morphism import Morphism
from .rewrite import Rule, apply_raw, is_applicable


@dataclass(frozen=True)
class Correspondence:
    """Glued pairs, as tuples of ``(b_id, a_id)`` sorted by ``b_id``."""

    nodes: tuple
    edges: tuple

    def node_map(self) -> dict:
        return dict(self.nodes)

    def edge_map(self) -> dict:
        return dict(self.edges)


def iter_correspondences(a: TypedGraph, b: TypedGraph,
                         forced_nodes: dict | None = None, forced_edges: dict | None = None,
                         blocked_nodes=frozenset(), blocked_edges=frozenset()) -> Iterator[Correspondence]:
    """Enumerate correspondences between ``a`` and ``b``.

    ``forced_*`` map ``b`` ids to the ``a`` ids they must be glued with; other
    ``b`` elements may not be glued to anything in ``blocked_*``.
    """
    forced_nodes = forced_nodes or {}
    forced_edges = forced_edges or {}
    bnodes = sorted(b.nodes)
    bedges = sorted(b.edges)
    a_by_type: dict[str, list[str]] = {}
    for n in sorted(a.nodes):
        if n not in blocked_nodes:
            a_by_type.setdefault(a.nodes[n], []).append(n)
    a_edges_by_type: dict[str, list[str]] = {}
    for e in sorted(a.edges):
        if e not in blocked_edges:
            a_edges_by_type.setdefault(a.edges[e][0], []).append(e)

    nmap: dict[str, str] = {}
    used_a: set[str] = set(forced_nodes.values())

    def edges_rec(i, emap, used_e):
        if i == len(bedges):
            yield Correspondence(tuple(sorted(nmap.items())), tuple(sorted(emap.items())))
            return
        be = bedges[i]
        if be in forced_edges:
            emap[be] = forced_edges[be]
            yield from edges_rec(i + 1, emap, used_e)
            del emap[be]
            return
        yield from edges_rec(i + 1, emap, used_e)
        t, s, g = b.edges[be]
        if s in nmap and g in nmap:
            sa, ga = nmap[s], nmap[g]
            for ae in a_edges_by_type.get(t, ()):
                if ae in used_e:
                    continue
                _, s2, g2 = a.edges[ae]
                if s2 == sa and g2 == ga:
                    emap[be] = ae
                    used_e.add(ae)
                    yield from edges_rec(i + 1, emap, used_e)
                    used_e.discard(ae)
                    del emap[be]

    def nodes_rec(i):
        if i == len(bnodes):
            yield from edges_rec(0, {}, set(forced_edges.values()))
            return
        bn = bnodes[i]
        if bn in forced_nodes:
            nmap[bn] = forced_nodes[bn]
            yield from nodes_rec(i + 1)
            del nmap[bn]
            return
        yield from nodes_rec(i + 1)
        for an in a_by_type.get(b.nodes[bn], ()):
            if an in used_a:
                continue
            nmap[bn] = an
            used_a.add(an)
            yield from nodes_rec(i + 1)
            used_a.discard(an)
            del nmap[bn]

    yield from nodes_rec(0)


def glue(a: TypedGraph, b: TypedGraph, corr: Correspondence,
         glued_name=None) -> tuple[TypedGraph, Morphism, Morphism]:
    """Build the overlap graph of a correspondence and its two embeddings.

    ``a`` keeps its ids unless ``glued_name(a_id, b_id)`` renames glued
    elements; unglued ``b`` elements keep their ids where that does not clash.
    """
    cn = corr.node_map()
    ce = corr.edge_map()
    a_to_n: dict[str, str] = {}
    nodes: dict[str, str] = {}
    glued_a_nodes = {v: k for k, v in cn.items()}
    glued_a_edges = {v: k for k, v in ce.items()}
    for n in sorted(a.nodes):
        nid = n
        if glued_name and n in glued_a_nodes:
            nid = glued_name(n, glued_a_nodes[n])
            if nid != n:
                nid = fresh_id(nid, set(a.nodes) | set(nodes))
        a_to_n[n] = nid
        nodes[nid] = a.nodes[n]
    b_to_n: dict[str, str] = {}
    for n in sorted(b.nodes):
        if n in cn:
            b_to_n[n] = a_to_n[cn[n]]
        else:
            nid = fresh_id(n, nodes)
            b_to_n[n] = nid
            nodes[nid] = b.nodes[n]
    a_to_e: dict[str, str] = {}
    edges: dict[str, tuple] = {}
    for e in sorted(a.edges):
        eid = e
        if glued_name and e in glued_a_edges:
            eid = glued_name(e, glued_a_edges[e])
            if eid != e:
                eid = fresh_id(eid, set(a.edges) | set(edges))
        a_to_e[e] = eid
        t, s, g = a.edges[e]
        edges[eid] = (t, a_to_n[s], a_to_n[g])
    b_to_e: dict[str, str] = {}
    for e in sorted(b.edges):
        if e in ce:
            b_to_e[e] = a_to_e[ce[e]]
        else:
            eid = fresh_id(e, edges)
            b_to_e[e] = eid
            t, s, g = b.edges[e]
            edges[eid] = (t, b_to_n[s], b_to_n[g])
    ab = TypedGraph(nodes, edges, a.typegraph or b.typegraph)
    return ab, Morphism(a, ab, a_to_n, a_to_e), Morphism(b, ab, b_to_n, b_to_e)


def slash_name(a_id: str, b_id: str) -> str:
    return a_id if a_id == b_id else f"{a_id}/{b_id}"


@dataclass(eq=False)
class Overlap:
    """A representative ``(i_a: A -> AB, i_b: B -> AB)`` of an overlap class."""

    left: Morphism
    right: Morphism
    correspondence: Correspondence
    branch: str | None = None   # "pre" or "con" for rule overlaps
    witness: Morphism | None = None  # B -> D for "con" overlaps

    @property
    def graph(self) -> TypedGraph:
        return self.left.cod


def enumerate_overlap_classes(a: TypedGraph, b: TypedGraph) -> list[Overlap]:
    """One representative per equivalence class of jointly surjective overlaps."""
    out = []
    for corr in iter_correspondences(a, b):
        ab, ia, ib = glue(a, b, corr, slash_name)
        out.append(Overlap(ia, ib, corr))
    return out


def rule_overlap_classes(rule: Rule, premise: TypedGraph) -> tuple[list[Overlap], list[Overlap]]:
    """Split the applicable overlaps of the rule's left side with ``premise``.

    Returns ``(pre, con)``: in ``pre`` the premise image meets an element the
    rule deletes, in ``con`` it does not and ``witness`` is the premise
    factored through the intermediate graph.
    """
    pre, con = [], []
    deleted_n = set(rule.deleted_nodes)
    deleted_e = set(rule.deleted_edges)
    for ov in enumerate_overlap_classes(rule.lhs, premise):
        il, ip = ov.left, ov.right
        if not is_applicable(rule, ov.graph, il.nodes, il.edges):
            continue
        dn = {il.nodes[n] for n in deleted_n}
        de = {il.edges[e] for e in deleted_e}
        if ip.image_nodes() & dn or ip.image_edges() & de:
            ov.branch = "pre"
            pre.append(ov)
        else:
            ov.branch = "con"
            d = ov.graph.remove(dn, de)
            ov.witness = Morphism(premise, d, ip.nodes, ip.edges)
            con.append(ov)
    return pre, con


def induced_transformation(rule: Rule, ov: Overlap):
    """Apply the rule to the overlap graph at the left embedding."""
    return apply_raw(rule, ov.graph, ov.left.nodes, ov.left.edges)
