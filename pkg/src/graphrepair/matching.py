"""Injective pattern matching (subgraph monomorphisms) by backtracking.

The search only touches the host through three indexes: outgoing edges of a
node by edge type, incoming edges by edge type, and nodes by type.  Callers may
pass a ``reads`` set that collects the index keys consulted, which lets the
ranking code tell exactly which cached results a graph change can affect.
Keys are ``("o", node, etype)``, ``("i", node, etype)`` and ``("t", ntype)``.
"""
from __future__ import annotations

from typing import Iterator, Mapping

from .graph import GraphError, TypedGraph
from .morphism import Morphism


def _compile(pattern: TypedGraph, anchored_nodes: frozenset, anchored_edges: frozenset) -> list:
    """Search plan: a list of ('edge', eid) and ('node', nid, type, source) steps."""
    key = ("plan", anchored_nodes, anchored_edges)
    plan = pattern.cache.get(key)
    if plan is not None:
        return plan
    placed = set(anchored_nodes)
    done_edges = set(anchored_edges)
    steps: list = []

    def ready_edges():
        for eid in sorted(pattern.edges):
            if eid in done_edges:
                continue
            _, s, g = pattern.edges[eid]
            if s in placed and g in placed:
                done_edges.add(eid)
                steps.append(("edge", eid))

    ready_edges()
    remaining = sorted(set(pattern.nodes) - placed)
    degree = {n: 0 for n in pattern.nodes}
    for _, s, g in pattern.edges.values():
        degree[s] += 1
        degree[g] += 1
    while remaining:
        best = None
        best_score = None
        for n in remaining:
            links = 0
            source = None
            for eid in sorted(pattern.edges):
                t, s, g = pattern.edges[eid]
                if s in placed and g == n:
                    links += 1
                    source = source or ("o", s, t)
                elif g in placed and s == n:
                    links += 1
                    source = source or ("i", g, t)
            score = (links > 0, links, degree[n])
            if best_score is None or score > best_score:
                best, best_score, best_source = n, score, source
        if best_source is None:
            best_source = ("t", pattern.nodes[best], None)
        steps.append(("node", best, pattern.nodes[best], best_source))
        placed.add(best)
        remaining.remove(best)
        ready_edges()
    pattern.cache[key] = steps
    return steps


def plan_for(pattern: TypedGraph, anchored_nodes, anchored_edges) -> tuple:
    """Compiled plan with edge data inlined, for :func:`search`."""
    key = ("fast", frozenset(anchored_nodes), frozenset(anchored_edges))
    plan = pattern.cache.get(key)
    if plan is None:
        plan = []
        for step in _compile(pattern, frozenset(anchored_nodes), frozenset(anchored_edges)):
            if step[0] == "edge":
                t, s, g = pattern.edges[step[1]]
                plan.append((True, step[1], t, s, g))
            else:
                plan.append((False,) + step[1:])
        plan = tuple(plan)
        pattern.cache[key] = plan
    return plan


def search(plan: tuple, host: TypedGraph, nmap: dict, emap: dict, reads, visit) -> bool:
    """Depth-first search calling ``visit(nmap, emap)`` on each complete match.

    Stops and returns ``True`` as soon as ``visit`` returns a true value.
    ``nmap``/``emap`` hold the anchor (already consistent, with edge endpoints
    included) and are modified in place.
    """
    used_n = set(nmap.values())
    used_e = set(emap.values())
    out_idx = host.out_index
    in_idx = host.in_index
    by_type = host.nodes_by_type
    hnodes = host.nodes
    hedges = host.edges
    n = len(plan)

    def rec(i):
        if i == n:
            return visit(nmap, emap)
        step = plan[i]
        if step[0]:
            _, pe, t, s, g = step
            hs = nmap[s]
            hg = nmap[g]
            if reads is not None:
                reads.add(("o", hs, t))
            for he in out_idx[hs].get(t, ()):
                if hedges[he][2] == hg and he not in used_e:
                    emap[pe] = he
                    used_e.add(he)
                    if rec(i + 1):
                        return True
                    used_e.discard(he)
            return False
        _, pn, ptype, source = step
        kind = source[0]
        if kind == "t":
            if reads is not None:
                reads.add(("t", ptype))
            cands = by_type.get(ptype, ())
        else:
            hu = nmap[source[1]]
            t = source[2]
            if kind == "o":
                if reads is not None:
                    reads.add(("o", hu, t))
                es = out_idx[hu].get(t, ())
                cands = [hedges[he][2] for he in es] if len(es) < 2 else sorted({hedges[he][2] for he in es})
            else:
                if reads is not None:
                    reads.add(("i", hu, t))
                es = in_idx[hu].get(t, ())
                cands = [hedges[he][1] for he in es] if len(es) < 2 else sorted({hedges[he][1] for he in es})
        for hn in cands:
            if hn in used_n or hnodes[hn] != ptype:
                continue
            nmap[pn] = hn
            used_n.add(hn)
            if rec(i + 1):
                return True
            used_n.discard(hn)
        return False

    return rec(0)


def iter_matches(pattern: TypedGraph, host: TypedGraph,
                 nodes: Mapping[str, str] | None = None,
                 edges: Mapping[str, str] | None = None,
                 reads: set | None = None) -> Iterator[tuple[dict, dict]]:
    """Yield ``(node_map, edge_map)`` for every injective match extending the anchor.

    The anchor is trusted (see :func:`find_monomorphisms` for the checked
    variant).  The yielded dicts are reused between iterations; copy them if
    they must outlive the next step of the iterator.
    """
    nmap = dict(nodes or {})
    emap = dict(edges or {})
    # endpoints of anchored edges are anchored too
    for pe, he in list(emap.items()):
        _, s, g = pattern.edges[pe]
        _, hs, hg = host.edges[he]
        if nmap.setdefault(s, hs) != hs or nmap.setdefault(g, hg) != hg:
            return
    used_n = set(nmap.values())
    used_e = set(emap.values())
    if len(used_n) != len(nmap) or len(used_e) != len(emap):
        return
    steps = _compile(pattern, frozenset(nmap), frozenset(emap))
    out_idx = host.out_index
    in_idx = host.in_index
    by_type = host.nodes_by_type
    hnodes = host.nodes
    hedges = host.edges
    pedges = pattern.edges
    nsteps = len(steps)

    def rec(i):
        if i == nsteps:
            yield nmap, emap
            return
        step = steps[i]
        if step[0] == "edge":
            pe = step[1]
            t, s, g = pedges[pe]
            hs = nmap[s]
            hg = nmap[g]
            if reads is not None:
                reads.add(("o", hs, t))
            for he in out_idx[hs].get(t, ()):
                if hedges[he][2] == hg and he not in used_e:
                    emap[pe] = he
                    used_e.add(he)
                    yield from rec(i + 1)
                    used_e.discard(he)
            emap.pop(pe, None)
            return
        _, pn, ptype, source = step
        kind = source[0]
        if kind == "t":
            if reads is not None:
                reads.add(("t", ptype))
            cands = by_type.get(ptype, ())
        else:
            _, pu, t = source
            hu = nmap[pu]
            if kind == "o":
                if reads is not None:
                    reads.add(("o", hu, t))
                cands = sorted({hedges[he][2] for he in out_idx[hu].get(t, ())})
            else:
                if reads is not None:
                    reads.add(("i", hu, t))
                cands = sorted({hedges[he][1] for he in in_idx[hu].get(t, ())})
        for hn in cands:
            if hn in used_n or hnodes[hn] != ptype:
                continue
            nmap[pn] = hn
            used_n.add(hn)
            yield from rec(i + 1)
            used_n.discard(hn)
        nmap.pop(pn, None)

    yield from rec(0)


def _check_anchor(pattern: TypedGraph, host: TypedGraph, nodes: Mapping[str, str],
                  edges: Mapping[str, str]) -> None:
    for p, h in nodes.items():
        if p not in pattern.nodes:
            raise GraphError(f"anchor node {p!r} not in pattern")
        if h not in host.nodes:
            raise GraphError(f"anchor target {h!r} not in host")
        if pattern.nodes[p] != host.nodes[h]:
            raise GraphError(f"anchor maps {p!r}:{pattern.nodes[p]} to {h!r}:{host.nodes[h]}")
    for p, h in edges.items():
        if p not in pattern.edges:
            raise GraphError(f"anchor edge {p!r} not in pattern")
        if h not in host.edges:
            raise GraphError(f"anchor target edge {h!r} not in host")
        if pattern.edges[p][0] != host.edges[h][0]:
            raise GraphError(f"anchor edge {p!r} mapped to an edge of another type")
    if len(set(nodes.values())) != len(nodes) or len(set(edges.values())) != len(edges):
        raise GraphError("anchor is not injective")


def _anchor_maps(anchor) -> tuple[dict, dict]:
    if anchor is None:
        return {}, {}
    if isinstance(anchor, Morphism):
        return dict(anchor.nodes), dict(anchor.edges)
    nodes, edges = anchor
    return dict(nodes or {}), dict(edges or {})


def _sort_key(pattern: TypedGraph):
    pn = sorted(pattern.nodes)
    pe = sorted(pattern.edges)
    return lambda m: (tuple(m.nodes[n] for n in pn), tuple(m.edges[e] for e in pe))


def find_monomorphisms(pattern: TypedGraph, host: TypedGraph, anchor=None) -> list[Morphism]:
    """All injective morphisms ``pattern -> host`` extending ``anchor``.

    ``anchor`` is a partial :class:`Morphism` or a ``(node_map, edge_map)``
    pair.  Results are sorted by the tuple of host ids assigned to the pattern
    elements in id order, so the output is deterministic.
    """
    nodes, edges = _anchor_maps(anchor)
    _check_anchor(pattern, host, nodes, edges)
    res = [Morphism(pattern, host, n, e) for n, e in
           ((dict(a), dict(b)) for a, b in iter_matches(pattern, host, nodes, edges))]
    res.sort(key=_sort_key(pattern))
    return res


def count_monomorphisms(pattern: TypedGraph, host: TypedGraph, anchor=None) -> int:
    nodes, edges = _anchor_maps(anchor)
    return sum(1 for _ in iter_matches(pattern, host, nodes, edges))


def has_monomorphism(pattern: TypedGraph, host: TypedGraph, anchor=None) -> bool:
    nodes, edges = _anchor_maps(anchor)
    for _ in iter_matches(pattern, host, nodes, edges):
        return True
    return False


def iter_isomorphisms(a: TypedGraph, b: TypedGraph, nodes=None, edges=None) -> Iterator[tuple[dict, dict]]:
    """Isomorphisms ``a -> b`` extending the given partial maps."""
    if len(a.nodes) != len(b.nodes) or len(a.edges) != len(b.edges):
        return
    yield from iter_matches(a, b, nodes, edges)


def graphs_isomorphic(a: TypedGraph, b: TypedGraph) -> bool:
    for _ in iter_isomorphisms(a, b):
        return True
    return False
