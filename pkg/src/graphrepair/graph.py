"""Typed multigraphs over a fixed type graph, plus JSON I/O and validation."""
from __future__ import annotations

from typing import Any, Iterable, Mapping


class GraphError(ValueError):
    """Raised for malformed or ill-typed graphs."""


class TypeGraph:
    """Allowed node types and edge types (edge type name -> (src type, tgt type))."""

    __slots__ = ("node_types", "edge_types", "_hash")

    def __init__(self, node_types: Iterable[str], edge_types: Mapping[str, tuple[str, str]]):
        self.node_types = frozenset(node_types)
        self.edge_types = dict(edge_types)
        self._hash = None

    def __eq__(self, other: object) -> bool:
        return (isinstance(other, TypeGraph) and self.node_types == other.node_types
                and self.edge_types == other.edge_types)

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash((self.node_types, frozenset(self.edge_types.items())))
        return self._hash

    def __repr__(self) -> str:
        return f"TypeGraph({sorted(self.node_types)}, {self.edge_types})"

    def to_json(self) -> dict:
        return {
            "nodes": sorted(self.node_types),
            "edges": [{"type": t, "src": s, "tgt": g}
                      for t, (s, g) in sorted(self.edge_types.items())],
        }

    @classmethod
    def from_json(cls, data: Any) -> "TypeGraph":
        if not isinstance(data, dict):
            raise GraphError("typegraph must be an object")
        try:
            nodes = [str(n) for n in data.get("nodes", [])]
            edges = {}
            for e in data.get("edges", []):
                if e["type"] in edges:
                    raise GraphError(f"duplicate edge type {e['type']!r}")
                edges[str(e["type"])] = (str(e["src"]), str(e["tgt"]))
        except (KeyError, TypeError) as exc:
            raise GraphError(f"malformed typegraph: {exc}") from None
        for t, (s, g) in edges.items():
            if s not in nodes or g not in nodes:
                raise GraphError(f"edge type {t!r} refers to an unknown node type")
        return cls(nodes, edges)


class TypedGraph:
    """A directed multigraph with typed nodes and edges.

    ``nodes`` maps node id -> node type, ``edges`` maps edge id ->
    ``(edge type, source id, target id)``.  Instances are treated as immutable;
    adjacency indexes are built lazily and cached.
    """

    __slots__ = ("nodes", "edges", "typegraph", "_out", "_in", "_by_type", "_hash", "cache",
                 "__weakref__")

    def __init__(self, nodes: Mapping[str, str] | None = None,
                 edges: Mapping[str, tuple[str, str, str]] | None = None,
                 typegraph: TypeGraph | None = None):
        self.nodes: dict[str, str] = dict(nodes or {})
        self.edges: dict[str, tuple[str, str, str]] = {k: tuple(v) for k, v in (edges or {}).items()}
        self.typegraph = typegraph
        self._out = None
        self._in = None
        self._by_type = None
        self._hash = None
        self.cache: dict = {}

    # structure ---------------------------------------------------------
    def _build_index(self) -> None:
        out: dict[str, dict[str, list[str]]] = {n: {} for n in self.nodes}
        inc: dict[str, dict[str, list[str]]] = {n: {} for n in self.nodes}
        for eid in sorted(self.edges):
            t, s, g = self.edges[eid]
            out.setdefault(s, {}).setdefault(t, []).append(eid)
            inc.setdefault(g, {}).setdefault(t, []).append(eid)
        by_type: dict[str, list[str]] = {}
        for nid in sorted(self.nodes):
            by_type.setdefault(self.nodes[nid], []).append(nid)
        self._out = {n: {t: tuple(v) for t, v in d.items()} for n, d in out.items()}
        self._in = {n: {t: tuple(v) for t, v in d.items()} for n, d in inc.items()}
        self._by_type = {t: tuple(v) for t, v in by_type.items()}

    @property
    def out_index(self) -> dict[str, dict[str, tuple[str, ...]]]:
        if self._out is None:
            self._build_index()
        return self._out

    @property
    def in_index(self) -> dict[str, dict[str, tuple[str, ...]]]:
        if self._in is None:
            self._build_index()
        return self._in

    @property
    def nodes_by_type(self) -> dict[str, tuple[str, ...]]:
        if self._by_type is None:
            self._build_index()
        return self._by_type

    def incident_edges(self, node: str) -> list[str]:
        res = []
        for d in (self.out_index.get(node, {}), self.in_index.get(node, {})):
            for es in d.values():
                res.extend(es)
        return sorted(set(res))

    def size(self) -> int:
        return len(self.nodes) + len(self.edges)

    def is_empty(self) -> bool:
        return not self.nodes and not self.edges

    def all_ids(self) -> set[str]:
        return set(self.nodes) | set(self.edges)

    # value semantics ---------------------------------------------------
    def __eq__(self, other: object) -> bool:
        return (isinstance(other, TypedGraph) and self.nodes == other.nodes
                and self.edges == other.edges)

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash((frozenset(self.nodes.items()), frozenset(self.edges.items())))
        return self._hash

    def __repr__(self) -> str:
        es = ", ".join(f"{e}:{s}-{t}->{g}" for e, (t, s, g) in sorted(self.edges.items()))
        ns = ", ".join(f"{n}:{t}" for n, t in sorted(self.nodes.items()))
        return f"TypedGraph({{{ns}}}, {{{es}}})"

    # construction helpers ---------------------------------------------
    def remove(self, nodes: Iterable[str] = (), edges: Iterable[str] = ()) -> "TypedGraph":
        dn, de = set(nodes), set(edges)
        return TypedGraph({n: t for n, t in self.nodes.items() if n not in dn},
                          {e: v for e, v in self.edges.items() if e not in de},
                          self.typegraph)

    def extend(self, nodes: Mapping[str, str] | None = None,
               edges: Mapping[str, tuple[str, str, str]] | None = None) -> "TypedGraph":
        ns = dict(self.nodes)
        es = dict(self.edges)
        for n, t in (nodes or {}).items():
            if n in ns:
                raise GraphError(f"node id {n!r} already present")
            ns[n] = t
        for e, v in (edges or {}).items():
            if e in es:
                raise GraphError(f"edge id {e!r} already present")
            es[e] = tuple(v)
        return TypedGraph(ns, es, self.typegraph)

    def with_typegraph(self, typegraph: TypeGraph | None) -> "TypedGraph":
        return TypedGraph(self.nodes, self.edges, typegraph)


EMPTY = TypedGraph()


def fresh_id(base: str, taken) -> str:
    """Return ``base`` or a primed variant that is not in ``taken``."""
    cand = base
    while cand in taken:
        cand += "'"
    return cand


def validate_graph(g: TypedGraph, typegraph: TypeGraph | None = None) -> list[str]:
    """Return a list of diagnostics; empty means the graph is well-formed and well-typed."""
    tg = typegraph or g.typegraph
    problems = []
    for n, t in sorted(g.nodes.items()):
        if not isinstance(n, str) or not isinstance(t, str):
            problems.append(f"node {n!r}: ids and types must be strings")
        elif tg is not None and t not in tg.node_types:
            problems.append(f"node {n!r}: unknown node type {t!r}")
    for e, v in sorted(g.edges.items()):
        if len(v) != 3:
            problems.append(f"edge {e!r}: expected (type, src, tgt)")
            continue
        t, s, d = v
        if s not in g.nodes:
            problems.append(f"edge {e!r}: dangling source {s!r}")
        if d not in g.nodes:
            problems.append(f"edge {e!r}: dangling target {d!r}")
        if tg is None or s not in g.nodes or d not in g.nodes:
            continue
        if t not in tg.edge_types:
            problems.append(f"edge {e!r}: unknown edge type {t!r}")
            continue
        st, dt = tg.edge_types[t]
        if g.nodes[s] != st or g.nodes[d] != dt:
            problems.append(f"edge {e!r}: type {t!r} expects {st}->{dt}, "
                            f"got {g.nodes[s]}->{g.nodes[d]}")
    return problems


def check_graph(g: TypedGraph, typegraph: TypeGraph | None = None) -> TypedGraph:
    problems = validate_graph(g, typegraph)
    if problems:
        raise GraphError("; ".join(problems))
    return g


# JSON ---------------------------------------------------------------------

def graph_to_json(g: TypedGraph, with_typegraph: bool = True) -> dict:
    out: dict[str, Any] = {
        "nodes": [{"id": n, "type": t} for n, t in sorted(g.nodes.items())],
        "edges": [{"id": e, "type": t, "src": s, "tgt": d}
                  for e, (t, s, d) in sorted(g.edges.items())],
    }
    if with_typegraph and g.typegraph is not None:
        out["typegraph"] = g.typegraph.to_json()
    return out


def graph_from_json(data: Any, typegraph: TypeGraph | None = None, check: bool = True) -> TypedGraph:
    """Parse a graph object; a ``typegraph`` key overrides the given one."""
    if not isinstance(data, dict):
        raise GraphError("graph must be an object")
    if "typegraph" in data:
        typegraph = TypeGraph.from_json(data["typegraph"])
    nodes: dict[str, str] = {}
    edges: dict[str, tuple[str, str, str]] = {}
    try:
        for n in data.get("nodes", []):
            if n["id"] in nodes:
                raise GraphError(f"duplicate node id {n['id']!r}")
            nodes[str(n["id"])] = str(n["type"])
        for e in data.get("edges", []):
            if e["id"] in edges:
                raise GraphError(f"duplicate edge id {e['id']!r}")
            edges[str(e["id"])] = (str(e["type"]), str(e["src"]), str(e["tgt"]))
    except (KeyError, TypeError) as exc:
        raise GraphError(f"malformed graph: missing {exc}") from None
    g = TypedGraph(nodes, edges, typegraph)
    if check:
        check_graph(g)
    return g
