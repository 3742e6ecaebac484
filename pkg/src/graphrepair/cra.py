"""Class-responsibility-assignment case study: type graph, rules, constraints, models."""
from __future__ import annotations

import itertools
import json
import random
from typing import Any

from .condition import (
    FALSE, Constraint, Exists, ForAll, Or, count_violations, normalize_universal,
)
from .graph import EMPTY, GraphError, TypeGraph, TypedGraph
from .morphism import Morphism, inclusion
from .rewrite import Rule

CLASS, METHOD, ATTRIBUTE = "Class", "Method", "Attribute"
CONTAINS_METHOD = "contains-method"
CONTAINS_ATTRIBUTE = "contains-attribute"
USES_ATTRIBUTE = "uses-attribute"
USES_METHOD = "uses-method"

CRA_TYPES = TypeGraph(
    [CLASS, METHOD, ATTRIBUTE],
    {
        CONTAINS_METHOD: (CLASS, METHOD),
        CONTAINS_ATTRIBUTE: (CLASS, ATTRIBUTE),
        USES_ATTRIBUTE: (METHOD, ATTRIBUTE),
        USES_METHOD: (METHOD, METHOD),
    },
)


def _graph(nodes: dict, edges: list) -> TypedGraph:
    return TypedGraph(nodes, {eid: (t, s, g) for eid, t, s, g in edges}, CRA_TYPES)


def _ext(base: TypedGraph, nodes: dict, edges: list) -> Morphism:
    """Inclusion of ``base`` into ``base`` plus the given elements."""
    big = base.extend(nodes, {eid: (t, s, g) for eid, t, s, g in edges})
    return inclusion(base, big)


def move_method_rule() -> Rule:
    lhs = _graph({"c1": CLASS, "c2": CLASS, "m": METHOD}, [("e1", CONTAINS_METHOD, "c1", "m")])
    rhs = _graph({"c1": CLASS, "c2": CLASS, "m": METHOD}, [("e2", CONTAINS_METHOD, "c2", "m")])
    return Rule("moveMethod", lhs, rhs)


def move_attribute_rule() -> Rule:
    lhs = _graph({"c1": CLASS, "c2": CLASS, "a": ATTRIBUTE}, [("e1", CONTAINS_ATTRIBUTE, "c1", "a")])
    rhs = _graph({"c1": CLASS, "c2": CLASS, "a": ATTRIBUTE}, [("e2", CONTAINS_ATTRIBUTE, "c2", "a")])
    return Rule("moveAttribute", lhs, rhs)


def cra_rules() -> list[Rule]:
    return [move_method_rule(), move_attribute_rule()]


def _forbidden(name: str, pattern: TypedGraph, kind: str = "weak") -> Constraint:
    return normalize_universal(ForAll(inclusion(EMPTY, pattern), FALSE), name, kind)


def _feature_in_two_classes(name: str, ftype: str, etype: str) -> Constraint:
    p = _graph({"c1": CLASS, "c2": CLASS, "f": ftype},
               [("e1", etype, "c1", "f"), ("e2", etype, "c2", "f")])
    return _forbidden(name, p, "hard")


def h1() -> Constraint:
    """A method is contained in at most one class."""
    return _feature_in_two_classes("h1", METHOD, CONTAINS_METHOD)


def h2() -> Constraint:
    """An attribute is contained in at most one class."""
    return _feature_in_two_classes("h2", ATTRIBUTE, CONTAINS_ATTRIBUTE)


def w1() -> Constraint:
    """Two methods of a class share an attribute of that class."""
    p = _graph({"c": CLASS, "m1": METHOD, "m2": METHOD},
               [("e1", CONTAINS_METHOD, "c", "m1"), ("e2", CONTAINS_METHOD, "c", "m2")])
    q = _ext(p, {"a": ATTRIBUTE}, [("e3", CONTAINS_ATTRIBUTE, "c", "a"),
                                   ("e4", USES_ATTRIBUTE, "m1", "a"),
                                   ("e5", USES_ATTRIBUTE, "m2", "a")])
    return normalize_universal(ForAll(inclusion(EMPTY, p), Exists(q)), "w1")


def w2() -> Constraint:
    """A method does not use an attribute of another class."""
    p = _graph({"c1": CLASS, "c2": CLASS, "m": METHOD, "a": ATTRIBUTE},
               [("e1", CONTAINS_METHOD, "c1", "m"), ("e2", USES_ATTRIBUTE, "m", "a"),
                ("e3", CONTAINS_ATTRIBUTE, "c2", "a")])
    return _forbidden("w2", p)


def w3() -> Constraint:
    """Two methods of a class use each other in at least one direction."""
    p = _graph({"c": CLASS, "m1": METHOD, "m2": METHOD},
               [("e1", CONTAINS_METHOD, "c", "m1"), ("e2", CONTAINS_METHOD, "c", "m2")])
    fwd = _ext(p, {}, [("e3", USES_METHOD, "m1", "m2")])
    bwd = _ext(p, {}, [("e3", USES_METHOD, "m2", "m1")])
    return normalize_universal(ForAll(inclusion(EMPTY, p), Or((Exists(fwd), Exists(bwd)))), "w3")


def w4() -> Constraint:
    """A method does not use a method of another class."""
    p = _graph({"c1": CLASS, "c2": CLASS, "m1": METHOD, "m2": METHOD},
               [("e1", CONTAINS_METHOD, "c1", "m1"), ("e2", USES_METHOD, "m1", "m2"),
                ("e3", CONTAINS_METHOD, "c2", "m2")])
    return _forbidden("w4", p)


def w5() -> Constraint:
    """Every method uses every attribute of its own class."""
    p = _graph({"c": CLASS, "m": METHOD, "a": ATTRIBUTE},
               [("e1", CONTAINS_METHOD, "c", "m"), ("e2", CONTAINS_ATTRIBUTE, "c", "a")])
    q = _ext(p, {}, [("e3", USES_ATTRIBUTE, "m", "a")])
    return normalize_universal(ForAll(inclusion(EMPTY, p), Exists(q)), "w5")


def base_constraints() -> list[Constraint]:
    return [h1(), h2(), w1(), w2()]


def extended_constraints() -> list[Constraint]:
    """Cohesion/coupling metric as constraints: same-class features must depend, cross-class must not."""
    return [h1(), h2(), w3(), w4(), w5(), w2()]


def cart_session_model() -> TypedGraph:
    """Small shop model with a cart, a session and items."""
    classes = {"Cart": (["print", "addItem", "checkout"], ["items"]),
               "Session": (["logout"], ["username", "cart"]),
               "Item": (["itemTotal", "itemSingle"], ["quantity", "price"])}
    uses = {"print": ["items", "username"], "addItem": ["items"], "checkout": ["username"],
            "logout": ["username"], "itemTotal": ["quantity", "price"],
            "itemSingle": ["quantity", "price"]}
    nodes: dict[str, str] = {}
    edges = []
    for c, (ms, attrs) in classes.items():
        nodes[c] = CLASS
        for m in ms:
            nodes[m] = METHOD
            edges.append((f"{c}->{m}", CONTAINS_METHOD, c, m))
        for a in attrs:
            nodes[a] = ATTRIBUTE
            edges.append((f"{c}->{a}", CONTAINS_ATTRIBUTE, c, a))
    for m, attrs in uses.items():
        for a in attrs:
            edges.append((f"{m}->{a}", USES_ATTRIBUTE, m, a))
    return _graph(nodes, edges)


# synthetic models ---------------------------------------------------------

METHODS_PER_CLASS = 5
ATTRIBUTES_PER_CLASS = 5
INTRA_USES = 2
INTER_USES = 3


def synthetic_node_count(n_classes: int, with_root: bool = False) -> int:
    """Typed node count of :func:`generate_synthetic`; a container root adds one."""
    return n_classes * (1 + METHODS_PER_CLASS + ATTRIBUTES_PER_CLASS) + (1 if with_root else 0)


def generate_synthetic(n_classes: int, seed: int = 0) -> TypedGraph:
    """Classes with 5 methods and 5 attributes each.

    Every method uses 2 attributes of its own class and 3 attributes of other
    classes, chosen uniformly with ``random.Random(seed)``.
    """
    if n_classes < 2:
        raise ValueError("need at least two classes for inter-class uses")
    rng = random.Random(seed)
    nodes: dict[str, str] = {}
    edges = []
    attrs_of = {}
    for i in range(n_classes):
        c = f"C{i}"
        nodes[c] = CLASS
        attrs_of[c] = [f"{c}.a{j}" for j in range(ATTRIBUTES_PER_CLASS)]
        for a in attrs_of[c]:
            nodes[a] = ATTRIBUTE
            edges.append((f"{c}->{a}", CONTAINS_ATTRIBUTE, c, a))
        for j in range(METHODS_PER_CLASS):
            m = f"{c}.m{j}"
            nodes[m] = METHOD
            edges.append((f"{c}->{m}", CONTAINS_METHOD, c, m))
    for i in range(n_classes):
        c = f"C{i}"
        foreign = [a for k, as_ in attrs_of.items() if k != c for a in as_]
        for j in range(METHODS_PER_CLASS):
            m = f"{c}.m{j}"
            for a in rng.sample(attrs_of[c], INTRA_USES) + rng.sample(foreign, INTER_USES):
                edges.append((f"{m}->{a}", USES_ATTRIBUTE, m, a))
    return _graph(nodes, edges)


# feature models -----------------------------------------------------------

def feature_model_from_json(data: Any) -> TypedGraph:
    """One class per feature; methods and attributes linked by their dependencies."""
    if data is None:
        data = {}
    if not isinstance(data, dict) or not isinstance(data.get("features", []), list):
        raise GraphError("feature model needs a 'features' list")
    kinds = {}
    for f in data.get("features", []):
        try:
            name, kind = str(f["name"]), str(f["kind"]).lower()
        except (KeyError, TypeError):
            raise GraphError("feature needs name and kind") from None
        if kind not in ("method", "attribute"):
            raise GraphError(f"feature {name!r}: kind must be method or attribute")
        if name in kinds:
            raise GraphError(f"duplicate feature {name!r}")
        kinds[name] = kind
    nodes: dict[str, str] = {}
    edges = []
    for name, kind in kinds.items():
        c = f"C_{name}"
        nodes[c] = CLASS
        nodes[name] = METHOD if kind == "method" else ATTRIBUTE
        etype = CONTAINS_METHOD if kind == "method" else CONTAINS_ATTRIBUTE
        edges.append((f"{c}->{name}", etype, c, name))
    seen = set()
    for d in data.get("deps", []):
        try:
            s, t = str(d["from"]), str(d["to"])
        except (KeyError, TypeError):
            raise GraphError("dependency needs from and to") from None
        if s not in kinds or t not in kinds:
            raise GraphError(f"dependency {s}->{t} refers to an unknown feature")
        if kinds[s] != "method":
            raise GraphError(f"dependency {s}->{t} must start at a method")
        if s == t or (s, t) in seen:
            continue
        seen.add((s, t))
        etype = USES_METHOD if kinds[t] == "method" else USES_ATTRIBUTE
        edges.append((f"{s}->{t}", etype, s, t))
    return _graph(nodes, edges)


def load_feature_model(path: str) -> TypedGraph:
    with open(path, encoding="utf-8") as fh:
        text = fh.read()
    try:
        data = json.loads(text) if text.strip() else None
    except json.JSONDecodeError as exc:
        raise GraphError(f"{path}: {exc}") from None
    return feature_model_from_json(data)


def random_feature_model(n_features: int, seed: int = 0, n_methods: int | None = None) -> dict:
    """Random model: about half methods, each method with 1-3 dependencies."""
    rng = random.Random(seed)
    n_methods = n_methods if n_methods is not None else (n_features + 1) // 2
    names = [f"m{i}" for i in range(n_methods)] + [f"a{i}" for i in range(n_features - n_methods)]
    feats = [{"name": n, "kind": "method" if n.startswith("m") else "attribute"} for n in names]
    deps = []
    for m in names[:n_methods]:
        targets = [n for n in names if n != m]
        for t in rng.sample(targets, min(len(targets), rng.randint(1, 3))):
            deps.append({"from": m, "to": t})
    return {"features": feats, "deps": deps}


def cra_metric(g: TypedGraph) -> int:
    """Total violations of the weak constraints of :func:`extended_constraints`."""
    return sum(count_violations(c, g) for c in extended_constraints() if c.kind == "weak")


def _features(g: TypedGraph):
    owner = {}
    for _, (t, s, d) in g.edges.items():
        if t in (CONTAINS_METHOD, CONTAINS_ATTRIBUTE):
            if d in owner:
                raise GraphError(f"feature {d!r} is contained in two classes")
            owner[d] = s
    methods = sorted(n for n, t in g.nodes.items() if t == METHOD)
    attrs = sorted(n for n, t in g.nodes.items() if t == ATTRIBUTE)
    uses = [(s, d) for _, (t, s, d) in sorted(g.edges.items()) if t in (USES_METHOD, USES_ATTRIBUTE)]
    return owner, methods, attrs, uses


def assignment_metric(assign: dict, methods: list, attrs: list, uses: list) -> int:
    """The metric for a feature -> class assignment, counted directly."""
    used = set(uses)
    total = 0
    for m1, m2 in itertools.permutations(methods, 2):
        if assign[m1] == assign[m2] and (m1, m2) not in used and (m2, m1) not in used:
            total += 1
    for m in methods:
        for a in attrs:
            if assign[m] == assign[a] and (m, a) not in used:
                total += 1
    for s, d in uses:
        if assign[s] != assign[d]:
            total += 1
    return total


def _set_partitions(items: list):
    if not items:
        yield []
        return
    first, rest = items[0], items[1:]
    for part in _set_partitions(rest):
        for i in range(len(part)):
            yield part[:i] + [[first] + part[i]] + part[i + 1:]
        yield [[first]] + part


MAX_EXHAUSTIVE_FEATURES = 10


def cra_optimal_assignment(g: TypedGraph) -> tuple[int, dict]:
    """Exhaustive optimum of the metric over all groupings of features into classes."""
    owner, methods, attrs, uses = _features(g)
    feats = methods + attrs
    if len(feats) > MAX_EXHAUSTIVE_FEATURES:
        raise ValueError(f"exhaustive search is limited to {MAX_EXHAUSTIVE_FEATURES} features")
    best, best_assign = None, {}
    for part in _set_partitions(feats):
        assign = {f: i for i, block in enumerate(part) for f in block}
        v = assignment_metric(assign, methods, attrs, uses)
        if best is None or v < best:
            best, best_assign = v, assign
    return best, best_assign


def graph_assignment(g: TypedGraph) -> dict:
    owner, _, _, _ = _features(g)
    return dict(owner)
