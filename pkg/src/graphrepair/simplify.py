"""Sound simplifications of conditions and a syntactic equivalence check.

All functions work on lowered conditions (TRUE, FALSE, Exists, Not, Or).
"""
from __future__ import annotations

from typing import Iterable

from .condition import FALSE, TRUE, Condition, Exists, FalseCond, Not, Or, TrueCond, lower
from .graph import TypedGraph
from .matching import has_monomorphism, iter_isomorphisms
from .shift import transport


def is_false(c: Condition) -> bool:
    return isinstance(c, FalseCond) or (isinstance(c, Not) and isinstance(c.inner, TrueCond))


def is_true(c: Condition) -> bool:
    return isinstance(c, TrueCond) or (isinstance(c, Not) and isinstance(c.inner, FalseCond))


def violates_hard(g: TypedGraph, patterns: tuple) -> bool:
    """Whether ``g`` contains one of the forbidden ``patterns``."""
    if not patterns:
        return False
    key = ("hard", patterns)
    hit = g.cache.get(key)
    if hit is None:
        hit = any(has_monomorphism(p, g) for p in patterns)
        g.cache[key] = hit
    return hit


def hard_patterns(constraints: Iterable) -> tuple:
    """Premise graphs of the hard constraints that are plain forbidden patterns."""
    out = []
    for c in constraints:
        if getattr(c, "kind", "weak") == "hard" and c.is_forbidden_pattern():
            out.append(c.premise_graph)
    return tuple(out)


def simplify(c: Condition, hard: tuple = (), implication: bool = True) -> Condition:
    """Constant folding, forbidden-pattern pruning and (optionally) implication cleanup."""
    return _fold(lower(c), tuple(hard), implication)


def simplify_with_hard_constraints(c: Condition, hard: tuple) -> Condition:
    return _fold(lower(c), tuple(hard), False)


def simplify_implication(c: Condition) -> Condition:
    return _fold(lower(c), (), True)


def _fold(c: Condition, hard: tuple, implication: bool) -> Condition:
    if isinstance(c, (TrueCond, FalseCond)):
        return c
    if isinstance(c, Not):
        inner = _fold(c.inner, hard, implication)
        if is_true(inner):
            return FALSE
        if is_false(inner):
            return TRUE
        if isinstance(inner, Not):
            return inner.inner
        return Not(inner)
    if isinstance(c, Exists):
        e = c.morphism
        if violates_hard(e.cod, hard):
            return FALSE
        body = _fold(c.body, hard, implication)
        if is_false(body):
            return FALSE
        if e.is_iso():
            return _fold(transport(body, e), hard, implication)
        return Exists(e, body)
    if isinstance(c, Or):
        parts: list[Condition] = []
        for p in c.parts:
            p = _fold(p, hard, implication)
            if is_true(p):
                return TRUE
            if is_false(p):
                continue
            if isinstance(p, Or):
                parts.extend(p.parts)
            else:
                parts.append(p)
        parts = _dedupe(parts)
        if implication:
            parts = _drop_implied_antecedents(parts, hard)
            if parts is None:
                return TRUE
        if not parts:
            return FALSE
        if len(parts) == 1:
            return parts[0]
        return Or(tuple(parts))
    raise TypeError(f"unexpected condition {c!r}")


def _dedupe(parts: list) -> list:
    out: list = []
    for p in parts:
        if not any(p == q or equivalent(p, q) for q in out):
            out.append(p)
    return out


def _drop_implied_antecedents(parts: list, hard: tuple):
    """In ``not(a1 or ...) or b1 or ...`` drop every ``ai`` equivalent to some ``bj``.

    ``(not(a or r)) or a`` equals ``(not r) or a``; returns ``None`` if the
    disjunction became TRUE.
    """
    positives = [p for p in parts if not isinstance(p, Not)]
    if not positives:
        return parts
    out = []
    for p in parts:
        if isinstance(p, Not):
            xs = list(p.inner.parts) if isinstance(p.inner, Or) else [p.inner]
            kept = [x for x in xs if not any(equivalent(x, b) for b in positives)]
            if not kept:
                return None
            if len(kept) != len(xs):
                p = _fold(Not(kept[0] if len(kept) == 1 else Or(tuple(kept))), hard, False)
                if is_true(p):
                    return None
        out.append(p)
    return out


def equivalent(c1: Condition, c2: Condition, phi_n: dict | None = None,
               phi_e: dict | None = None) -> bool:
    """Syntactic equivalence up to isomorphisms commuting with all embeddings.

    ``phi_n``/``phi_e`` map the context of ``c1`` onto that of ``c2``; ``None``
    means both share the same context and the identity is used.  Disjunctions
    are compared as sets.  ``True`` implies semantic equivalence; ``False``
    only means the check could not prove it.
    """
    if is_true(c1) or is_true(c2):
        return is_true(c1) and is_true(c2)
    if is_false(c1) or is_false(c2):
        return is_false(c1) and is_false(c2)
    if isinstance(c1, Not) and isinstance(c2, Not):
        return equivalent(c1.inner, c2.inner, phi_n, phi_e)
    if isinstance(c1, Or) and isinstance(c2, Or):
        return (all(any(equivalent(a, b, phi_n, phi_e) for b in c2.parts) for a in c1.parts)
                and all(any(_equiv_rev(b, a, phi_n, phi_e) for a in c1.parts) for b in c2.parts))
    if isinstance(c1, Exists) and isinstance(c2, Exists):
        e1, e2 = c1.morphism, c2.morphism
        q1, q2 = e1.cod, e2.cod
        if len(q1.nodes) != len(q2.nodes) or len(q1.edges) != len(q2.edges):
            return False
        if phi_n is None:
            an = {e1.nodes[x]: e2.nodes.get(x) for x in e1.nodes}
            ae = {e1.edges[x]: e2.edges.get(x) for x in e1.edges}
        else:
            an = {e1.nodes[x]: e2.nodes.get(phi_n[x]) for x in e1.nodes}
            ae = {e1.edges[x]: e2.edges.get(phi_e[x]) for x in e1.edges}
        if None in an.values() or None in ae.values():
            return False
        for k, v in an.items():
            if q1.nodes[k] != q2.nodes[v]:
                return False
        for k, v in ae.items():
            if q1.edges[k][0] != q2.edges[v][0]:
                return False
        for pn, pe in iter_isomorphisms(q1, q2, an, ae):
            if equivalent(c1.body, c2.body, dict(pn), dict(pe)):
                return True
        return False
    return False


def _equiv_rev(b: Condition, a: Condition, phi_n, phi_e) -> bool:
    if phi_n is None:
        return equivalent(b, a)
    inv_n = {v: k for k, v in phi_n.items()}
    inv_e = {v: k for k, v in phi_e.items()}
    return equivalent(b, a, inv_n, inv_e)


def conditions_equivalent_syntactic(c1: Condition, c2: Condition) -> bool:
    return equivalent(_fold(lower(c1), (), False), _fold(lower(c2), (), False))
