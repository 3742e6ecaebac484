"""Moving conditions between contexts.

``shift_along(m, c)`` turns a condition over ``P`` into one over ``P'`` for a
morphism ``m: P -> P'`` such that ``p' |= shift_along(m, c)`` iff
``p' . m |= c``.  ``shift_over_rule(rule, c)`` turns a condition over the
right-hand side into one over the left-hand side such that a match satisfies
the result iff the comatch of the transformation satisfies ``c``.
"""
from __future__ import annotations

from .condition import FALSE, TRUE, Condition, Exists, FalseCond, Not, Or, TrueCond, disjunction, lower
from .morphism import Morphism, compose
from .overlap import glue, iter_correspondences
from .rewrite import Rule, apply_raw, invert_rule, keep_namer


def shift_along(m: Morphism, c: Condition) -> Condition:
    """Shift ``c`` (over ``m.dom``) along the injective morphism ``m``."""
    return _shift(m, lower(c))


def _shift(m: Morphism, c: Condition) -> Condition:
    if isinstance(c, (TrueCond, FalseCond)):
        return c
    if isinstance(c, Not):
        return Not(_shift(m, c.inner))
    if isinstance(c, Or):
        return Or(tuple(_shift(m, p) for p in c.parts))
    if isinstance(c, Exists):
        e = c.morphism
        target = m.cod
        q = e.cod
        forced_n = {e.nodes[x]: m.nodes[x] for x in e.dom.nodes}
        forced_e = {e.edges[x]: m.edges[x] for x in e.dom.edges}
        parts = []
        for corr in iter_correspondences(target, q, forced_n, forced_e,
                                         m.image_nodes(), m.image_edges()):
            _, e_new, iq = glue(target, q, corr)
            parts.append(Exists(e_new, _shift(iq, c.body)))
        return disjunction(parts) if parts else FALSE
    raise TypeError(f"unexpected condition {c!r}")


def shift_over_rule(rule: Rule, c: Condition) -> Condition:
    """Shift ``c`` over ``rule.rhs`` to a condition over ``rule.lhs``."""
    return _left(rule, lower(c))


def _left(rule: Rule, c: Condition) -> Condition:
    if isinstance(c, (TrueCond, FalseCond)):
        return c
    if isinstance(c, Not):
        return Not(_left(rule, c.inner))
    if isinstance(c, Or):
        return Or(tuple(_left(rule, p) for p in c.parts))
    if isinstance(c, Exists):
        e = c.morphism
        t = apply_raw(invert_rule(rule), e.cod, e.nodes, e.edges, keep_namer)
        if t is None:
            return FALSE
        back = Rule(rule.name + "'", t.result, e.cod)
        return Exists(t.comatch, _left(back, c.body))
    raise TypeError(f"unexpected condition {c!r}")


def transport(c: Condition, iso: Morphism) -> Condition:
    """Restate ``c`` over ``iso.cod`` as a condition over ``iso.dom`` (``iso`` bijective)."""
    if isinstance(c, (TrueCond, FalseCond)):
        return c
    if isinstance(c, Not):
        return Not(transport(c.inner, iso))
    if isinstance(c, Or):
        return Or(tuple(transport(p, iso) for p in c.parts))
    if isinstance(c, Exists):
        return Exists(compose(iso, c.morphism), c.body)
    raise TypeError(f"unexpected condition {c!r}")


__all__ = ["shift_along", "shift_over_rule", "transport", "TRUE", "FALSE"]
