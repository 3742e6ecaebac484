import ast
from pathlib import Path

import graphrepair.oracle as oracle
from graphrepair.condition import Constraint, Exists, Not, TRUE
from graphrepair.cra import CLASS, METHOD, CRA_TYPES, cart_session_model, move_attribute_rule, move_method_rule, w1, w2
from graphrepair.graph import TypedGraph
from graphrepair.morphism import inclusion
from graphrepair.oracle import (
    actual_delta, brute_direct_flags, brute_monomorphisms, oracle_nv, repaired_and_impaired,
    verify_delta_theorem,
)
from graphrepair.ranking import predicted_counts
from graphrepair.repair import derive_bundle
from graphrepair.rewrite import Rule

FORBIDDEN = {"matching", "shift", "repair", "ranking", "overlap", "simplify"}


def _imported_modules(path):
    tree = ast.parse(Path(path).read_text())
    for node in ast.walk(tree):
        if isinstance(node, ast.ImportFrom):
            yield (node.module or "").split(".")[-1]
        elif isinstance(node, ast.Import):
            for a in node.names:
                yield a.name.split(".")[-1]


def test_oracle_does_not_reuse_the_engine():
    assert not FORBIDDEN & set(_imported_modules(oracle.__file__))


def _predict(host, rule, nmap, emap, constraint):
    rep, imp = predicted_counts(derive_bundle(rule, constraint), host, nmap, emap)
    return imp - rep


def test_running_example_counts():
    g = cart_session_model()
    assert oracle_nv(g, w1()) == 4
    assert oracle_nv(g, w2()) == 2


def test_empty_host_has_no_violations():
    empty = TypedGraph({}, {}, CRA_TYPES)
    for c in (w1(), w2()):
        assert oracle_nv(empty, c) == 0


def test_username_move_matches_its_row():
    g = cart_session_model()
    rule = move_attribute_rule()
    nmap = {"c1": "Session", "c2": "Cart", "a": "username"}
    emap = {"e1": "Session->username"}
    for c, want in ((w1(), -2), (w2(), -1)):
        ok, predicted, actual = verify_delta_theorem(g, rule, nmap, emap, c, _predict)
        assert ok and predicted == actual == want
    assert repaired_and_impaired(g, rule, nmap, emap, w2()) == (2, 1)
    assert brute_direct_flags(g, rule, nmap, emap, w2()) == {"directSustaining": False, "directImproving": False}


def test_identity_rule_changes_nothing():
    r = move_method_rule()
    ident = Rule("id", r.lhs, r.lhs)
    g = cart_session_model()
    nmap = {"c1": "Cart", "c2": "Session", "m": "print"}
    for c in (w1(), w2()):
        ok, predicted, actual = verify_delta_theorem(g, ident, nmap, {"e1": "Cart->print"}, c, _predict)
        assert ok and predicted == actual == 0


def test_a_wrong_predictor_is_reported():
    g = cart_session_model()
    nmap = {"c1": "Cart", "c2": "Session", "m": "checkout"}
    ok, predicted, actual = verify_delta_theorem(
        g, move_method_rule(), nmap, {"e1": "Cart->checkout"}, w1(), lambda *a: 0)
    assert not ok and (predicted, actual) == (0, -4)


def test_dangling_deletion_is_an_error():
    import pytest
    from graphrepair.cra import CONTAINS_METHOD
    lhs = TypedGraph({"c": CLASS, "m": METHOD}, {"e": (CONTAINS_METHOD, "c", "m")}, CRA_TYPES)
    delete = Rule("deleteMethod", lhs, TypedGraph({"c": CLASS}, {}, CRA_TYPES))
    with pytest.raises(ValueError):
        actual_delta(cart_session_model(), delete, {"c": "Cart", "m": "print"}, {"e": "Cart->print"}, w1())


def test_brute_monomorphisms_are_injective_and_typed():
    p = TypedGraph({"x": CLASS, "y": CLASS}, {}, CRA_TYPES)
    g = cart_session_model()
    found = brute_monomorphisms(p, g)
    assert len(found) == 3 * 2
    for nm, _ in found:
        assert nm["x"] != nm["y"] and all(g.nodes[v] == CLASS for v in nm.values())


def test_existential_constraint_counts_one_at_most():
    empty = TypedGraph({}, {}, CRA_TYPES)
    one = TypedGraph({"m": METHOD}, {}, CRA_TYPES)
    c = Constraint("some-method", inclusion(empty, empty), Exists(inclusion(empty, one), TRUE))
    assert oracle_nv(empty, c) == 1
    assert oracle_nv(one, c) == 0
    neg = Constraint("no-method", inclusion(empty, empty), Not(Exists(inclusion(empty, one), TRUE)))
    assert oracle_nv(one, neg) == 1
