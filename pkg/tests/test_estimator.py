import pytest
from sklearn.base import clone
from sklearn.exceptions import NotFittedError

from graphrepair.cra import cart_session_model, extended_constraints, generate_synthetic, move_method_rule
from graphrepair.estimator import GraphRepairer, check_graph_input, check_rules_and_constraints
from graphrepair.graph import GraphError, graph_to_json


def test_params_round_trip_through_clone():
    est = GraphRepairer(restarts=3, budget=2, seed=11, weights={"w1": 2})
    params = est.get_params()
    assert params["restarts"] == 3 and params["weights"] == {"w1": 2}
    copy = clone(est)
    assert copy.get_params() == params and copy is not est
    est.set_params(seed=4)
    assert est.seed == 4


def test_fit_predict_transform_score():
    g = cart_session_model()
    est = GraphRepairer().fit([g])
    (best,) = est.predict(g)
    assert best.rule == "moveMethod" and best.match["nodes"]["m"] == "checkout" and best.delta == -5
    assert est.score(g) == -6
    (fixed,) = est.transform([g])
    assert est.score(fixed) > est.score(g)
    assert est.predict(fixed)[0].delta >= 0


def test_fit_transform_accepts_json_dicts():
    g = generate_synthetic(3, 0)
    out = GraphRepairer().fit_transform(graph_to_json(g))
    assert len(out) == 1 and len(out[0].nodes) == len(g.nodes)


def test_unfitted_use_is_rejected():
    with pytest.raises(NotFittedError):
        GraphRepairer().predict(cart_session_model())


def test_input_validation():
    with pytest.raises(GraphError):
        check_graph_input(42)
    with pytest.raises(GraphError):
        check_graph_input([cart_session_model(), 3.5])
    with pytest.raises(GraphError):
        check_rules_and_constraints([], None)
    with pytest.raises(GraphError):
        check_rules_and_constraints([move_method_rule(), move_method_rule()], None)
    with pytest.raises(GraphError):
        check_rules_and_constraints(None, ["w1"])


def test_custom_constraints_are_used():
    est = GraphRepairer(rules=[move_method_rule()], constraints=extended_constraints()).fit()
    assert {c.name for c in est.ranker_.constraints} == {"w2", "w3", "w4", "w5"}
    assert len(est.constraints_) == len(extended_constraints())
    assert all(rule == "moveMethod" for rule, _ in est.bundles_)
