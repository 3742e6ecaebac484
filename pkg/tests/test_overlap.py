import random

from hypothesis import assume, given, settings, strategies as st

from cases import premise_case
from graphrepair.cra import move_method_rule, w1
from graphrepair.matching import find_monomorphisms
from graphrepair.overlap import enumerate_overlap_classes, iter_correspondences, rule_overlap_classes
from graphrepair.randomgen import random_graph

seeds = st.integers(0, 2**31 - 1)


def factor(ov, m, q):
    """The occurrence of the overlap graph joining ``m`` and ``q``, or None."""
    un, ue = {}, {}
    for src, emb in ((m, ov.left), (q, ov.right)):
        for x, y in emb.nodes.items():
            if un.setdefault(y, src.nodes[x]) != src.nodes[x]:
                return None
        for x, y in emb.edges.items():
            if ue.setdefault(y, src.edges[x]) != src.edges[x]:
                return None
    if len(set(un.values())) != len(un) or len(set(ue.values())) != len(ue):
        return None
    return un, ue


def count_factorisations(ovs, m, q):
    return sum(1 for ov in ovs if factor(ov, m, q) is not None)


def check_completeness(rule, m, premise):
    ovs = enumerate_overlap_classes(rule.lhs, premise)
    for q in find_monomorphisms(premise, m.cod):
        assert count_factorisations(ovs, m, q) == 1


@settings(max_examples=500)
@given(seeds)
def test_every_occurrence_factors_through_exactly_one_class(seed):
    case = premise_case(seed)
    assume(case is not None)
    check_completeness(*case)


def _equivalent(a, b):
    """An isomorphism of the overlap graphs commuting with both embeddings."""
    if len(a.graph.nodes) != len(b.graph.nodes) or len(a.graph.edges) != len(b.graph.edges):
        return False
    phi_n, phi_e = {}, {}
    for ea, eb in ((a.left, b.left), (a.right, b.right)):
        for x, y in ea.nodes.items():
            if phi_n.setdefault(y, eb.nodes[x]) != eb.nodes[x]:
                return False
        for x, y in ea.edges.items():
            if phi_e.setdefault(y, eb.edges[x]) != eb.edges[x]:
                return False
    return len(set(phi_n.values())) == len(phi_n) and len(set(phi_e.values())) == len(phi_e)


@settings(max_examples=200)
@given(seeds)
def test_representatives_are_jointly_surjective_and_distinct(seed):
    rng = random.Random(seed)
    a = random_graph(rng, 3, 3, "a")
    b = random_graph(rng, 3, 3, "b")
    ovs = enumerate_overlap_classes(a, b)
    for ov in ovs:
        g = ov.graph
        assert ov.left.image_nodes() | ov.right.image_nodes() == set(g.nodes)
        assert ov.left.image_edges() | ov.right.image_edges() == set(g.edges)
        c = ov.correspondence
        assert len(g.nodes) == len(a.nodes) + len(b.nodes) - len(c.nodes)
        assert len(g.edges) == len(a.edges) + len(b.edges) - len(c.edges)
        assert ov.left.is_injective() and ov.right.is_injective()
    for i in range(len(ovs)):
        for j in range(i + 1, len(ovs)):
            assert not _equivalent(ovs[i], ovs[j])


def test_forced_and_blocked_correspondences():
    rng = random.Random(3)
    a = random_graph(rng, 3, 2, "a")
    first = sorted(a.nodes)[0]
    b = a.remove([n for n in a.nodes if n != first], list(a.edges))
    forced = list(iter_correspondences(a, b, {first: first}, {}))
    assert forced and all(dict(c.nodes) == {first: first} for c in forced)
    blocked = list(iter_correspondences(a, b, {}, {}, {first}, set()))
    assert all(first not in dict(c.nodes).values() for c in blocked)


def test_running_example_premise_overlaps_split_by_deletion():
    pre, con = rule_overlap_classes(move_method_rule(), w1().premise_graph)
    assert pre and con
    deleted = "e1"
    for ov in pre:
        assert ov.left.edges[deleted] in ov.right.image_edges()
    for ov in con:
        assert ov.left.edges[deleted] not in ov.right.image_edges()
        assert ov.witness is not None


def test_running_example_class_counts():
    from graphrepair.cra import move_attribute_rule
    pre, con = rule_overlap_classes(move_attribute_rule(), w1().premise_graph)
    assert (len(pre), len(con)) == (0, 3)
    # mirror images of m1/m2 stay separate classes here; they merge later as one condition of multiplicity 2
    pre, con = rule_overlap_classes(move_method_rule(), w1().premise_graph)
    assert (len(pre), len(con)) == (2, 9)
