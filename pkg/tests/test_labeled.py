import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hyperhom.core_model import IncidenceGraph, disjoint_union, isomorphic
from hyperhom.decomp import EHD, TreeDecomp, search_width, validate, width
from hyperhom.errors import CertificateError, InvalidLabeling, NotATransition
from hyperhom.fixtures import (DECOMPOSITION_COLOURING, DECOMPOSITION_SCHEDULE,
                               decomposition_graph, decomposition_tree, triangles_graph)
from hyperhom.labeled import (BLUE, RED, Base, Glue, LabeledGraph, TraversalPlan,
                              apply_transition, cert_from_json, cert_to_ehd, cert_to_json,
                              check_cert, check_plan, ehd_to_cert, eval_cert, from_guard_fn,
                              glue, glue_with_maps, has_real_guards, is_base_graph,
                              labeled_isomorphic, plan_traversal, reclaim, reclaim_b,
                              reclaim_r, reseat, switch)
from hyperhom.logic import Guard

import randomgen


def _labeled(reds, blues, edges, guard):
    """Red node ``v<i>`` carries label ``i``; blue labels are given by ``blues``."""
    graph = IncidenceGraph.build(reds, blues.values(), edges)
    r = {int(v[1:]): v for v in reds}
    return LabeledGraph(graph, r, {j: e for j, e in blues.items()}, Guard(guard))


# The bottom of the worked decomposition: L_t3, L_t5 and L_t6.
L_T3 = _labeled(["v2", "v4", "v6", "v8", "v9"], {2: "c", 1: "m"},
                [("c", "v2"), ("c", "v8"), ("c", "v9"), ("m", "v4"), ("m", "v6")],
                {2: 2, 8: 2, 9: 2, 4: 1, 6: 1})
L_T5 = _labeled(["v2", "v4"], {1: "d"}, [("d", "v2"), ("d", "v4")], {2: 1, 4: 1})
L_T6 = _labeled(["v2", "v6"], {1: "e"}, [("e", "v2"), ("e", "v6")], {2: 1, 6: 1})


def test_from_guard_fn_shapes():
    single = from_guard_fn({1: 1})
    assert (len(single.graph.red), len(single.graph.blue), len(single.graph.edges)) == (1, 1, 1)
    shared = from_guard_fn({1: 1, 2: 1})
    assert (len(shared.graph.red), len(shared.graph.blue), len(shared.graph.edges)) == (2, 1, 2)
    split = from_guard_fn({2: 2, 4: 1})
    assert (len(split.graph.red), len(split.graph.blue), len(split.graph.edges)) == (2, 2, 2)
    assert has_real_guards(split)


def test_from_guard_fn_needs_entries():
    with pytest.raises(InvalidLabeling):
        from_guard_fn({})


def test_guard_domain_must_be_labeled():
    graph = IncidenceGraph.build([0], [0], [(0, 0)])
    with pytest.raises(InvalidLabeling):
        LabeledGraph(graph, {}, {1: 0}, {1: 1})


def test_reclaim_nothing_is_identity():
    assert reclaim(L_T3, RED, set()) == L_T3
    assert reclaim(L_T3, BLUE, set()) == L_T3


def test_reclaim_red_drops_guard():
    result = reclaim(L_T3, RED, {2})
    assert set(result.r) == {4, 6, 8, 9}
    assert result.g.domain == frozenset({4, 6, 8, 9})
    assert result.graph == L_T3.graph


def test_reclaim_unknown_label():
    with pytest.raises(InvalidLabeling):
        reclaim(L_T3, BLUE, {5})


def test_reseat_moves_labels():
    assert reseat(L_T3, RED, {4, 6}, ["v4", "v6"]) == L_T3
    moved = reseat(L_T3, BLUE, {1}, ["c"])
    assert moved.b[1] == "c"
    with pytest.raises(InvalidLabeling):
        reseat(L_T3, BLUE, {1}, ["v2"])


def test_glue_with_itself_is_isomorphic():
    rng = random.Random(5)
    for _ in range(20):
        base = randomgen.base_graph(rng, 2)
        assert labeled_isomorphic(glue(base, base), base)


def test_glue_of_label_disjoint_graphs_is_disjoint_union():
    first = LabeledGraph(IncidenceGraph.build([0], [0], [(0, 0)]), {1: 0}, {1: 0}, {1: 1})
    second = LabeledGraph(IncidenceGraph.build([0, 1], [0], [(0, 0), (0, 1)]), {2: 1}, {2: 0},
                          {2: 2})
    glued = glue(first, second)
    assert isomorphic(glued.graph, disjoint_union(first.graph, second.graph))
    assert glued.g == Guard({1: 1, 2: 2})


def test_glue_projections_and_precedence():
    first = LabeledGraph(IncidenceGraph.build([0], [0], [(0, 0)]), {1: 0}, {1: 0}, {1: 1})
    second = LabeledGraph(IncidenceGraph.build([0], [0], [(0, 0)]), {1: 0}, {1: 0}, {1: 2})
    result = glue_with_maps(first, second)
    assert result.guard_conflicts == (1,)
    assert result.graph.g == Guard({1: 1})
    assert result.red_maps[0][0] == result.red_maps[1][0]


def test_transition_on_worked_example():
    result = apply_transition(L_T5, {2: 2, 4: 1})
    expected = LabeledGraph(
        IncidenceGraph.build(["v2", "v4"], ["c", "d", "m"],
                             [("c", "v2"), ("m", "v4"), ("d", "v2"), ("d", "v4")]),
        {2: "v2", 4: "v4"}, {2: "c", 1: "m"}, Guard({2: 2, 4: 1}))
    assert labeled_isomorphic(result, expected)
    assert has_real_guards(result)


def test_glueing_switched_children_into_parent():
    a5 = apply_transition(L_T5, {2: 2, 4: 1})
    a6 = apply_transition(L_T6, {2: 2, 6: 1})
    combined = glue(glue(L_T3, a5), a6)
    expected = LabeledGraph(
        IncidenceGraph.build(["v2", "v4", "v6", "v8", "v9"], ["c", "m", "d", "e"],
                             [("c", "v2"), ("c", "v8"), ("c", "v9"), ("m", "v4"), ("m", "v6"),
                              ("d", "v2"), ("d", "v4"), ("e", "v2"), ("e", "v6")]),
        dict(L_T3.r), dict(L_T3.b), L_T3.g)
    assert labeled_isomorphic(combined, expected)


def test_transition_that_misses_a_guarded_label():
    with pytest.raises(NotATransition) as info:
        apply_transition(L_T3, {4: 1, 6: 2, 8: 1, 9: 2})
    assert "2" in str(info.value)
    fixed = apply_transition(reclaim(L_T3, RED, {2}), {4: 1, 6: 2, 8: 1, 9: 2})
    assert has_real_guards(fixed)


def test_fresh_guards_without_released_labels():
    graph = LabeledGraph(IncidenceGraph.build([0], [0], [(0, 0)]), {1: 0}, {1: 0}, {1: 1})
    moved = apply_transition(reclaim(graph, BLUE, set()), {1: 2})
    assert moved.b[1] == 0 or 1 in moved.b
    assert moved.g == Guard({1: 2})
    assert has_real_guards(moved)


def test_has_real_guards_cases():
    assert has_real_guards(from_guard_fn({1: 1}))
    assert has_real_guards(L_T3, {})
    broken = LabeledGraph(IncidenceGraph.build([0], [0, 1], [(1, 0)]), {1: 0}, {1: 0}, {1: 1})
    assert not has_real_guards(broken)


def test_eval_base_certificate():
    graph = from_guard_fn({1: 1})
    assert eval_cert(Base(graph)) == graph
    assert is_base_graph(graph)


def test_certificate_rules_are_enforced():
    graph = from_guard_fn({1: 1})
    with pytest.raises(CertificateError):
        eval_cert(reclaim_b(Base(graph), {1}))
    with pytest.raises(CertificateError):
        eval_cert(reclaim_r(Base(graph), {2}))
    with pytest.raises(CertificateError):
        eval_cert(Glue(Base(graph), Base(from_guard_fn({1: 2}))))
    unlabeled = LabeledGraph(IncidenceGraph.build([0], [0, 1], [(0, 0), (1, 0)]),
                             {1: 0}, {1: 0}, {1: 1})
    with pytest.raises(CertificateError):
        eval_cert(Base(unlabeled))
    report = check_cert(reclaim_b(Base(graph), {1}))
    assert not report.valid and report.violations


def test_certificate_json_round_trip():
    rng = random.Random(3)
    for _ in range(20):
        cert = randomgen.certificate(rng, 2, steps=4)
        assert cert_from_json(cert_to_json(cert)) == cert


@settings(max_examples=200, deadline=None)
@given(st.integers(0, 10**6))
def test_random_certificates_have_real_guards_and_ehds(seed):
    rng = random.Random(seed)
    cert = randomgen.certificate(rng, 2, steps=rng.randint(0, 5))
    labeled = eval_cert(cert, 2)
    assert has_real_guards(labeled, labeled.g)
    tree, root = cert_to_ehd(cert, 2)
    assert validate(tree, labeled.graph, EHD).valid
    assert width(tree) <= 2
    assert tree.cover[root] == frozenset(labeled.b.values())


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 10**6))
def test_glue_and_transition_keep_real_guards(seed):
    rng = random.Random(seed)
    first = randomgen.base_graph(rng, 3)
    second = randomgen.base_graph(rng, 3)
    if first.g.compatible(second.g):
        glued = glue(first, second)
        assert has_real_guards(glued, first.g.union(second.g))
    transition = randomgen.random_transition(rng, first.g, 3)
    if transition is not None:
        assert has_real_guards(apply_transition(first, transition))


def test_base_certificate_gives_single_node():
    graph = from_guard_fn({1: 1, 2: 2})
    tree, root = cert_to_ehd(Base(graph))
    assert len(tree.nodes) == 1
    assert tree.bag[root] == frozenset(graph.r.values())
    assert tree.cover[root] == frozenset(graph.b.values())


def test_glue_certificate_gives_three_nodes():
    first = from_guard_fn({1: 1})
    second = from_guard_fn({2: 2})
    tree, root = cert_to_ehd(Glue(Base(first), Base(second)))
    assert len(tree.nodes) == 3
    assert len(tree.adjacency[root]) == 2


def test_worked_decomposition_plans():
    graph, tree = decomposition_graph(), decomposition_tree()
    table = TraversalPlan(DECOMPOSITION_COLOURING, DECOMPOSITION_SCHEDULE)
    assert check_plan(tree, "t1", graph, table, 2) == []
    plan = plan_traversal(tree, "t1", graph, 2)
    assert check_plan(tree, "t1", graph, plan, 2) == []


def test_broken_plan_is_reported():
    graph, tree = decomposition_graph(), decomposition_tree()
    colouring = dict(DECOMPOSITION_COLOURING, b=1)
    problems = check_plan(tree, "t1", graph, TraversalPlan(colouring, DECOMPOSITION_SCHEDULE), 2)
    assert problems


def test_single_node_decomposition_round_trip():
    graph = IncidenceGraph.build([0, 1], [0, 1], [(0, 0), (1, 0), (1, 1)])
    tree = TreeDecomp.build(["t"], [], {"t": [0, 1]}, {"t": [0, 1]})
    cert = ehd_to_cert(graph, tree)
    result = eval_cert(cert)
    assert result.label_free
    assert isomorphic(result.graph, graph)


def test_worked_decomposition_round_trip():
    graph, tree = decomposition_graph(), decomposition_tree()
    result = eval_cert(ehd_to_cert(graph, tree, 2), 2)
    assert result.label_free
    assert isomorphic(result.graph, graph)


def test_corpus_round_trips():
    rng = random.Random(8)
    graphs = [triangles_graph()] + [randomgen.incidence_graph(rng, 4, 4, min_blue=1)
                                    for _ in range(40)]
    for graph in graphs:
        tree = search_width(graph, 2, EHD)
        if tree is None:
            continue
        result = eval_cert(ehd_to_cert(graph, tree, 2), 2)
        assert result.label_free
        assert isomorphic(result.graph, graph)


def test_labeled_graph_json_round_trip():
    assert LabeledGraph.from_json(L_T3.to_json()) == L_T3


def test_switch_certificate_matches_operation():
    cert = switch(Base(L_T5), {2: 2, 4: 1})
    assert labeled_isomorphic(eval_cert(cert), apply_transition(L_T5, {2: 2, 4: 1}))
