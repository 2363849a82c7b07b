import random
from itertools import product

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hyperhom.config import Config
from hyperhom.core_model import (Hypergraph, IncidenceGraph, add_pumped_edges, disjoint_union,
                                 to_incidence)
from hyperhom.errors import CapExceeded
from hyperhom.fixtures import triangles_graph, triangles_hypergraph
from hyperhom.homcount import (BLUE_FIRST, RED_FIRST, count_homs_hypergraph,
                               count_homs_incidence, count_homs_labeled, count_with_fixed,
                               hom_vector, indistinguishable_over, naive_count_homs_hypergraph,
                               naive_count_homs_incidence, naive_count_homs_labeled)
from hyperhom.labeled import LabeledGraph

import randomgen


def _label_free(graph):
    return LabeledGraph.unlabeled(graph)


def test_identity_hypergraph_hom_exists():
    hypergraph = triangles_hypergraph()
    assert count_homs_hypergraph(hypergraph, hypergraph) >= 1


def test_pair_onto_singleton_edge_is_forced():
    pattern = Hypergraph.build("ab", {"e": "ab"})
    host = Hypergraph.build("x", {"f": "x"})
    assert count_homs_hypergraph(pattern, host) == 1


def test_pair_into_triangles_matches_full_enumeration():
    pattern = Hypergraph.build("ab", {"e": "ab"})
    host = triangles_hypergraph()
    expected = 0
    for a, b, f in product(host.vertices, host.vertices, host.edge_ids):
        if host.incidence[f] == frozenset({a, b}):
            expected += 1
    assert count_homs_hypergraph(pattern, host) == expected == 12


def test_single_blue_node_counts_blue_nodes():
    pattern = _label_free(IncidenceGraph.build([], [0], []))
    host = _label_free(triangles_graph())
    assert count_homs_labeled(pattern, host) == 8


def test_missing_label_domain_gives_zero():
    pattern = LabeledGraph(IncidenceGraph.build([0], [0], [(0, 0)]), {1: 0}, {1: 0}, {1: 1})
    host = _label_free(triangles_graph())
    assert count_homs_labeled(pattern, host) == 0
    assert naive_count_homs_labeled(pattern, host) == 0


def test_two_red_neighbours_into_triangles():
    pattern = _label_free(IncidenceGraph.build([0, 1], [0], [(0, 0), (0, 1)]))
    host = _label_free(triangles_graph())
    assert count_homs_labeled(pattern, host) == 2 * 3 ** 2 + 6 * 2 ** 2 == 42
    assert naive_count_homs_labeled(pattern, host) == 42


def test_labels_pin_images():
    host_graph = IncidenceGraph.build([0, 1], [0, 1], [(0, 0), (1, 0), (1, 1)])
    host = LabeledGraph(host_graph, {1: 1}, {1: 1}, {1: 1})
    pattern = LabeledGraph(IncidenceGraph.build([0], [0], [(0, 0)]), {1: 0}, {1: 0}, {1: 1})
    assert count_homs_labeled(pattern, host) == 1
    wrong = LabeledGraph(host_graph, {1: 0}, {1: 0}, {1: 1})
    assert count_homs_labeled(pattern, wrong) == 1
    moved = LabeledGraph(host_graph, {1: 1}, {1: 0}, {})
    pattern_unguarded = LabeledGraph(IncidenceGraph.build([0], [0], [(0, 0)]), {1: 0}, {1: 0})
    assert count_homs_labeled(pattern_unguarded, moved) == 0


def test_fixed_images():
    pattern = IncidenceGraph.build([0], [0], [(0, 0)])
    host = triangles_graph()
    assert count_with_fixed(pattern, host, fixed_red={0: 1}) == 3
    assert count_with_fixed(pattern, host, fixed_blue={0: "e123"}) == 3


def test_hom_vector_single_blue_node():
    family = [IncidenceGraph.build([], [0], [])]
    three = IncidenceGraph.build([], [0, 1, 2], [])
    same = IncidenceGraph.build([0], [0, 1, 2], [(0, 0)])
    four = IncidenceGraph.build([], [0, 1, 2, 3], [])
    assert indistinguishable_over(family, three, same)
    assert hom_vector(family, three) == [3]
    assert hom_vector(family, four) == [4]
    assert not indistinguishable_over(family, three, four)


def test_hom_vector_over_small_family():
    family = list(randomgen.all_incidence_graphs(2, 2))
    first = IncidenceGraph.build([0, 1], [0, 1], [(0, 0), (0, 1), (1, 1)])
    second = IncidenceGraph.build([0, 1], [0, 1], [(0, 0), (1, 1)])
    naive_first = [naive_count_homs_incidence(f, first) for f in family]
    naive_second = [naive_count_homs_incidence(f, second) for f in family]
    assert hom_vector(family, first) == naive_first
    assert hom_vector(family, second) == naive_second
    assert indistinguishable_over(family, first, second) == (naive_first == naive_second)


def test_pattern_cap():
    pattern = IncidenceGraph.build([], range(3), [])
    with pytest.raises(CapExceeded):
        count_homs_incidence(pattern, pattern, Config(pattern_blue=2))


@settings(max_examples=150, deadline=None)
@given(st.integers(0, 10**6))
def test_engines_agree_with_naive_enumeration(seed):
    rng = random.Random(seed)
    pattern = randomgen.incidence_graph(rng, 3, 3)
    host = randomgen.incidence_graph(rng, 3, 3)
    expected = naive_count_homs_incidence(pattern, host)
    assert count_homs_incidence(pattern, host) == expected
    assert count_homs_incidence(pattern, host, engine=BLUE_FIRST) == expected
    assert count_homs_incidence(pattern, host, engine=RED_FIRST) == expected


@settings(max_examples=100, deadline=None)
@given(st.integers(0, 10**6))
def test_labeled_count_matches_naive(seed):
    rng = random.Random(seed)
    pattern = randomgen.base_graph(rng, 2)
    host = randomgen.labeled_host(rng, sorted(pattern.r), sorted(pattern.b), pattern.g)
    assert count_homs_labeled(pattern, host) == naive_count_homs_labeled(pattern, host)


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 10**6))
def test_disjoint_union_is_multiplicative(seed):
    rng = random.Random(seed)
    first = randomgen.incidence_graph(rng, 2, 3)
    second = randomgen.incidence_graph(rng, 2, 3)
    host = randomgen.incidence_graph(rng, 3, 3, min_blue=1)
    union = disjoint_union(first, second)
    assert count_homs_incidence(union, host) == (
        count_homs_incidence(first, host) * count_homs_incidence(second, host))


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 10**6))
def test_hypergraph_homs_are_incidence_homs(seed):
    rng = random.Random(seed)
    pattern = randomgen.hypergraph(rng, 3, 2)
    host = randomgen.hypergraph(rng, 3, 3)
    strict = count_homs_hypergraph(pattern, host)
    assert strict == naive_count_homs_hypergraph(pattern, host)
    assert strict <= count_homs_incidence(to_incidence(pattern), to_incidence(host))


@pytest.mark.parametrize("twins", [1, 2, 3])
def test_twin_class_count_is_power_sum(twins):
    rng = random.Random(twins)
    for _ in range(10):
        core = randomgen.incidence_graph(rng, 2, 3, min_blue=1)
        host = randomgen.incidence_graph(rng, 3, 3, min_blue=1)
        red_set = set(rng.sample(core.red, rng.randint(0, len(core.red))))
        pattern = add_pumped_edges(core, red_set, twins)
        expected = 0
        for images in product(host.red, repeat=len(core.red)):
            red_map = dict(zip(core.red, images))
            rest = 1
            for b in core.blue:
                image = {red_map[r] for r in core.neighbourhood(b)}
                rest *= sum(1 for c in host.blue if image <= host.neighbourhood(c))
            image = {red_map[r] for r in red_set}
            x = sum(1 for c in host.blue if image <= host.neighbourhood(c))
            expected += rest * x ** twins
        assert count_homs_incidence(pattern, host) == expected
