import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hyperhom.core_model import IncidenceGraph
from hyperhom.errors import IncompatibleQuantumGraph, NotATransition, OverlappingIndicatorSets
from hyperhom.homcount import count_homs_labeled, naive_count_homs_labeled
from hyperhom.labeled import (BLUE, RED, Base, LabeledGraph, check_cert, eval_cert,
                              from_guard_fn, glue, labeled_isomorphic)
from hyperhom.logic import Guard
from hyperhom.quantum import (QuantumGraph, evaluate_polynomial, glue_power,
                              interpolating_polynomial, labels_graph, normalize_indicator,
                              power_zero, q_glue, q_lift, q_reclaim, q_scale, q_sum, q_switch,
                              qhom, reseat_sum, switch_factor)

import randomgen

EDGE = from_guard_fn({1: 1})


def _naive_qhom(quantum, host):
    return sum((c * naive_count_homs_labeled(g, host) for c, g in quantum.terms), Fraction(0))


def _host_for(rng, quantum, **options):
    return randomgen.labeled_host(rng, sorted(quantum.red_domain), sorted(quantum.blue_domain),
                                  quantum.guard, **options)


def test_single_term_is_plain_count():
    host = randomgen.labeled_host(random.Random(1), [1], [1], Guard({1: 1}))
    assert qhom(QuantumGraph.single(EDGE), host) == count_homs_labeled(EDGE, host)


def test_zero_coefficient_contributes_nothing():
    host = randomgen.labeled_host(random.Random(2), [1], [1], Guard({1: 1}))
    assert qhom(QuantumGraph.single(EDGE, 0), host) == 0


def test_halves_add_up():
    host = randomgen.labeled_host(random.Random(3), [1], [1], Guard({1: 1}))
    halves = QuantumGraph(((Fraction(1, 2), EDGE), (Fraction(1, 2), EDGE)))
    assert qhom(halves, host) == count_homs_labeled(EDGE, host)


def test_float_coefficients_are_rejected():
    with pytest.raises(TypeError):
        QuantumGraph(((0.5, EDGE),))


def test_components_must_be_compatible():
    with pytest.raises(IncompatibleQuantumGraph):
        QuantumGraph(((1, EDGE), (1, from_guard_fn({1: 2}))))
    with pytest.raises(IncompatibleQuantumGraph):
        QuantumGraph(())


def test_glue_multiplies_coefficients():
    other = LabeledGraph(IncidenceGraph.build([0, 1], [0], [(0, 0), (0, 1)]),
                         {1: 0}, {1: 0}, {1: 1})
    product = q_lift(QuantumGraph.single(EDGE, 2), "glue", QuantumGraph.single(other, 3))
    assert product.coefficients == [6]
    assert labeled_isomorphic(product.components[0], glue(EDGE, other))
    assert q_lift(QuantumGraph.single(EDGE), "glue", QuantumGraph.single(EDGE)).coefficients == [1]


def test_glue_has_one_term_per_pair():
    rng = random.Random(4)
    first = randomgen.quantum_graph(rng)
    second = QuantumGraph(tuple((c, randomgen.labeled_component(
        rng, sorted(first.red_domain), sorted(first.blue_domain), first.guard))
        for c in (1, 2)))
    assert q_glue(first, second).degree == first.degree * 2


def test_unknown_lifted_operation():
    with pytest.raises(ValueError):
        q_lift(QuantumGraph.single(EDGE), "merge", None)


def test_switch_side_condition():
    guard = Guard({1: 1, 2: 2})
    component = from_guard_fn(guard)
    with pytest.raises(NotATransition):
        q_switch(QuantumGraph.single(component), {1: 2})


def test_json_round_trip():
    quantum = randomgen.quantum_graph(random.Random(5))
    assert QuantumGraph.from_json(quantum.to_json()) == quantum
    data = quantum.to_json()
    assert all("/" in term["coef"] or term["coef"].lstrip("-").isdigit() for term in data["terms"])


@settings(max_examples=150, deadline=None)
@given(st.integers(0, 10**6))
def test_glue_is_multiplicative(seed):
    rng = random.Random(seed)
    first = randomgen.quantum_graph(rng, max_nodes=3)
    second = QuantumGraph(tuple(
        (rng.randint(-2, 2), randomgen.labeled_component(
            rng, sorted(first.red_domain), sorted(first.blue_domain), first.guard, 3, 3))
        for _ in range(rng.randint(1, 2))))
    host = _host_for(rng, first)
    glued = q_glue(first, second)
    assert qhom(glued, host) == qhom(first, host) * qhom(second, host)
    assert qhom(glued, host) == _naive_qhom(glued, host)


@settings(max_examples=120, deadline=None)
@given(st.integers(0, 10**6))
def test_reclaiming_red_sums_over_reseats(seed):
    rng = random.Random(seed)
    quantum = randomgen.quantum_graph(rng, max_nodes=3)
    if not quantum.red_domain:
        return
    released = rng.sample(sorted(quantum.red_domain), rng.randint(1, len(quantum.red_domain)))
    reclaimed = q_reclaim(quantum, RED, released)
    host = _host_for(rng, reclaimed)
    assert qhom(reclaimed, host) == reseat_sum(quantum, host, RED, released)
    assert qhom(reclaimed, host) == _naive_qhom(reclaimed, host)


@settings(max_examples=120, deadline=None)
@given(st.integers(0, 10**6))
def test_reclaiming_blue_sums_over_reseats(seed):
    rng = random.Random(seed)
    quantum = randomgen.quantum_graph(rng, max_nodes=3)
    free = sorted(quantum.blue_domain - quantum.guard.image)
    if not free:
        return
    released = rng.sample(free, rng.randint(1, len(free)))
    reclaimed = q_reclaim(quantum, BLUE, released)
    host = _host_for(rng, reclaimed)
    assert qhom(reclaimed, host) == reseat_sum(quantum, host, BLUE, released)
    assert qhom(reclaimed, host) == _naive_qhom(reclaimed, host)


@settings(max_examples=120, deadline=None)
@given(st.integers(0, 10**6))
def test_switch_factorizes(seed):
    rng = random.Random(seed)
    quantum = randomgen.quantum_graph(rng, max_nodes=3)
    transition = randomgen.random_transition(rng, quantum.guard, 2)
    if transition is None:
        return
    switched = q_switch(quantum, transition)
    host = _host_for(rng, switched, real_guards=rng.random() < 0.7)
    factor = switch_factor(transition, host)
    assert factor in (0, 1)
    refreshed = quantum.blue_domain & transition.image & quantum.guard.image
    expected = factor * reseat_sum(quantum, host, BLUE, refreshed)
    assert qhom(switched, host) == expected
    assert qhom(switched, host) == _naive_qhom(switched, host)


def test_power_zero_is_neutral():
    rng = random.Random(6)
    for _ in range(30):
        quantum = randomgen.quantum_graph(rng, max_nodes=3)
        host = _host_for(rng, quantum)
        assert qhom(power_zero(quantum), host) == 1
        assert qhom(glue_power(quantum, 2), host) == qhom(quantum, host) ** 2


def test_labels_graph_without_guards_is_empty():
    graph = labels_graph({})
    assert graph.graph.is_empty() and graph.label_free


def test_labels_graph_with_isolated_blue_label():
    graph = labels_graph({1: 1}, [2])
    assert len(graph.graph.blue) == 2 and len(graph.graph.red) == 1


def test_flip_polynomial():
    assert interpolating_polynomial([1], [0]) == [1, -1]


def test_constant_polynomial():
    assert interpolating_polynomial([], [0]) == [1]


def test_overlapping_sets_are_rejected():
    with pytest.raises(OverlappingIndicatorSets):
        interpolating_polynomial([1, 2], [2])
    with pytest.raises(OverlappingIndicatorSets):
        interpolating_polynomial([], [])


@settings(max_examples=100, deadline=None)
@given(st.sets(st.integers(-6, 12), max_size=5), st.sets(st.integers(-6, 12), max_size=5))
def test_interpolant_takes_prescribed_values(zeros, ones):
    ones -= zeros
    if not zeros and not ones:
        return
    coefficients = interpolating_polynomial(zeros, ones)
    assert len(coefficients) <= len(zeros) + len(ones)
    assert all(evaluate_polynomial(coefficients, x) == 0 for x in zeros)
    assert all(evaluate_polynomial(coefficients, y) == 1 for y in ones)


def test_flip_indicator_swaps_values():
    # Blue label 2 must touch red label 1; the guard edge 1 -> 1 is always real.
    component = LabeledGraph(IncidenceGraph.build([0], [0, 1], [(0, 0), (1, 0)]),
                             {1: 0}, {1: 0, 2: 1}, {1: 1})
    quantum = QuantumGraph.single(component)
    flipped = normalize_indicator(quantum, [1], [0])
    assert flipped.coefficients == [1, -1]
    on = LabeledGraph(IncidenceGraph.build([0], [0, 1], [(0, 0), (1, 0)]),
                      {1: 0}, {1: 0, 2: 1}, {1: 1})
    off = LabeledGraph(IncidenceGraph.build([0, 1], [0, 1], [(0, 0), (1, 1)]),
                       {1: 0}, {1: 0, 2: 1}, {1: 1})
    assert (qhom(quantum, on), qhom(flipped, on)) == (1, 0)
    assert (qhom(quantum, off), qhom(flipped, off)) == (0, 1)


def test_constant_indicator_is_power_zero():
    quantum = QuantumGraph.single(EDGE, 5)
    assert normalize_indicator(quantum, [], [0]) == power_zero(quantum)


@settings(max_examples=200, deadline=None)
@given(st.integers(0, 10**6))
def test_indicator_postconditions(seed):
    rng = random.Random(seed)
    quantum = randomgen.quantum_graph(rng, max_terms=2, max_nodes=3)
    host = _host_for(rng, quantum)
    value = qhom(quantum, host)
    others = [v for v in range(-4, 8) if v != value]
    zeros = set(rng.sample(others, rng.randint(0, 3)))
    ones = set(rng.sample([v for v in others if v not in zeros], rng.randint(0, 2)))
    if rng.random() < 0.5:
        zeros.add(value)
        expected = 0
    else:
        ones.add(value)
        expected = 1
    assert qhom(normalize_indicator(quantum, zeros, ones), host) == expected


def test_indicator_on_small_values():
    rng = random.Random(7)
    seen = set()
    # Counts the red nodes shared by the blue nodes labeled 1 and 2.
    shared = LabeledGraph(IncidenceGraph.build([0, 1], [0, 1], [(0, 0), (0, 1), (1, 1)]),
                          {1: 0}, {1: 0, 2: 1}, {1: 1})
    for _ in range(200):
        quantum = QuantumGraph.single(shared)
        host = _host_for(rng, quantum)
        value = qhom(quantum, host)
        if value > 2:
            continue
        seen.add(value)
        indicator = normalize_indicator(quantum, [0], [1, 2])
        assert qhom(indicator, host) == (0 if value == 0 else 1)
    assert seen == {0, 1, 2}


def test_indicator_of_certified_graph_stays_certified():
    rng = random.Random(9)
    for _ in range(20):
        cert = randomgen.certificate(rng, 2, steps=2)
        component = eval_cert(cert)
        quantum = QuantumGraph.single(component, certificate=cert)
        indicator = normalize_indicator(quantum, [0, 2], [1])
        assert indicator.certificates is not None
        for certificate, graph in zip(indicator.certificates, indicator.components):
            assert check_cert(certificate).valid
            assert labeled_isomorphic(eval_cert(certificate), graph)


def test_scale_and_sum():
    quantum = QuantumGraph.single(EDGE, 2)
    host = randomgen.labeled_host(random.Random(10), [1], [1], Guard({1: 1}))
    total = q_sum([quantum, q_scale(quantum, Fraction(-1, 2))])
    assert qhom(total, host) == qhom(quantum, host) / 2


def test_base_certificate_component():
    quantum = QuantumGraph.single(EDGE, certificate=Base(EDGE))
    assert q_glue(quantum, quantum).certificates is not None
