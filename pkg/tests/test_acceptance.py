"""Acceptance suite: one test per criterion, each printing a PASS/FAIL line and its runtime."""

import random
import time

import pytest

from hyperhom.bridge import (Bounds, SizeParams, check_size_params, crosscheck_main_theorem,
                             distinguish_by_ehw, guarded_formula_from_cert, quantum_from_formula)
from hyperhom.config import Config
from hyperhom.core_model import Hypergraph, isomorphic, to_incidence
from hyperhom.decomp import EHD, GHD, TreeDecomp, ghd_to_ehd, search_width, validate, width
from hyperhom.fixtures import (connectedness_before, decomposition_graph, decomposition_tree,
                               disjoint_large_edges_sentence, precision_before,
                               triangles_hypergraph, triangles_sentence)
from hyperhom.homcount import (AUTO, BLUE_FIRST, RED_FIRST, count_homs_incidence,
                               count_homs_labeled, naive_count_homs_incidence)
from hyperhom.labeled import (BLUE, RED, check_plan, ehd_to_cert, eval_cert, has_real_guards,
                              plan_traversal)
from hyperhom.logic import (NGCK, TOP, And, Guard, check_syntax, evaluate, free_vars,
                            guard_formula, to_normal_form)
from hyperhom.quantum import (QuantumGraph, normalize_indicator, q_glue, q_reclaim, q_switch,
                              qhom, reseat_sum, switch_factor)

import corpus
import randomgen


@pytest.fixture
def report(capsys):
    """Print one verdict line (bypassing capture) and return the collected failures."""
    def emit(number, title, started, limit, failures, detail):
        elapsed = time.perf_counter() - started
        verdict = "PASS" if not failures and elapsed < limit else "FAIL"
        with capsys.disabled():
            print(f"\n{verdict} acceptance {number}: {title} [{detail}; "
                  f"{elapsed:.1f}s of {limit}s]")
        assert failures == [], failures[:5]
        assert elapsed < limit, f"took {elapsed:.1f}s, limit {limit}s"
    return emit


def _mutant(edit):
    incidence = {e: set(v) for e, v in triangles_hypergraph().incidence.items()}
    edit(incidence)
    vertices = set().union(*incidence.values())
    return to_incidence(Hypergraph.build(vertices, incidence))


def _delete_two_edge(incidence):
    del incidence["e12"]


def _merge_vertices(incidence):
    for members in incidence.values():
        if 4 in members:
            members.discard(4)
            members.add(1)


def _add_vertex(incidence):
    incidence["e12"].add(4)


def _duplicate_edge(incidence):
    incidence["e12_copy"] = set(incidence["e12"])


def _swap_incidence(incidence):
    incidence["e12"].discard(2)
    incidence["e12"].add(4)


def test_fixture_sentence_characterises_triangles(report):
    started = time.perf_counter()
    sentence = triangles_sentence()
    failures = []
    if not evaluate(to_incidence(triangles_hypergraph()), sentence):
        failures.append("fixture does not satisfy its sentence")
    edits = [_delete_two_edge, _merge_vertices, _add_vertex, _duplicate_edge, _swap_incidence]
    for edit in edits:
        if evaluate(_mutant(edit), sentence):
            failures.append(f"mutant {edit.__name__} satisfies the sentence")
    report(1, "sentence holds on the fixture and fails on 5 single-edit mutants", started, 10,
           failures, f"{len(edits)} mutants")


def test_worked_decomposition_pipeline(report):
    started = time.perf_counter()
    graph, tree = decomposition_graph(), decomposition_tree()
    failures = []
    check = validate(tree, graph, EHD)
    if not check.valid or width(tree) != 2:
        failures.append(("ehd", check.violations, width(tree)))
    plan = plan_traversal(tree, "t1", graph, 2)
    problems = check_plan(tree, "t1", graph, plan, 2)
    if problems:
        failures.append(("plan", problems))
    result = eval_cert(ehd_to_cert(graph, tree, 2), 2)
    if not result.label_free or not isomorphic(result.graph, graph):
        failures.append("certificate does not evaluate to the graph")
    report(2, "worked ehd validates, plans cleanly and round-trips through a certificate",
           started, 5, failures, "width 2")


def test_fixture_sentences_are_normal(report):
    started = time.perf_counter()
    failures = []
    for name, sentence in (("disjoint large edges", disjoint_large_edges_sentence()),
                           ("triangles", triangles_sentence())):
        check = check_syntax(And(TOP, sentence), 2, NGCK)
        if not check.valid:
            failures.append((name, check.violations[:3]))
    report(3, "both fixture sentences pass the normal-form syntax check", started, 1,
           failures, "2 sentences")


def test_normal_form_suite(report):
    started = time.perf_counter()
    rng = random.Random(0)
    graphs = list(randomgen.all_incidence_graphs(2, 3))
    failures, formulas, guards = [], 0, 0
    while formulas < 200:
        formula = randomgen.gc_formula(rng, rng.randint(1, 3), 2, red_max=4, max_count=2)
        formulas += 1
        for guard in randomgen.guards_for(formula.free_red, 2):
            guards += 1
            normal = And(guard_formula(guard), to_normal_form(formula, guard, 2))
            original = And(guard_formula(guard), formula)
            if not check_syntax(normal, 2, NGCK).valid:
                failures.append(("syntax", formula, guard))
            if free_vars(normal) != free_vars(original):
                failures.append(("free variables", formula, guard))
            blue_free = formula.free_blue | guard.image
            for graph in graphs:
                for red, blue in randomgen.assignments(graph, formula.free_red, blue_free):
                    if evaluate(graph, original, red, blue) != evaluate(graph, normal, red, blue):
                        failures.append(("semantics", formula, guard, graph))
    report(4, "normal form is syntactically normal, keeps free variables and is equivalent",
           started, 120, failures, f"{formulas} formulas, {guards} guards, {len(graphs)} graphs")


def _compatible_quantum(rng, like):
    terms = tuple((rng.randint(-2, 2), randomgen.labeled_component(
        rng, sorted(like.red_domain), sorted(like.blue_domain), like.guard, 4, 4))
        for _ in range(rng.randint(1, 2)))
    return QuantumGraph(terms)


def _host(rng, quantum, **options):
    return randomgen.labeled_host(rng, sorted(quantum.red_domain), sorted(quantum.blue_domain),
                                  quantum.guard, **options)


def _identity_instance(rng, kind):
    """``(left, right)`` for one identity, or ``None`` when the sample does not apply."""
    quantum = randomgen.quantum_graph(rng, max_terms=2, max_nodes=4)
    if kind == 0:
        other = _compatible_quantum(rng, quantum)
        host = _host(rng, quantum)
        return qhom(q_glue(quantum, other), host), qhom(quantum, host) * qhom(other, host)
    if kind == 1:
        if not quantum.red_domain:
            return None
        released = rng.sample(sorted(quantum.red_domain), rng.randint(1, len(quantum.red_domain)))
        reclaimed = q_reclaim(quantum, RED, released)
        host = _host(rng, reclaimed)
        return qhom(reclaimed, host), reseat_sum(quantum, host, RED, released)
    if kind == 2:
        free = sorted(quantum.blue_domain - quantum.guard.image)
        if not free:
            return None
        released = rng.sample(free, rng.randint(1, len(free)))
        reclaimed = q_reclaim(quantum, BLUE, released)
        host = _host(rng, reclaimed)
        return qhom(reclaimed, host), reseat_sum(quantum, host, BLUE, released)
    transition = randomgen.random_transition(rng, quantum.guard, 2)
    if transition is None:
        return None
    switched = q_switch(quantum, transition)
    host = _host(rng, switched, real_guards=rng.random() < 0.7)
    factor = switch_factor(transition, host)
    if factor not in (0, 1):
        return factor, "0 or 1"
    refreshed = quantum.blue_domain & transition.image & quantum.guard.image
    return qhom(switched, host), factor * reseat_sum(quantum, host, BLUE, refreshed)


def test_counting_identities(report):
    started = time.perf_counter()
    rng = random.Random(1)
    counts = [0, 0, 0, 0]
    failures = []
    while min(counts) < 125:
        kind = min(range(4), key=counts.__getitem__)
        instance = _identity_instance(rng, kind)
        if instance is None:
            continue
        counts[kind] += 1
        if instance[0] != instance[1]:
            failures.append((kind, instance))
    report(5, "glue, red reclaim, blue reclaim and switch counting identities", started, 120,
           failures, f"{sum(counts)} instances {counts}")


def test_indicator_suite(report):
    started = time.perf_counter()
    rng = random.Random(2)
    failures = []
    for _ in range(200):
        quantum = randomgen.quantum_graph(rng, max_terms=2, max_nodes=3)
        host = _host(rng, quantum)
        if not has_real_guards(host, quantum.guard):
            failures.append("generated host lacks real guards")
        value = qhom(quantum, host)
        pool = [v for v in range(-3, 7) if v != value]
        zeros = set(rng.sample(pool, rng.randint(0, 3)))
        ones = set(rng.sample([v for v in pool if v not in zeros], rng.randint(0, 2)))
        expected = rng.randint(0, 1)
        (ones if expected else zeros).add(value)
        observed = qhom(normalize_indicator(quantum, zeros, ones), host)
        if observed != expected:
            failures.append((value, zeros, ones, observed))
    report(6, "indicator normalization is 0 on X and 1 on Y", started, 60, failures,
           "200 instances")


def test_formulas_from_certificates(report):
    started = time.perf_counter()
    rng = random.Random(3)
    failures = []
    matches = 0
    for _ in range(300):
        cert = randomgen.certificate(rng, 2, steps=rng.randint(0, 4))
        labeled = eval_cert(cert)
        host = randomgen.labeled_host(rng, sorted(labeled.r), sorted(labeled.b), labeled.g)
        count = count_homs_labeled(labeled, host)
        m = min(count, 6) if rng.random() < 0.5 else rng.randint(0, 6)
        matches += count == m
        formula = guarded_formula_from_cert(cert, m, 2)
        if not check_syntax(formula, 2, NGCK).valid:
            failures.append(("syntax", cert))
        if evaluate(host.graph, formula, dict(host.r), dict(host.b)) != (count == m):
            failures.append(("biconditional", cert, m, count))
    report(7, "certificate formula holds exactly when the count equals m", started, 180,
           failures, f"300 triples, {matches} with equal count")


def test_quantum_graphs_from_formulas(report):
    started = time.perf_counter()
    rng = random.Random(2)
    failures = []
    pairs = truths = 0
    while pairs < 300:
        formula = randomgen.gc_formula(rng, rng.randint(1, 3), 2, red_max=3, max_count=2)
        guard = Guard({i: rng.randint(1, 2) for i in formula.free_red})
        sentence = And(guard_formula(guard), to_normal_form(formula, guard, 2))
        params = SizeParams(rng.randint(1, 2), rng.randint(1, 2))
        quantum = quantum_from_formula(sentence, 2, params)
        for _ in range(3):
            host = randomgen.labeled_host(rng, sorted(guard), sorted(sentence.free_blue), guard,
                                          exact_blue=params.m, max_red=3, max_degree=params.d)
            check_size_params(quantum, host, params)
            value = qhom(quantum, host)
            truth = evaluate(host.graph, sentence, dict(host.r), dict(host.b))
            truths += truth
            pairs += 1
            if value not in (0, 1) or value != int(truth):
                failures.append((sentence, value, truth))
    report(8, "quantum graph of a formula counts its truth value", started, 180, failures,
           f"{pairs} pairs, {truths} true")


def _widen_covers(rng, pattern, tree):
    """Add random blue nodes to covers: still a ghd, usually no longer an ehd."""
    cover = {n: set(tree.cover[n]) for n in tree.nodes}
    for _ in range(rng.randint(1, 2)):
        cover[rng.choice(tree.nodes)].add(rng.choice(pattern.blue))
    return TreeDecomp.build(tree.nodes, tree.tree_edges, dict(tree.bag), cover)


def _pipeline_instances(rng):
    """``(pattern, ghd, first, second)`` with differing counts, fixtures first."""
    single_blue = to_incidence(Hypergraph.build([], {"e": []}))
    for graph, tree in (precision_before(), connectedness_before()):
        yield graph, tree, graph, single_blue
    while True:
        pattern = randomgen.incidence_graph(rng, 4, 4, min_blue=2, density=0.5)
        tree = search_width(pattern, 2, GHD)
        if tree is None:
            continue
        tree = _widen_covers(rng, pattern, tree)
        first = randomgen.incidence_graph(rng, 3, 3, min_blue=1)
        second = randomgen.incidence_graph(rng, 3, 3, min_blue=1)
        if naive_count_homs_incidence(pattern, first) == naive_count_homs_incidence(pattern,
                                                                                    second):
            continue
        yield pattern, tree, first, second


def test_ghd_to_ehd_pipeline(report):
    started = time.perf_counter()
    rng = random.Random(4)
    config = Config(pattern_blue=40, pattern_red=40, host_blue=40, host_red=40)
    failures = []
    instances = pumped = 0
    for pattern, tree, first, second in _pipeline_instances(rng):
        if instances == 50:
            break
        instances += 1
        if not validate(tree, pattern, GHD).valid:
            failures.append(("input is not a ghd", pattern))
        steps = []
        result_pattern, result = ghd_to_ehd(pattern, tree, first, second, config, steps=steps)
        pumped += bool(steps)
        if not validate(result, result_pattern, EHD).valid:
            failures.append(("not an ehd", pattern))
        if width(result) > width(tree):
            failures.append(("width grew", pattern))
        a = count_homs_incidence(result_pattern, first, config)
        b = count_homs_incidence(result_pattern, second, config)
        if a == b:
            failures.append(("counts agree", pattern))
    report(9, "ghd to ehd keeps width and a count difference", started, 180, failures,
           f"{instances} instances, {pumped} needed pumping")


def test_main_theorem_crosscheck(report):
    started = time.perf_counter()
    failures = []
    mismatch = control = 0
    for first_edges, second_edges, name in corpus.PAIRS:
        first = corpus.hypergraph_incidence(first_edges)
        second = corpus.hypergraph_incidence(second_edges)
        sentence = corpus.sentence(name) if name else None
        result = crosscheck_main_theorem(first, second, 2, Bounds(3, 3), sentence)
        witness = distinguish_by_ehw(first, second, 2, Bounds(3, 3))
        directions = [d["direction"] for d in result.directions]
        if len(first.blue) != len(second.blue):
            mismatch += 1
        if isomorphic(first, second):
            control += 1
            if result.status != "no distinguisher within bounds" or witness is not None:
                failures.append(("isomorphic pair distinguished", first_edges))
            continue
        if not result.passed:
            failures.append(("assertion failed", first_edges, second_edges))
        if witness is not None and "hom-to-logic" not in directions:
            failures.append(("witness not compiled", first_edges))
        if sentence is not None and "logic-to-hom" not in directions:
            failures.append(("sentence not compiled", first_edges))
    if not mismatch or not control:
        failures.append("corpus lacks a blue-count mismatch or an isomorphic control")
    report(10, "both directions of the count/sentence correspondence on the corpus", started,
           300, failures, f"{len(corpus.PAIRS)} pairs, {mismatch} blue mismatch, "
                          f"{control} isomorphic")


def _counts_agree(pattern, host):
    expected = naive_count_homs_incidence(pattern, host)
    return all(count_homs_incidence(pattern, host, engine=engine) == expected
               for engine in (AUTO, BLUE_FIRST, RED_FIRST))


def test_backtracking_matches_enumeration(report):
    started = time.perf_counter()
    failures = []
    larger = list(randomgen.all_incidence_graphs(3, 3))
    smaller = list(randomgen.all_incidence_graphs(2, 3))
    exhaustive = 0
    for pattern in larger:
        for host in smaller:
            exhaustive += 2
            if not _counts_agree(pattern, host) or not _counts_agree(host, pattern):
                failures.append((pattern, host))
    rng = random.Random(5)
    sampled = 0
    while sampled < 1000:
        pattern = randomgen.incidence_graph(rng, 4, 4)
        host = randomgen.incidence_graph(rng, 5, 5, min_blue=1)
        work = len(host.red) ** len(pattern.red) * len(host.blue) ** len(pattern.blue)
        if work > 40_000:
            continue
        sampled += 1
        if not _counts_agree(pattern, host):
            failures.append((pattern, host))
    report(11, "backtracking counter equals full enumeration", started, 120, failures,
           f"{exhaustive} exhaustive pairs (3+3 x 2+3 families), {sampled} random pairs")
