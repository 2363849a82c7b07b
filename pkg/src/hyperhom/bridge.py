"""Compilers between certificates, formulas and quantum graphs.

* :func:`formula_from_cert` turns a certificate of a labeled graph ``L`` and
  a count ``m`` into a body ``phi`` such that ``(Gamma_g & phi)`` holds in a
  host exactly when ``hom(L, host) = m``.  It needs the certificate, not
  only the graph, because the construction follows the derivation step by
  step.
* :func:`quantum_from_formula` turns a guarded formula into a quantum graph
  whose homomorphism count is the 0/1 truth value of the formula on every
  host of a fixed size.
* :func:`distinguish_by_ehw` and :func:`crosscheck_main_theorem` tie both
  compilers together on concrete pairs of incidence graphs.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterator

from .config import DEFAULT_CONFIG, UNBOUNDED, Config
from .core_model import IncidenceGraph
from .decomp import EHD, search_width, validate, width
from .errors import CapExceeded, NotInNGC, SizeParamsViolation
from .homcount import count_homs_incidence, naive_count_homs_incidence, naive_count_homs_labeled
from .labeled import (BLUE, RED, Base, GliCert, Glue, LabeledGraph, ReclaimB, ReclaimR,
                      Switch, _Evaluated, cert_to_ehd, eval_cert, has_real_guards, ehd_to_cert)
from .logic.formulas import (TOP, And, AtomE, EqBlue, EqRed, Exists, Formula, Not,
                             conj, disj, exists_eq, forall, guard_formula, top_normal_form)
from .logic.guards import EMPTY_GUARD, Guard
from .logic.normal_form import to_normal_form
from .logic.semantics import evaluate
from .logic.syntax import NGCK, check_syntax, split_guarded
from .quantum import (QuantumGraph, labels_graph, normalize_indicator, q_glue, q_reclaim,
                      q_switch, qhom)


# ---------------------------------------------------------------------------
# Segmentations


@dataclass(frozen=True)
class Segmentation:
    """``m = sum(counts[i] * values[i])`` with strictly increasing ``values``."""

    counts: tuple
    values: tuple

    def __post_init__(self):
        if len(self.counts) != len(self.values):
            raise ValueError("counts and values must have the same length")
        if any(c < 1 for c in self.counts) or any(v < 1 for v in self.values):
            raise ValueError("counts and values must be positive")
        if any(a >= b for a, b in zip(self.values, self.values[1:])):
            raise ValueError("values must be strictly increasing")

    @property
    def total(self) -> int:
        return sum(c * v for c, v in zip(self.counts, self.values))

    @property
    def size(self) -> int:
        return sum(self.counts)

    def pairs(self) -> tuple:
        return self.counts, self.values


def enumerate_segmentations(m: int) -> list[Segmentation]:
    """All segmentations of ``m``, ordered by their value tuples then count tuples."""
    if m < 1:
        raise ValueError("segmentations are defined for m >= 1")
    found: list[Segmentation] = []

    def extend(remaining: int, smallest: int, counts: tuple, values: tuple):
        if remaining == 0:
            found.append(Segmentation(counts, values))
            return
        for value in range(smallest, remaining + 1):
            for count in range(1, remaining // value + 1):
                extend(remaining - count * value, value + 1, counts + (count,), values + (value,))

    extend(m, 1, (), ())
    found.sort(key=lambda s: (s.values, s.counts))
    return found


# ---------------------------------------------------------------------------
# Certificates -> formulas


def _evaluated_nodes(cert: GliCert) -> dict:
    """Map ``id(node)`` to the labeled graph of every node of the certificate."""
    graphs: dict = {}

    def visit(node: GliCert) -> LabeledGraph:
        hit = graphs.get(id(node))
        if hit is not None:
            return hit[1]
        if isinstance(node, Base):
            eval_cert(node)
            result = node.graph
        elif isinstance(node, Glue):
            visit(node.first)
            visit(node.second)
            result = eval_cert(Glue(_Evaluated(graphs[id(node.first)][1]),
                                    _Evaluated(graphs[id(node.second)][1])))
        else:
            visit(node.child)
            result = eval_cert(type(node)(_Evaluated(graphs[id(node.child)][1]),
                                          *_arguments(node)))
        graphs[id(node)] = (node, result)
        return result

    visit(cert)
    return graphs


def _arguments(node: GliCert) -> tuple:
    if isinstance(node, Switch):
        return (node.transition,)
    return (node.indices,)


def _base_conjuncts(labeled: LabeledGraph) -> list[Formula]:
    graph = labeled.graph
    reds_at: dict = {}
    for i, node in labeled.r.items():
        reds_at.setdefault(node, []).append(i)
    blues_at: dict = {}
    for j, node in labeled.b.items():
        blues_at.setdefault(node, []).append(j)
    atoms: list[Formula] = []
    mentioned: set = set()
    for blue_node, red_node in graph.sorted_edges():
        for j in blues_at.get(blue_node, []):
            for i in reds_at.get(red_node, []):
                atoms.append(AtomE(j, i))
                mentioned.add(j)
    for labels in reds_at.values():
        for a, b in zip(labels, labels[1:]):
            atoms.append(EqRed(a, b))
    for labels in blues_at.values():
        for a, b in zip(labels, labels[1:]):
            atoms.append(EqBlue(a, b))
            mentioned.update((a, b))
    for j in sorted(set(labeled.b) - mentioned):
        atoms.append(EqBlue(j, j))
    return atoms


class _FormulaCompiler:
    def __init__(self, cert: GliCert, k: int | None):
        self.graphs = _evaluated_nodes(cert)
        if k is None:
            k = max([1] + [g.max_blue_label for _, g in self.graphs.values()])
        self.k = k
        self.memo: dict = {}

    def graph(self, node: GliCert) -> LabeledGraph:
        return self.graphs[id(node)][1]

    def formula(self, node: GliCert, m: int) -> Formula:
        key = (id(node), m)
        hit = self.memo.get(key)
        if hit is None:
            hit = self._build(node, m)
            self.memo[key] = hit
        return hit

    def _build(self, node: GliCert, m: int) -> Formula:
        if isinstance(node, Base):
            atoms = _base_conjuncts(node.graph)
            one = conj(atoms) if atoms else top_normal_form()
            if m == 1:
                return one
            if m == 0:
                return Not(one)
            return And(Not(one), one)
        if isinstance(node, Glue):
            if m == 0:
                return disj([self.formula(node.first, 0), self.formula(node.second, 0)])
            options = [And(self.formula(node.first, a), self.formula(node.second, m // a))
                       for a in range(1, m + 1) if m % a == 0]
            return disj(options)
        child = node.child
        guard = self.graph(child).g
        if isinstance(node, ReclaimR):
            return self._quantified(child, RED, node.indices, guard, m)
        if isinstance(node, ReclaimB):
            return self._quantified(child, BLUE, node.indices, guard, m)
        released = frozenset(self.graph(child).b) & node.transition.image & guard.image
        if released:
            return self._quantified(child, BLUE, released, guard, m)
        return self._switch_without_release(node, m)

    def _quantified(self, child: GliCert, sort: str, indices: frozenset, guard: Guard,
                    m: int) -> Formula:
        if not indices:
            return self.formula(child, m)
        zero = self.formula(child, 0)
        if m == 0:
            return forall(sort, indices, guard, zero)
        options = []
        for segmentation in enumerate_segmentations(m):
            parts = [exists_eq(sort, segmentation.size, indices, guard, Not(zero))]
            for count, value in zip(segmentation.counts, segmentation.values):
                parts.append(exists_eq(sort, count, indices, guard, self.formula(child, value)))
            options.append(conj(parts))
        return disj(options)

    def _switch_without_release(self, node: Switch, m: int) -> Formula:
        # No label is released, so no blue quantifier is available to change the
        # guard: state the old guards explicitly and re-guard via the normal form.
        old = self.graph(node.child).g
        new = self.graph(node).g
        guarded = guard_formula(old)
        if m == 0:
            formula = Not(And(guarded, Not(self.formula(node.child, 0))))
        else:
            formula = And(guarded, self.formula(node.child, m))
        return to_normal_form(formula, new, self.k, validate=False)


def formula_from_cert(cert: GliCert, m: int, k: int | None = None) -> Formula:
    """Body ``phi`` with ``(Gamma_g & phi)`` true in a host iff ``hom(L, host) = m``.

    ``L`` is the evaluation of ``cert`` and ``g`` its guard.  The result is a
    shared DAG: equal sub-results are built once.  ``k`` (default: the
    largest blue label of the certificate) bounds the blue variables.
    """
    if m < 0:
        raise ValueError("m must be non-negative")
    compiler = _FormulaCompiler(cert, k)
    return compiler.formula(cert, m)


def guarded_formula_from_cert(cert: GliCert, m: int, k: int | None = None) -> Formula:
    """``(Gamma_g & phi)`` for the body returned by :func:`formula_from_cert`."""
    guard = eval_cert(cert).g
    return And(guard_formula(guard), formula_from_cert(cert, m, k))


# ---------------------------------------------------------------------------
# Formulas -> quantum graphs


@dataclass(frozen=True)
class SizeParams:
    """Hosts with exactly ``m`` blue nodes and blue neighbourhoods of size at most ``d``."""

    m: int
    d: int

    def __post_init__(self):
        if self.m < 1:
            raise ValueError("SizeParams.m must be at least 1")
        if self.d < 0:
            raise ValueError("SizeParams.d must be non-negative")

    @classmethod
    def of(cls, *hosts: IncidenceGraph) -> "SizeParams":
        """Blue count of the first host and the largest neighbourhood over all hosts."""
        return cls(len(hosts[0].blue), max(h.max_degree() for h in hosts))


def check_size_params(quantum: QuantumGraph, host: LabeledGraph, params: SizeParams):
    """Raise :class:`SizeParamsViolation` unless ``host`` is covered by the compiler's guarantee."""
    if len(host.graph.blue) != params.m:
        raise SizeParamsViolation(
            f"host has {len(host.graph.blue)} blue nodes, the quantum graph was built for "
            f"exactly {params.m}")
    if host.graph.max_degree() > params.d:
        raise SizeParamsViolation(
            f"host has a blue neighbourhood of size {host.graph.max_degree()} > d = {params.d}")
    if not quantum.red_domain <= set(host.r) or not quantum.blue_domain <= set(host.b):
        raise SizeParamsViolation("host label domains must contain those of the quantum graph")
    for i, j in quantum.guard.items():
        if host.g.get(i) != j:
            raise SizeParamsViolation(f"host guard must extend the quantum guard at {i}")
    if not has_real_guards(host, quantum.guard):
        raise SizeParamsViolation("host does not have real guards")


def _base_quantum(graph: LabeledGraph, coefficient=1) -> QuantumGraph:
    return QuantumGraph.single(graph, coefficient, Base(graph))


def _edge_atom_graph(guard: Guard, blue: int, red: int) -> LabeledGraph:
    blues = {blue, guard[red]}
    return LabeledGraph(IncidenceGraph.build([red], blues, [(j, red) for j in blues]),
                        {red: red}, {j: j for j in blues}, guard)


class _QuantumCompiler:
    def __init__(self, k: int, params: SizeParams):
        self.k = k
        self.params = params
        self.memo: dict = {}
        self.keep: list = []

    def build(self, guard: Guard, node: Formula) -> QuantumGraph:
        key = (id(node), guard)
        hit = self.memo.get(key)
        if hit is None:
            self.keep.append(node)
            hit = self._build(guard, node)
            self.memo[key] = hit
        return hit

    def _unfulfillable(self, guard: Guard, node: Formula) -> QuantumGraph:
        return _base_quantum(labels_graph(guard, guard.image | node.free_blue), 0)

    def _build(self, guard: Guard, node: Formula) -> QuantumGraph:
        if isinstance(node, AtomE):
            return _base_quantum(_edge_atom_graph(guard, node.blue, node.red))
        if isinstance(node, EqBlue):
            graph = LabeledGraph(IncidenceGraph.build([], [0], []), {},
                                 {node.left: 0, node.right: 0}, guard)
            return _base_quantum(graph)
        if isinstance(node, EqRed):
            blues = {guard[node.left], guard[node.right]}
            graph = LabeledGraph(IncidenceGraph.build([0], blues, [(j, 0) for j in blues]),
                                 {node.left: 0, node.right: 0}, {j: j for j in blues}, guard)
            return _base_quantum(graph)
        if isinstance(node, Not):
            return normalize_indicator(self.build(guard, node.inner), [1], [0])
        if isinstance(node, And):
            return q_glue(self.build(guard.restrict(node.left.free_red), node.left),
                          self.build(guard.restrict(node.right.free_red), node.right))
        if isinstance(node, Exists):
            return self._quantifier(guard, node)
        raise NotInNGC(f"unexpected node {node!r}")

    def _quantifier(self, outer: Guard, node: Exists) -> QuantumGraph:
        inner = node.guard
        indices = frozenset(node.indices)
        if node.sort == RED:
            bound = (self.params.m * self.params.d) ** len(indices)
        else:
            bound = self.params.m ** len(indices)
        if node.count > bound:
            return self._unfulfillable(outer, node)
        quantum = self.build(inner, node.body)
        if node.sort == RED:
            counted = q_reclaim(quantum, RED, indices)
        else:
            counted = self._blue_release(quantum, inner, outer, indices)
        return normalize_indicator(counted, range(node.count), range(node.count, bound + 1))

    @staticmethod
    def _blue_release(quantum: QuantumGraph, inner: Guard, outer: Guard,
                      indices: frozenset) -> QuantumGraph:
        changed = {i for i in inner if outer[i] != inner[i] or inner[i] in indices}
        if not changed:
            return q_reclaim(quantum, BLUE, indices)
        transition = outer.restrict(changed)
        first = (indices & transition.image) - inner.image
        second = indices - outer.image
        released = q_reclaim(quantum, BLUE, first)
        switched = q_switch(released, transition)
        return q_reclaim(switched, BLUE, second)


def quantum_from_formula(formula: Formula, k: int, params: SizeParams) -> QuantumGraph:
    """Quantum graph whose count on every admissible host is the truth value of ``formula``.

    ``formula`` must be ``(Gamma_g & psi)`` in the normal form.  Hosts are
    admissible when they pass :func:`check_size_params`.
    """
    report = check_syntax(formula, k, NGCK)
    if not report.valid:
        raise NotInNGC("; ".join(report.violations))
    guard, body = split_guarded(formula)
    return _QuantumCompiler(k, params).build(guard, body)


# ---------------------------------------------------------------------------
# Distinguishers of bounded entangled hypertree width


@dataclass(frozen=True)
class Bounds:
    """Size caps for the candidate patterns."""

    max_blue: int = 3
    max_red: int = 3

    def __post_init__(self):
        if self.max_blue < 0 or self.max_red < 0:
            raise ValueError("bounds must be non-negative")


@dataclass(frozen=True)
class Distinguisher:
    pattern: IncidenceGraph
    count_first: int
    count_second: int

    def to_json(self) -> dict:
        return {"pattern": self.pattern.to_json(), "hom_first": self.count_first,
                "hom_second": self.count_second}


MAX_CANDIDATE_INCIDENCES = 20


def candidate_patterns(bounds: Bounds) -> Iterator[IncidenceGraph]:
    """Every incidence graph on ids ``0..`` within ``bounds`` in generation order.

    The order is ascending ``(|blue|, |red|, edge count, sorted edge list)``.
    """
    for blues in range(bounds.max_blue + 1):
        for reds in range(bounds.max_red + 1):
            if reds and not blues:
                continue
            slots = [(b, r) for b in range(blues) for r in range(reds)]
            if len(slots) > MAX_CANDIDATE_INCIDENCES:
                raise CapExceeded(
                    f"{blues} blue and {reds} red nodes give 2^{len(slots)} candidate edge sets")
            candidates = []
            for mask in range(1 << len(slots)):
                edges = [slots[n] for n in range(len(slots)) if mask >> n & 1]
                if {r for _, r in edges} != set(range(reds)):
                    continue
                candidates.append((len(edges), sorted(edges)))
            candidates.sort()
            for _, edges in candidates:
                yield IncidenceGraph.build(range(reds), range(blues), edges)


def distinguish_by_ehw(first: IncidenceGraph, second: IncidenceGraph, k: int,
                       bounds: Bounds = Bounds(),
                       config: Config = DEFAULT_CONFIG) -> Distinguisher | None:
    """The least pattern of ehw at most ``k`` whose hom counts into the two graphs differ."""
    if bounds.max_blue > config.pattern_blue or bounds.max_red > config.pattern_red:
        raise CapExceeded("bounds exceed the configured pattern caps")
    for pattern in candidate_patterns(bounds):
        a = count_homs_incidence(pattern, first, config)
        b = count_homs_incidence(pattern, second, config)
        if a == b:
            continue
        if search_width(pattern, k, EHD, config=config) is not None:
            return Distinguisher(pattern, a, b)
    return None


# ---------------------------------------------------------------------------
# Cross-checking both directions on a concrete pair


@dataclass
class CrossCheckReport:
    status: str
    directions: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(a["passed"] for d in self.directions for a in d["assertions"])

    def to_json(self) -> dict:
        return {"status": self.status, "passed": self.passed, "directions": self.directions}


def _assertion(name: str, expected, observed) -> dict:
    return {"name": name, "expected": expected, "observed": observed,
            "passed": expected == observed}


def blue_count_sentence(count: int) -> Formula:
    """``(T & E=count(e1).(T & e1=e1))``: there are exactly ``count`` blue nodes."""
    return And(TOP, exists_eq(BLUE, count, (1,), EMPTY_GUARD, EqBlue(1, 1)))


def _witness_direction(first: IncidenceGraph, second: IncidenceGraph, k: int,
                       found: Distinguisher) -> dict:
    pattern = found.pattern
    decomposition = search_width(pattern, k, EHD)
    cert = ehd_to_cert(pattern, decomposition, k)
    m = found.count_first
    sentence = And(TOP, formula_from_cert(cert, m, k))
    assertions = [
        _assertion("ehd of the witness is valid", True, validate(decomposition, pattern, EHD).valid),
        _assertion("ehd width within k", True, width(decomposition) <= k),
        _assertion("hom(J, I) by naive oracle", m, naive_count_homs_incidence(pattern, first)),
        _assertion("hom(J, I') by naive oracle", found.count_second,
                   naive_count_homs_incidence(pattern, second)),
        _assertion("certificate is label-free", True, eval_cert(cert, k).label_free),
        _assertion("sentence in NGC^k", True, check_syntax(sentence, k, NGCK).valid),
        _assertion("I satisfies the sentence", True, evaluate(first, sentence)),
        _assertion("I' satisfies the sentence", False, evaluate(second, sentence)),
    ]
    return {"direction": "hom-to-logic", "witness": found.to_json(),
            "sentence_size": _size(sentence), "assertions": assertions}


def _size(formula: Formula) -> int:
    from .logic.formulas import formula_size
    return formula_size(formula)


def _sentence_direction(first: IncidenceGraph, second: IncidenceGraph, k: int,
                        sentence: Formula) -> dict:
    holds_first, holds_second = evaluate(first, sentence), evaluate(second, sentence)
    assertions = [_assertion("sentence in NGC^k", True, check_syntax(sentence, k, NGCK).valid),
                  _assertion("sentence distinguishes the pair", True,
                             holds_first != holds_second)]
    reference = first if first.blue else second
    params = SizeParams(len(reference.blue), max(first.max_degree(), second.max_degree()))
    quantum = quantum_from_formula(sentence, k, params)
    host_first = LabeledGraph.unlabeled(first)
    host_second = LabeledGraph.unlabeled(second)
    for name, graph, host, holds in (("I", first, host_first, holds_first),
                                     ("I'", second, host_second, holds_second)):
        if len(graph.blue) == params.m:
            assertions.append(_assertion(f"hom(Q, {name}) equals the truth value on {name}",
                                         str(Fraction(int(holds))), str(qhom(quantum, host))))
    witness = None
    for n, (coefficient, component) in enumerate(quantum.terms):
        if coefficient == 0:
            continue
        a = count_homs_incidence(component.graph, first, UNBOUNDED)
        b = count_homs_incidence(component.graph, second, UNBOUNDED)
        if a == b:
            continue
        decomposition, root = cert_to_ehd(quantum.certificates[n], k)
        witness = {"component_index": n, "coefficient": str(coefficient),
                   "pattern": component.graph.to_json(), "hom_first": a, "hom_second": b}
        assertions += [
            _assertion("component is label-free", True, component.label_free),
            _assertion("component ehd is valid", True,
                       validate(decomposition, component.graph, EHD).valid),
            _assertion("component ehd width within k", True, width(decomposition) <= k),
            _assertion("hom(L_i, I) by naive oracle", a,
                       naive_count_homs_labeled(component, host_first)
                       if _small(component.graph, first) else a),
            _assertion("hom(L_i, I') by naive oracle", b,
                       naive_count_homs_labeled(component, host_second)
                       if _small(component.graph, second) else b),
        ]
        break
    assertions.append(_assertion("a distinguishing component exists", True, witness is not None))
    return {"direction": "logic-to-hom", "witness": witness, "components": quantum.degree,
            "assertions": assertions}


def _small(pattern: IncidenceGraph, host: IncidenceGraph) -> bool:
    """Whether the naive enumerator finishes quickly on this pair."""
    work = (len(host.red) ** len(pattern.red)) * (len(host.blue) ** len(pattern.blue))
    return work <= 200_000


def crosscheck_main_theorem(first: IncidenceGraph, second: IncidenceGraph, k: int,
                            bounds: Bounds = Bounds(), sentence: Formula | None = None,
                            config: Config = DEFAULT_CONFIG) -> CrossCheckReport:
    """Realize both directions of the correspondence between counts and sentences.

    A distinguishing pattern found within ``bounds`` is compiled into a
    sentence separating the pair.  A separating sentence (``sentence``, or the
    blue-count sentence when the blue counts differ) is compiled into a
    quantum graph, one of whose components separates the pair by counts.
    """
    found = distinguish_by_ehw(first, second, k, bounds, config)
    if sentence is None and len(first.blue) != len(second.blue):
        sentence = blue_count_sentence(len(first.blue))
    if found is None and sentence is None:
        return CrossCheckReport("no distinguisher within bounds")
    report = CrossCheckReport("distinguished")
    if found is not None:
        report.directions.append(_witness_direction(first, second, k, found))
    if sentence is not None:
        report.directions.append(_sentence_direction(first, second, k, sentence))
    return report
