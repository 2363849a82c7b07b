"""Quantum graphs: exact rational linear combinations of labeled graphs.

All components of a quantum graph share the red label domain, the blue
label domain and the guard map.  Homomorphism counts extend linearly, the
label operations apply componentwise and glueing multiplies out.  Every
component may carry the certificate it was derived with, so that membership
of the components in the guarded class stays checkable.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import product
from typing import Iterable, Mapping, Sequence

from .config import UNBOUNDED, Config
from .core_model import IncidenceGraph
from .errors import (IncompatibleQuantumGraph, InvalidLabeling, NotATransition,
                     OverlappingIndicatorSets)
from .homcount import count_homs_labeled
from .labeled import (BLUE, RED, Base, GliCert, Glue, LabeledGraph, from_guard_fn,
                      glue, reclaim, reclaim_b, reclaim_r, reseat, switch,
                      switch_with_maps, transition_violation)
from .logic.guards import Guard


def _fraction(value) -> Fraction:
    if isinstance(value, float):
        raise TypeError("coefficients must be exact; use int, Fraction or 'p/q' strings")
    return Fraction(value)


@dataclass(frozen=True)
class QuantumGraph:
    """``sum(coefficient * component)`` over compatible labeled graphs."""

    terms: tuple
    certificates: tuple | None = None

    def __post_init__(self):
        terms = tuple((_fraction(c), g) for c, g in self.terms)
        if not terms:
            raise IncompatibleQuantumGraph("a quantum graph needs at least one term")
        first = terms[0][1]
        for _, component in terms:
            if not isinstance(component, LabeledGraph):
                raise TypeError(f"components must be labeled graphs, got {component!r}")
            if (set(component.r) != set(first.r) or set(component.b) != set(first.b)
                    or component.g != first.g):
                raise IncompatibleQuantumGraph(
                    "components must share red labels, blue labels and guards")
        object.__setattr__(self, "terms", terms)
        if self.certificates is not None:
            certificates = tuple(self.certificates)
            if len(certificates) != len(terms):
                raise ValueError("one certificate per component is required")
            object.__setattr__(self, "certificates", certificates)

    @classmethod
    def single(cls, component: LabeledGraph, coefficient=1,
               certificate: GliCert | None = None) -> "QuantumGraph":
        return cls(((coefficient, component),),
                   None if certificate is None else (certificate,))

    @property
    def degree(self) -> int:
        return len(self.terms)

    @property
    def red_domain(self) -> frozenset:
        return frozenset(self.terms[0][1].r)

    @property
    def blue_domain(self) -> frozenset:
        return frozenset(self.terms[0][1].b)

    @property
    def guard(self) -> Guard:
        return self.terms[0][1].g

    @property
    def coefficients(self) -> list[Fraction]:
        return [c for c, _ in self.terms]

    @property
    def components(self) -> list[LabeledGraph]:
        return [g for _, g in self.terms]

    def to_json(self) -> dict:
        return {"terms": [{"coef": str(c), "component": g.to_json()} for c, g in self.terms]}

    @classmethod
    def from_json(cls, data: Mapping) -> "QuantumGraph":
        try:
            terms = [(Fraction(str(t["coef"])), LabeledGraph.from_json(t["component"]))
                     for t in data["terms"]]
        except (KeyError, TypeError, ValueError, ZeroDivisionError) as exc:
            raise IncompatibleQuantumGraph(f"malformed quantum graph JSON: {exc}") from None
        return cls(tuple(terms))


def _with_certificates(terms: list, certificates: list | None) -> QuantumGraph:
    return QuantumGraph(tuple(terms), None if certificates is None else tuple(certificates))


def qhom(quantum: QuantumGraph, host: LabeledGraph, config: Config = UNBOUNDED) -> Fraction:
    """``sum(alpha_i * hom(L_i, host))`` computed exactly."""
    total = Fraction(0)
    cache: dict = {}
    for coefficient, component in quantum.terms:
        if coefficient == 0:
            continue
        count = cache.get(component)
        if count is None:
            count = count_homs_labeled(component, host, config)
            cache[component] = count
        total += coefficient * count
    return total


# ---------------------------------------------------------------------------
# Componentwise operations


def q_reclaim(quantum: QuantumGraph, color: str, indices: Iterable[int]) -> QuantumGraph:
    indices = frozenset(indices)
    terms = [(c, reclaim(g, color, indices)) for c, g in quantum.terms]
    certificates = None
    if quantum.certificates is not None:
        wrap = reclaim_r if color == RED else reclaim_b
        certificates = [wrap(cert, indices) for cert in quantum.certificates]
    return _with_certificates(terms, certificates)


def q_switch(quantum: QuantumGraph, transition: Mapping) -> QuantumGraph:
    transition = transition if isinstance(transition, Guard) else Guard(transition)
    problem = transition_violation(quantum.guard, transition)
    if problem is not None:
        raise NotATransition(problem)
    terms = [(c, switch_with_maps(g, transition).graph) for c, g in quantum.terms]
    certificates = None
    if quantum.certificates is not None:
        certificates = [switch(cert, transition) for cert in quantum.certificates]
    return _with_certificates(terms, certificates)


def q_glue(first: QuantumGraph, second: QuantumGraph) -> QuantumGraph:
    """Pairwise glue of the components with multiplied coefficients."""
    terms = []
    certificates = [] if first.certificates is not None and second.certificates is not None \
        else None
    for n, (c1, g1) in enumerate(first.terms):
        for m, (c2, g2) in enumerate(second.terms):
            terms.append((c1 * c2, glue(g1, g2)))
            if certificates is not None:
                certificates.append(Glue(first.certificates[n], second.certificates[m]))
    return _with_certificates(terms, certificates)


def q_scale(quantum: QuantumGraph, factor) -> QuantumGraph:
    factor = _fraction(factor)
    return QuantumGraph(tuple((factor * c, g) for c, g in quantum.terms), quantum.certificates)


def q_sum(parts: Sequence[QuantumGraph]) -> QuantumGraph:
    """Concatenate the terms of compatible quantum graphs (terms are not merged)."""
    terms = [t for part in parts for t in part.terms]
    certificates = None
    if all(part.certificates is not None for part in parts):
        certificates = [c for part in parts for c in part.certificates]
    return _with_certificates(terms, certificates)


def q_lift(quantum: QuantumGraph, op: str, argument) -> QuantumGraph:
    """Apply ``op`` in ``reclaimR``, ``reclaimB``, ``switch`` or ``glue`` componentwise."""
    if op == "reclaimR":
        return q_reclaim(quantum, RED, argument)
    if op == "reclaimB":
        return q_reclaim(quantum, BLUE, argument)
    if op == "switch":
        return q_switch(quantum, argument)
    if op == "glue":
        return q_glue(quantum, argument)
    raise ValueError(f"unknown operation {op!r}")


# ---------------------------------------------------------------------------
# Label-only graphs and the indicator normalization


def labels_graph(guard: Mapping, blue_labels: Iterable[int] = ()) -> LabeledGraph:
    """Every label on its own node: red ``i`` joined to blue ``guard(i)``, extra blue labels isolated.

    With no extra blue labels and a non-empty guard this is ``from_guard_fn(guard)``;
    with nothing at all it is the empty label-free graph.
    """
    guard = guard if isinstance(guard, Guard) else Guard(guard)
    blues = sorted(set(guard.image) | set(blue_labels))
    if guard and set(blues) == set(guard.image):
        return from_guard_fn(guard)
    reds = sorted(guard)
    edges = [(guard[i], i) for i in reds]
    return LabeledGraph(IncidenceGraph.build(reds, blues, edges),
                        {i: i for i in reds}, {j: j for j in blues}, guard)


def power_zero(quantum: QuantumGraph) -> QuantumGraph:
    """The neutral element for glueing with the parameters of ``quantum``."""
    if quantum.red_domain != quantum.guard.domain:
        raise InvalidLabeling("the red label domain must equal the guard domain")
    graph = labels_graph(quantum.guard, quantum.blue_domain)
    certificates = None if quantum.certificates is None else (Base(graph),)
    return QuantumGraph(((1, graph),), certificates)


def glue_power(quantum: QuantumGraph, exponent: int) -> QuantumGraph:
    """``Q^exponent`` by repeated glueing; ``Q^0`` is :func:`power_zero`."""
    if exponent < 0:
        raise ValueError("negative exponent")
    if exponent == 0:
        return power_zero(quantum)
    result = quantum
    for _ in range(exponent - 1):
        result = q_glue(result, quantum)
    return result


def interpolating_polynomial(zeros: Iterable[int], ones: Iterable[int]) -> list[Fraction]:
    """Coefficients ``a_0..a_d`` of the least-degree polynomial with p|zeros = 0 and p|ones = 1."""
    zeros, ones = sorted(set(zeros)), sorted(set(ones))
    if set(zeros) & set(ones):
        raise OverlappingIndicatorSets(f"X and Y share {sorted(set(zeros) & set(ones))}")
    points = [(x, Fraction(0)) for x in zeros] + [(y, Fraction(1)) for y in ones]
    if not points:
        raise OverlappingIndicatorSets("X and Y must not both be empty")
    total = [Fraction(0)] * len(points)
    for n, (x_n, y_n) in enumerate(points):
        if y_n == 0:
            continue
        basis = [Fraction(1)]
        denominator = Fraction(1)
        for m, (x_m, _) in enumerate(points):
            if m == n:
                continue
            basis = [Fraction(0)] + basis
            for d in range(len(basis) - 1):
                basis[d] -= x_m * basis[d + 1]
            denominator *= x_n - x_m
        for d, value in enumerate(basis):
            total[d] += y_n * value / denominator
    while len(total) > 1 and total[-1] == 0:
        total.pop()
    return total


def evaluate_polynomial(coefficients: Sequence[Fraction], x) -> Fraction:
    result = Fraction(0)
    for a in reversed(coefficients):
        result = result * x + a
    return result


def normalize_indicator(quantum: QuantumGraph, zeros: Iterable[int],
                        ones: Iterable[int]) -> QuantumGraph:
    """``Q[X, Y] = sum(a_i Q^i)`` for the interpolant with p|X = 0 and p|Y = 1."""
    coefficients = interpolating_polynomial(zeros, ones)
    parts = []
    power = None
    for exponent, a in enumerate(coefficients):
        power = power_zero(quantum) if exponent == 0 else (
            quantum if exponent == 1 else q_glue(power, quantum))
        if a != 0:
            parts.append(q_scale(power, a))
    if not parts:
        parts.append(q_scale(power_zero(quantum), 0))
    return q_sum(parts)


# ---------------------------------------------------------------------------
# Right-hand sides of the counting identities (used as independent checks)


def reseat_sum(quantum: QuantumGraph, host: LabeledGraph, color: str,
               indices: Iterable[int], config: Config = UNBOUNDED) -> Fraction:
    """``sum over tuples t of hom(Q, reseat(host, color, indices, t))``."""
    indices = sorted(set(indices))
    nodes = host.graph.red if color == RED else host.graph.blue
    total = Fraction(0)
    for targets in product(nodes, repeat=len(indices)):
        total += qhom(quantum, reseat(host, color, indices, list(targets)), config)
    return total


def switch_factor(transition: Mapping, host: LabeledGraph, config: Config = UNBOUNDED) -> int:
    """``hom(L_f, host)``, which is 0 or 1."""
    return count_homs_labeled(from_guard_fn(transition), host, config)
