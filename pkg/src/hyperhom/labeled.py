"""k-labeled incidence graphs and the guarded calculus built from them.

A labeled graph carries partial maps ``r`` (red label -> red node), ``b``
(blue label -> blue node) and a guard map ``g`` (red label -> blue label).
Certificates are derivation trees whose evaluation produces a labeled
graph; they convert into entangled hypertree decompositions and back.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Hashable, Iterable, Mapping, Sequence, Union

from .core_model import IncidenceGraph, find_isomorphism, id_key
from .decomp import (EHD, TreeDecomp, normalize_binary_monotone, precise_bag,
                     validate, width)
from .errors import (CertificateError, InvalidDecomposition, InvalidLabeling,
                     NotATransition)
from .logic.guards import EMPTY_GUARD, Guard

RED = "red"
BLUE = "blue"


def _label_map(entries) -> dict:
    pairs = dict(entries.items() if isinstance(entries, Mapping) else entries)
    for label in pairs:
        if not isinstance(label, int) or isinstance(label, bool) or label < 1:
            raise InvalidLabeling(f"labels must be positive integers, got {label!r}")
    return dict(sorted(pairs.items()))


@dataclass(frozen=True, eq=False)
class LabeledGraph:
    """An incidence graph with red labels ``r``, blue labels ``b`` and guards ``g``."""

    graph: IncidenceGraph
    r: Mapping = field(default_factory=dict)
    b: Mapping = field(default_factory=dict)
    g: Guard = EMPTY_GUARD

    def __post_init__(self):
        object.__setattr__(self, "r", _label_map(self.r))
        object.__setattr__(self, "b", _label_map(self.b))
        if not isinstance(self.g, Guard):
            object.__setattr__(self, "g", Guard(self.g))
        red_set, blue_set = set(self.graph.red), set(self.graph.blue)
        for i, v in self.r.items():
            if v not in red_set:
                raise InvalidLabeling(f"red label {i} points to unknown red node {v!r}")
        for j, e in self.b.items():
            if e not in blue_set:
                raise InvalidLabeling(f"blue label {j} points to unknown blue node {e!r}")
        if not self.g.domain <= set(self.r):
            raise InvalidLabeling(
                f"guard domain {sorted(self.g.domain)} is not inside the red label domain "
                f"{sorted(self.r)}")
        for i, j in self.g.items_sorted:
            if j < 1:
                raise InvalidLabeling(f"guard value {j} of label {i} is not a blue label")

    @classmethod
    def unlabeled(cls, graph: IncidenceGraph) -> "LabeledGraph":
        return cls(graph)

    @classmethod
    def base(cls, reds: Iterable, blues: Iterable, edges: Iterable, r: Mapping, b: Mapping,
             g: Mapping) -> "LabeledGraph":
        return cls(IncidenceGraph.build(reds, blues, edges), r, b, Guard(g))

    def __eq__(self, other):
        if not isinstance(other, LabeledGraph):
            return NotImplemented
        return (self.graph == other.graph and self.r == other.r and self.b == other.b
                and self.g == other.g)

    def __hash__(self):
        return hash((self.graph, tuple(self.r.items()), tuple(self.b.items()), self.g))

    def __repr__(self):
        return (f"LabeledGraph(red={len(self.graph.red)}, blue={len(self.graph.blue)}, "
                f"r={self.r}, b={self.b}, g={self.g!r})")

    @property
    def well_formed(self) -> bool:
        """True iff the guard domain equals the red label domain."""
        return self.g.domain == frozenset(self.r)

    @property
    def label_free(self) -> bool:
        return not self.r and not self.b and not self.g

    @property
    def max_blue_label(self) -> int:
        return max(list(self.b) + list(self.g.values()), default=0)

    def to_json(self) -> dict:
        data = self.graph.to_json()
        data["r"] = {str(i): v for i, v in self.r.items()}
        data["b"] = {str(j): e for j, e in self.b.items()}
        data["g"] = self.g.to_json()
        return data

    @classmethod
    def from_json(cls, data: Mapping) -> "LabeledGraph":
        graph = IncidenceGraph.from_json(data)
        try:
            r = {int(i): v for i, v in data.get("r", {}).items()}
            b = {int(j): e for j, e in data.get("b", {}).items()}
            g = Guard.from_json(data.get("g", {}))
        except (TypeError, ValueError) as exc:
            raise InvalidLabeling(f"malformed label maps: {exc}") from None
        return cls(graph, r, b, g)


# ---------------------------------------------------------------------------
# Basic operations


def has_real_guards(labeled: LabeledGraph, guard: Mapping | None = None) -> bool:
    """Every red label in ``Dom(guard)`` is adjacent to the blue node labeled by its guard."""
    guard = labeled.g if guard is None else guard
    for i, j in guard.items():
        if i not in labeled.r or j not in labeled.b:
            return False
        if (labeled.b[j], labeled.r[i]) not in labeled.graph.edges:
            return False
    return True


def from_guard_fn(guard: Mapping) -> LabeledGraph:
    """The labeled graph defined by a guard map: red node ``i`` per label, blue node ``j`` per value."""
    guard = guard if isinstance(guard, Guard) else Guard(guard)
    if not guard:
        raise InvalidLabeling("the guard map must have a non-empty domain")
    reds = list(guard)
    blues = sorted(guard.image)
    edges = [(guard[i], i) for i in reds]
    return LabeledGraph(IncidenceGraph.build(reds, blues, edges),
                        {i: i for i in reds}, {j: j for j in blues}, guard)


def is_base_graph(labeled: LabeledGraph) -> bool:
    """Every node carries a label and the guards are real."""
    return (set(labeled.graph.red) == set(labeled.r.values())
            and set(labeled.graph.blue) == set(labeled.b.values())
            and has_real_guards(labeled))


def reclaim(labeled: LabeledGraph, color: str, indices: Iterable[int]) -> LabeledGraph:
    """Remove the given labels (red removal also drops their guards)."""
    indices = set(indices)
    if color == RED:
        unknown = indices - set(labeled.r)
        if unknown:
            raise InvalidLabeling(f"unknown red labels {sorted(unknown)}")
        if not indices:
            return labeled
        return LabeledGraph(labeled.graph,
                            {i: v for i, v in labeled.r.items() if i not in indices},
                            labeled.b, labeled.g.without(indices))
    if color == BLUE:
        unknown = indices - set(labeled.b)
        if unknown:
            raise InvalidLabeling(f"unknown blue labels {sorted(unknown)}")
        if not indices:
            return labeled
        return LabeledGraph(labeled.graph, labeled.r,
                            {j: e for j, e in labeled.b.items() if j not in indices},
                            labeled.g)
    raise ValueError(f"unknown colour {color!r}")


def reseat(labeled: LabeledGraph, color: str, indices: Iterable[int],
           targets: Sequence) -> LabeledGraph:
    """Move label ``indices[n]`` (ascending order) onto ``targets[n]``; guards stay unchanged."""
    ordered = sorted(set(indices))
    if len(ordered) != len(targets):
        raise InvalidLabeling(f"{len(ordered)} labels but {len(targets)} targets")
    if color == RED:
        allowed, current = set(labeled.graph.red), dict(labeled.r)
    elif color == BLUE:
        allowed, current = set(labeled.graph.blue), dict(labeled.b)
    else:
        raise ValueError(f"unknown colour {color!r}")
    for node in targets:
        if node not in allowed:
            raise InvalidLabeling(f"target {node!r} is not a {color} node")
    for i, node in zip(ordered, targets):
        current[i] = node
    if color == RED:
        return LabeledGraph(labeled.graph, current, labeled.b, labeled.g)
    return LabeledGraph(labeled.graph, labeled.r, current, labeled.g)


@dataclass(frozen=True)
class GlueResult:
    """A glued graph with the node projections of both inputs."""

    graph: LabeledGraph
    red_maps: tuple
    blue_maps: tuple
    guard_conflicts: tuple


class _UnionFind:
    def __init__(self, keys):
        self.parent = {k: k for k in keys}

    def find(self, x):
        while self.parent[x] != x:
            self.parent[x] = self.parent[self.parent[x]]
            x = self.parent[x]
        return x

    def union(self, x, y):
        a, b = self.find(x), self.find(y)
        if a == b:
            return
        # The representative is the lexicographically least (component, id).
        if (a[0], id_key(a[1])) <= (b[0], id_key(b[1])):
            self.parent[b] = a
        else:
            self.parent[a] = b


def glue_with_maps(first: LabeledGraph, second: LabeledGraph) -> GlueResult:
    """Disjoint union merging equally labeled nodes; nodes renumbered densely."""
    parts = (first, second)
    red_keys = [(n, v) for n, part in enumerate(parts, start=1) for v in part.graph.red]
    blue_keys = [(n, e) for n, part in enumerate(parts, start=1) for e in part.graph.blue]
    red_uf, blue_uf = _UnionFind(red_keys), _UnionFind(blue_keys)
    for i in set(first.r) & set(second.r):
        red_uf.union((1, first.r[i]), (2, second.r[i]))
    for j in set(first.b) & set(second.b):
        blue_uf.union((1, first.b[j]), (2, second.b[j]))

    def numbering(keys, uf):
        reps = sorted({uf.find(k) for k in keys}, key=lambda k: (k[0], id_key(k[1])))
        index = {rep: n for n, rep in enumerate(reps)}
        return {k: index[uf.find(k)] for k in keys}, len(reps)

    red_num, red_count = numbering(red_keys, red_uf)
    blue_num, blue_count = numbering(blue_keys, blue_uf)
    edges = {(blue_num[(n, e)], red_num[(n, v)])
             for n, part in enumerate(parts, start=1) for e, v in part.graph.edges}
    graph = IncidenceGraph.build(range(red_count), range(blue_count), edges)
    r = {i: red_num[(2, v)] for i, v in second.r.items()}
    r.update({i: red_num[(1, v)] for i, v in first.r.items()})
    b = {j: blue_num[(2, e)] for j, e in second.b.items()}
    b.update({j: blue_num[(1, e)] for j, e in first.b.items()})
    guard = first.g.union(second.g)
    red_maps = tuple({v: red_num[(n, v)] for v in part.graph.red}
                     for n, part in enumerate(parts, start=1))
    blue_maps = tuple({e: blue_num[(n, e)] for e in part.graph.blue}
                      for n, part in enumerate(parts, start=1))
    return GlueResult(LabeledGraph(graph, r, b, guard), red_maps, blue_maps,
                      tuple(first.g.conflicts(second.g)))


def glue(first: LabeledGraph, second: LabeledGraph) -> LabeledGraph:
    return glue_with_maps(first, second).graph


def is_transition(guard: Mapping, transition: Mapping) -> bool:
    return transition_violation(guard, transition) is None


def transition_violation(guard: Mapping, transition: Mapping) -> str | None:
    if not transition:
        return "a transition needs a non-empty domain"
    outside = sorted(set(transition) - set(guard))
    if outside:
        return f"transition index {outside[0]} is outside the guard domain"
    image = set(transition.values())
    for i in sorted(guard):
        if guard[i] in image and i not in transition:
            return (f"index {i} is guarded by {guard[i]}, which the transition reassigns, "
                    f"but {i} is not in the transition domain")
    return None


def switch_with_maps(labeled: LabeledGraph, transition: Mapping) -> GlueResult:
    transition = transition if isinstance(transition, Guard) else Guard(transition)
    problem = transition_violation(labeled.g, transition)
    if problem is not None:
        raise NotATransition(problem)
    released = labeled.g.image & transition.image & set(labeled.b)
    return glue_with_maps(from_guard_fn(transition), reclaim(labeled, BLUE, released))


def apply_transition(labeled: LabeledGraph, transition: Mapping) -> LabeledGraph:
    """Give the red labels in ``Dom(transition)`` fresh real guards."""
    return switch_with_maps(labeled, transition).graph


def labeled_isomorphic(first: LabeledGraph, second: LabeledGraph, max_nodes: int = 12) -> bool:
    """Isomorphism of the graphs that maps every label onto the same label."""
    if first.g != second.g or set(first.r) != set(second.r) or set(first.b) != set(second.b):
        return False
    fixed_red: dict = {}
    for i, v in first.r.items():
        if fixed_red.setdefault(v, second.r[i]) != second.r[i]:
            return False
    fixed_blue: dict = {}
    for j, e in first.b.items():
        if fixed_blue.setdefault(e, second.b[j]) != second.b[j]:
            return False
    if len(set(fixed_red.values())) != len(fixed_red) or \
            len(set(fixed_blue.values())) != len(fixed_blue):
        return False
    return find_isomorphism(first.graph, second.graph, max_nodes, max_nodes,
                            fixed_red, fixed_blue) is not None


# ---------------------------------------------------------------------------
# Certificates


@dataclass(frozen=True)
class Base:
    graph: LabeledGraph


@dataclass(frozen=True)
class ReclaimR:
    child: "GliCert"
    indices: frozenset


@dataclass(frozen=True)
class ReclaimB:
    child: "GliCert"
    indices: frozenset


@dataclass(frozen=True)
class Switch:
    child: "GliCert"
    transition: Guard


@dataclass(frozen=True)
class Glue:
    first: "GliCert"
    second: "GliCert"


GliCert = Union[Base, ReclaimR, ReclaimB, Switch, Glue]


def reclaim_r(child: GliCert, indices: Iterable[int]) -> ReclaimR:
    return ReclaimR(child, frozenset(indices))


def reclaim_b(child: GliCert, indices: Iterable[int]) -> ReclaimB:
    return ReclaimB(child, frozenset(indices))


def switch(child: GliCert, transition: Mapping) -> Switch:
    return Switch(child, transition if isinstance(transition, Guard) else Guard(transition))


def cert_to_json(cert: GliCert) -> dict:
    if isinstance(cert, Base):
        return {"op": "base", "graph": cert.graph.to_json()}
    if isinstance(cert, ReclaimR):
        return {"op": "reclaimR", "X": sorted(cert.indices), "child": cert_to_json(cert.child)}
    if isinstance(cert, ReclaimB):
        return {"op": "reclaimB", "X": sorted(cert.indices), "child": cert_to_json(cert.child)}
    if isinstance(cert, Switch):
        return {"op": "switch", "f": cert.transition.to_json(),
                "child": cert_to_json(cert.child)}
    if isinstance(cert, Glue):
        return {"op": "glue", "first": cert_to_json(cert.first),
                "second": cert_to_json(cert.second)}
    raise TypeError(f"not a certificate: {cert!r}")


def cert_from_json(data: Mapping) -> GliCert:
    try:
        op = data["op"]
        if op == "base":
            return Base(LabeledGraph.from_json(data["graph"]))
        if op == "reclaimR":
            return reclaim_r(cert_from_json(data["child"]), (int(i) for i in data["X"]))
        if op == "reclaimB":
            return reclaim_b(cert_from_json(data["child"]), (int(j) for j in data["X"]))
        if op == "switch":
            return switch(cert_from_json(data["child"]), Guard.from_json(data["f"]))
        if op == "glue":
            return Glue(cert_from_json(data["first"]), cert_from_json(data["second"]))
    except (KeyError, TypeError, ValueError) as exc:
        raise CertificateError(0, f"malformed certificate JSON: {exc}") from None
    raise CertificateError(0, f"unknown certificate operation {op!r}")


def cert_size(cert: GliCert) -> int:
    if isinstance(cert, Base):
        return 1
    if isinstance(cert, Glue):
        return 1 + cert_size(cert.first) + cert_size(cert.second)
    return 1 + cert_size(cert.child)


@dataclass
class CertReport:
    """Outcome of a lenient certificate check."""

    valid: bool
    violations: list[str] = field(default_factory=list)
    glue_conflicts: list[str] = field(default_factory=list)

    def to_json(self) -> dict:
        return {"valid": self.valid, "violations": list(self.violations),
                "glue_conflicts": list(self.glue_conflicts)}


def _check_labels_within(labeled: LabeledGraph, k: int | None, rule: int):
    if k is None:
        return
    bad = [j for j in labeled.b if j > k] + [j for j in labeled.g.values() if j > k]
    if bad:
        raise CertificateError(rule, f"blue label {bad[0]} exceeds k = {k}")


@dataclass(frozen=True)
class _Evaluated:
    """An already evaluated sub-certificate (avoids re-evaluating children)."""

    graph: LabeledGraph


def _evaluate(cert: GliCert, k: int | None, conflicts: list | None) -> LabeledGraph:
    if isinstance(cert, _Evaluated):
        return cert.graph
    if isinstance(cert, Base):
        labeled = cert.graph
        if not labeled.well_formed:
            raise CertificateError(1, "guard domain must equal the red label domain")
        if set(labeled.graph.red) != set(labeled.r.values()):
            raise CertificateError(1, "every red node of a base graph must carry a label")
        if set(labeled.graph.blue) != set(labeled.b.values()):
            raise CertificateError(1, "every blue node of a base graph must carry a label")
        if not has_real_guards(labeled):
            raise CertificateError(1, "base graph does not have real guards")
        _check_labels_within(labeled, k, 1)
        return labeled
    if isinstance(cert, ReclaimR):
        labeled = _evaluate(cert.child, k, conflicts)
        unknown = cert.indices - set(labeled.r)
        if unknown:
            raise CertificateError(2, f"red labels {sorted(unknown)} are not in use")
        return reclaim(labeled, RED, cert.indices)
    if isinstance(cert, ReclaimB):
        labeled = _evaluate(cert.child, k, conflicts)
        unknown = cert.indices - set(labeled.b)
        if unknown:
            raise CertificateError(3, f"blue labels {sorted(unknown)} are not in use")
        guarding = cert.indices & labeled.g.image
        if guarding:
            raise CertificateError(3, f"blue labels {sorted(guarding)} still serve as guards")
        return reclaim(labeled, BLUE, cert.indices)
    if isinstance(cert, Switch):
        labeled = _evaluate(cert.child, k, conflicts)
        problem = transition_violation(labeled.g, cert.transition)
        if problem is not None:
            raise CertificateError(4, problem)
        result = apply_transition(labeled, cert.transition)
        _check_labels_within(result, k, 4)
        return result
    if isinstance(cert, Glue):
        first = _evaluate(cert.first, k, conflicts)
        second = _evaluate(cert.second, k, conflicts)
        clash = first.g.conflicts(second.g)
        if clash:
            message = f"guards disagree on red labels {clash}"
            if conflicts is None:
                raise CertificateError(5, message)
            conflicts.append(message)
        return glue(first, second)
    raise TypeError(f"not a certificate: {cert!r}")


def eval_cert(cert: GliCert, k: int | None = None) -> LabeledGraph:
    """Evaluate a certificate, checking every side condition on the way.

    Raises :class:`CertificateError` carrying the number of the violated rule
    (1 base, 2 red reclaim, 3 blue reclaim, 4 switch, 5 glue).
    """
    return _evaluate(cert, k, None)


def check_cert(cert: GliCert, k: int | None = None) -> CertReport:
    """Lenient check: conflicting glues are reported instead of rejected."""
    conflicts: list = []
    try:
        _evaluate(cert, k, conflicts)
    except CertificateError as exc:
        return CertReport(False, [str(exc)], conflicts)
    return CertReport(True, [], conflicts)


# ---------------------------------------------------------------------------
# Certificate -> decomposition


def cert_to_ehd(cert: GliCert, k: int | None = None) -> tuple[TreeDecomp, Hashable]:
    """An ehd of the evaluated graph whose root covers exactly the labeled blue nodes."""
    counter = [0]

    def fresh() -> int:
        counter[0] += 1
        return counter[0] - 1

    def leaf_for(labeled: LabeledGraph, nodes, edges, bag, cover, anchor):
        omega = fresh()
        nodes.append(omega)
        cover[omega] = frozenset(labeled.b.values())
        bag[omega] = precise_bag(labeled.graph, cover[omega])
        if anchor is not None:
            edges.append((anchor, omega))
        return omega

    def build(node: GliCert):
        """Returns (labeled graph, nodes, edges, bag, cover, omega)."""
        if isinstance(node, Base):
            labeled = _evaluate(node, k, None)
            t = fresh()
            return (labeled, [t], [], {t: frozenset(labeled.graph.red)},
                    {t: frozenset(labeled.graph.blue)}, t)
        if isinstance(node, ReclaimR):
            labeled, nodes, edges, bag, cover, omega = build(node.child)
            return (_evaluate(ReclaimR(_Evaluated(labeled), node.indices), k, None),
                    nodes, edges, bag, cover, omega)
        if isinstance(node, ReclaimB):
            labeled, nodes, edges, bag, cover, omega = build(node.child)
            result = _evaluate(ReclaimB(_Evaluated(labeled), node.indices), k, None)
            omega = leaf_for(result, nodes, edges, bag, cover, omega)
            return result, nodes, edges, bag, cover, omega
        if isinstance(node, Switch):
            labeled, nodes, edges, bag, cover, omega = build(node.child)
            problem = transition_violation(labeled.g, node.transition)
            if problem is not None:
                raise CertificateError(4, problem)
            glued = switch_with_maps(labeled, node.transition)
            result = glued.graph
            _check_labels_within(result, k, 4)
            project = glued.blue_maps[1]
            cover = {t: frozenset(project[e] for e in cs) for t, cs in cover.items()}
            bag = {t: precise_bag(result.graph, cs) for t, cs in cover.items()}
            omega = leaf_for(result, nodes, edges, bag, cover, omega)
            return result, nodes, edges, bag, cover, omega
        if isinstance(node, Glue):
            first = build(node.first)
            second = build(node.second)
            clash = first[0].g.conflicts(second[0].g)
            if clash:
                raise CertificateError(5, f"guards disagree on red labels {clash}")
            glued = glue_with_maps(first[0], second[0])
            result = glued.graph
            nodes = first[1] + second[1]
            edges = first[2] + second[2]
            cover = {}
            for part, project in ((first, glued.blue_maps[0]), (second, glued.blue_maps[1])):
                for t, cs in part[4].items():
                    cover[t] = frozenset(project[e] for e in cs)
            bag = {t: precise_bag(result.graph, cs) for t, cs in cover.items()}
            omega = leaf_for(result, nodes, edges, bag, cover, None)
            edges.extend([(omega, first[5]), (omega, second[5])])
            return result, nodes, edges, bag, cover, omega
        raise TypeError(f"not a certificate: {node!r}")

    labeled, nodes, edges, bag, cover, omega = build(cert)
    decomposition = TreeDecomp.build(nodes, edges, bag, cover, omega)
    return decomposition, omega


# ---------------------------------------------------------------------------
# Decomposition -> certificate


@dataclass(frozen=True)
class TraversalPlan:
    """A colouring of the blue nodes and a schedule of guards per tree-node."""

    colouring: Mapping
    schedule: Mapping

    def colour_set(self, cover: Iterable) -> frozenset:
        return frozenset(self.colouring[e] for e in cover)


def plan_traversal(decomposition: TreeDecomp, root, graph: IncidenceGraph,
                   k: int | None = None) -> TraversalPlan:
    """Greedy top-down colouring and schedule for a binary monotone ehd rooted at ``root``."""
    parents = decomposition.parents(root)
    colouring: dict = {}
    for t in decomposition.top_down(root):
        cover = sorted(decomposition.cover[t], key=id_key)
        parent = parents[t]
        if parent is None:
            palette = list(range(1, len(cover) + 1))
        else:
            palette = sorted({colouring[e] for e in decomposition.cover[parent]})
        taken = {colouring[e] for e in cover if e in colouring}
        free = [c for c in palette if c not in taken]
        for e in cover:
            if e in colouring:
                continue
            if not free:
                raise InvalidDecomposition(
                    f"tree-node {t!r} has more cover elements than its parent offers colours")
            colouring[e] = free.pop(0)
    schedule: dict = {}
    nbrs = graph.red_neighbours
    for t in decomposition.top_down(root):
        parent = parents[t]
        for v in sorted(decomposition.bag[t], key=id_key):
            inherited = schedule.get((parent, v)) if parent is not None else None
            if inherited is not None and inherited in decomposition.cover[t]:
                schedule[(t, v)] = inherited
                continue
            options = sorted(decomposition.cover[t] & nbrs[v], key=id_key)
            if not options:
                raise InvalidDecomposition(f"red node {v!r} in bag of {t!r} has no guard")
            schedule[(t, v)] = options[0]
    plan = TraversalPlan(colouring, schedule)
    problems = check_plan(decomposition, root, graph, plan, k)
    if problems:
        raise InvalidDecomposition("; ".join(problems))
    return plan


def check_plan(decomposition: TreeDecomp, root, graph: IncidenceGraph, plan: TraversalPlan,
               k: int | None = None) -> list[str]:
    """All violated colouring and schedule constraints (empty list when the plan is sound)."""
    problems = []
    colouring, schedule = plan.colouring, plan.schedule
    parents = decomposition.parents(root)
    for t in decomposition.nodes:
        cover = decomposition.cover[t]
        missing = [e for e in cover if e not in colouring]
        if missing:
            problems.append(f"blue node {missing[0]!r} has no colour")
            continue
        colours = [colouring[e] for e in cover]
        if len(set(colours)) != len(colours):
            problems.append(f"colouring is not injective on the cover of {t!r}")
        if k is not None and any(c < 1 or c > k for c in colours):
            problems.append(f"colour outside [1, {k}] at {t!r}")
        parent = parents[t]
        if parent is not None and not plan.colour_set(cover) <= plan.colour_set(
                decomposition.cover[parent]):
            problems.append(f"colours of {t!r} are not inherited from its parent {parent!r}")
    for t in decomposition.nodes:
        for v in decomposition.bag[t]:
            e = schedule.get((t, v))
            if e is None:
                problems.append(f"schedule undefined at ({t!r}, {v!r})")
            elif e not in decomposition.cover[t] or (e, v) not in graph.edges:
                problems.append(f"schedule at ({t!r}, {v!r}) is not an adjacent cover element")
    for (t, v) in schedule:
        if v not in decomposition.bag[t]:
            problems.append(f"schedule defined outside the bag at ({t!r}, {v!r})")
    for t, parent in parents.items():
        if parent is None:
            continue
        for v in decomposition.bag[t] & decomposition.bag[parent]:
            chosen = schedule.get((parent, v))
            if chosen in decomposition.cover[t] and schedule.get((t, v)) != chosen:
                problems.append(f"schedule does not persist from {parent!r} to {t!r} at {v!r}")
    return problems


@dataclass
class Combination:
    """Intermediate result of the bottom-up construction for one subtree."""

    cert: GliCert
    graph: LabeledGraph
    embedding_red: dict
    embedding_blue: dict


@dataclass
class CertConstruction:
    """Everything produced while turning an ehd into a certificate."""

    cert: GliCert
    decomposition: TreeDecomp
    root: Hashable
    plan: TraversalPlan
    red_order: tuple
    combined: dict
    attached: dict


def _node_graph(decomposition: TreeDecomp, graph: IncidenceGraph, plan: TraversalPlan,
                label_of: Mapping, t) -> LabeledGraph:
    bag, cover = decomposition.bag[t], decomposition.cover[t]
    edges = [(e, v) for e, v in graph.edges if e in cover and v in bag]
    r = {label_of[v]: v for v in bag}
    g = {label_of[v]: plan.colouring[plan.schedule[(t, v)]] for v in bag}
    b = {plan.colouring[e]: e for e in cover}
    return LabeledGraph(IncidenceGraph.build(bag, cover, edges), r, b, Guard(g))


def _require(condition: bool, message: str):
    if not condition:
        raise AssertionError(message)


def ehd_to_cert_detailed(graph: IncidenceGraph, decomposition: TreeDecomp,
                         k: int | None = None) -> CertConstruction:
    report = validate(decomposition, graph, EHD)
    if not report.valid:
        raise InvalidDecomposition("; ".join(report.violations))
    k = width(decomposition) if k is None else k
    if width(decomposition) > k:
        raise InvalidDecomposition(f"decomposition width {width(decomposition)} exceeds k = {k}")
    normal, root = normalize_binary_monotone(decomposition, graph)
    plan = plan_traversal(normal, root, graph, k)
    red_order = tuple(graph.red)
    label_of = {v: n for n, v in enumerate(red_order, start=1)}
    kids = normal.children(root)
    base = {t: _node_graph(normal, graph, plan, label_of, t) for t in normal.nodes}

    def colour_at(t, j):
        for e in normal.cover[t]:
            if plan.colouring[e] == j:
                return e
        return None

    combined: dict = {}
    attached: dict = {}
    for t in reversed(normal.top_down(root)):
        node = base[t]
        current = Combination(Base(node), node, {v: v for v in node.graph.red},
                              {e: e for e in node.graph.blue})
        for child in kids[t]:
            part = combined[child]
            a_cert, a_graph = part.cert, part.graph
            emb_red, emb_blue = dict(part.embedding_red), dict(part.embedding_blue)
            child_labels = set(base[child].r)
            parent_labels = set(node.r)
            dropped = child_labels - parent_labels
            if dropped:
                a_cert = reclaim_r(a_cert, dropped)
                a_graph = reclaim(a_graph, RED, dropped)
            colours = plan.colour_set(normal.cover[child])
            changed_blue = {j for j in colours if colour_at(child, j) != colour_at(t, j)}
            changed_red = {label_of[v] for v in normal.bag[child] & normal.bag[t]
                           if plan.schedule[(child, v)] != plan.schedule[(t, v)]}
            if not changed_red:
                _require(changed_blue <= set(a_graph.b) - a_graph.g.image,
                         "released blue labels must be unused by guards")
                if changed_blue:
                    a_cert = reclaim_b(a_cert, changed_blue)
                    a_graph = reclaim(a_graph, BLUE, changed_blue)
            else:
                transition = node.g.restrict(changed_red)
                # A new guard colour may also be one that t does not use at all;
                # only colours present in t have to be released ones.
                _require(transition.image & colours <= changed_blue,
                         "the new guards must use released blue labels")
                _require(is_transition(a_graph.g, transition),
                         "the guard change must be a transition")
                unused = (set(a_graph.b) & transition.image) - a_graph.g.image
                if unused:
                    a_cert = reclaim_b(a_cert, unused)
                    a_graph = reclaim(a_graph, BLUE, unused)
                switched = switch_with_maps(a_graph, transition)
                a_cert = switch(a_cert, transition)
                a_graph = switched.graph
                emb_red = {v: switched.red_maps[1][w] for v, w in emb_red.items()}
                emb_blue = {e: switched.blue_maps[1][w] for e, w in emb_blue.items()}
                rest = changed_blue - transition.image
                _require(rest <= set(a_graph.b) - a_graph.g.image,
                         "remaining released labels must be unused by guards")
                if rest:
                    a_cert = reclaim_b(a_cert, rest)
                    a_graph = reclaim(a_graph, BLUE, rest)
            _require(not node.g.conflicts(a_graph.g), "guards must be compatible before glueing")
            attached[child] = a_graph
            glued = glue_with_maps(current.graph, a_graph)
            _require(not glued.guard_conflicts, "glue must not meet conflicting guards")
            red_embedding = {v: glued.red_maps[0][w] for v, w in current.embedding_red.items()}
            blue_embedding = {e: glued.blue_maps[0][w] for e, w in current.embedding_blue.items()}
            for v, w in emb_red.items():
                image = glued.red_maps[1][w]
                _require(red_embedding.setdefault(v, image) == image,
                         f"red node {v!r} is represented twice after glueing")
            for e, w in emb_blue.items():
                image = glued.blue_maps[1][w]
                _require(blue_embedding.setdefault(e, image) == image,
                         f"blue node {e!r} is represented twice after glueing")
            current = Combination(Glue(current.cert, a_cert), glued.graph,
                                  red_embedding, blue_embedding)
        _check_embedding(normal, kids, t, graph, current)
        combined[t] = current
    top = combined[root]
    cert = reclaim_b(reclaim_r(top.cert, top.graph.r), top.graph.b)
    return CertConstruction(cert, normal, root, plan, red_order, combined, attached)


def _check_embedding(decomposition: TreeDecomp, kids: Mapping, t, graph: IncidenceGraph,
                     part: Combination):
    """The subtree graph of ``t`` must map isomorphically onto the combined graph."""
    subtree = [t]
    for node in subtree:
        subtree.extend(kids[node])
    reds = frozenset().union(*(decomposition.bag[s] for s in subtree))
    blues = frozenset().union(*(decomposition.cover[s] for s in subtree))
    target = part.graph.graph
    _require(set(part.embedding_red) == reds and set(part.embedding_blue) == blues,
             "the embedding must cover exactly the subtree's nodes")
    _require(len(set(part.embedding_red.values())) == len(target.red) == len(reds),
             "the red embedding must be a bijection")
    _require(len(set(part.embedding_blue.values())) == len(target.blue) == len(blues),
             "the blue embedding must be a bijection")
    expected = {(part.embedding_blue[e], part.embedding_red[v]) for e, v in graph.edges
                if e in blues and v in reds}
    _require(expected == set(target.edges), "the embedding must preserve edges exactly")


def ehd_to_cert(graph: IncidenceGraph, decomposition: TreeDecomp,
                k: int | None = None) -> GliCert:
    """A label-free certificate whose evaluation is isomorphic to ``graph``."""
    return ehd_to_cert_detailed(graph, decomposition, k).cert
