"""Model checking for guarded counting formulas over incidence graphs."""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import product
from typing import Mapping

from ..core_model import IncidenceGraph, id_key
from ..errors import UnassignedFreeVariable
from .formulas import (RED, And, AtomE, EqBlue, EqRed, Exists, Formula, Not,
                       Top)


@dataclass(frozen=True)
class Interpretation:
    """An incidence graph plus a partial assignment of variables to nodes."""

    graph: IncidenceGraph
    red: Mapping[int, object] = field(default_factory=dict)
    blue: Mapping[int, object] = field(default_factory=dict)

    def __post_init__(self):
        red_nodes, blue_nodes = set(self.graph.red), set(self.graph.blue)
        for i, node in self.red.items():
            if node not in red_nodes:
                raise ValueError(f"v{i} is assigned to {node!r}, which is not a red node")
        for j, node in self.blue.items():
            if node not in blue_nodes:
                raise ValueError(f"e{j} is assigned to {node!r}, which is not a blue node")


class Evaluator:
    """Evaluates formulas on one graph, memoising subformula verdicts.

    The memo is keyed by the node identity and by the values of the node's
    free variables only, so it is shared across assignments that differ on
    irrelevant variables.
    """

    def __init__(self, graph: IncidenceGraph):
        self.graph = graph
        self.edges = graph.edges
        self.red_nodes = graph.red
        self.blue_nodes = graph.blue
        self.neighbours = graph.blue_neighbours
        self.memo: dict = {}
        self._free_order: dict = {}
        self._keep: dict = {}
        self._neighbour_lists: dict = {}

    def holds(self, formula: Formula, red: Mapping[int, object] | None = None,
              blue: Mapping[int, object] | None = None) -> bool:
        red = dict(red or {})
        blue = dict(blue or {})
        missing = [f"v{i}" for i in sorted(formula.free_red) if i not in red]
        missing += [f"e{j}" for j in sorted(formula.free_blue) if j not in blue]
        if missing:
            raise UnassignedFreeVariable(", ".join(missing))
        return self._eval(formula, red, blue)

    def _key(self, node: Formula, red: dict, blue: dict):
        order = self._free_order.get(id(node))
        if order is None:
            order = (tuple(sorted(node.free_red)), tuple(sorted(node.free_blue)))
            self._free_order[id(node)] = order
            self._keep[id(node)] = node
        return (id(node), tuple(red[i] for i in order[0]), tuple(blue[j] for j in order[1]))

    def _eval(self, node: Formula, red: dict, blue: dict) -> bool:
        if isinstance(node, AtomE):
            return (blue[node.blue], red[node.red]) in self.edges
        if isinstance(node, EqBlue):
            return blue[node.left] == blue[node.right]
        if isinstance(node, EqRed):
            return red[node.left] == red[node.right]
        if isinstance(node, Top):
            return True
        if isinstance(node, Not):
            return not self._eval(node.inner, red, blue)
        if isinstance(node, And):
            return self._eval(node.left, red, blue) and self._eval(node.right, red, blue)
        key = self._key(node, red, blue)
        cached = self.memo.get(key)
        if cached is None:
            cached = self._count_at_least(node, red, blue)
            self.memo[key] = cached
        return cached

    def _sorted_neighbours(self, blue_node) -> tuple:
        cached = self._neighbour_lists.get(blue_node)
        if cached is None:
            cached = tuple(sorted(self.neighbours[blue_node], key=id_key))
            self._neighbour_lists[blue_node] = cached
        return cached

    def _guard_holds(self, guard, red: dict, blue: dict) -> bool:
        edges = self.edges
        return all((blue[j], red[i]) in edges for i, j in guard.items_sorted)

    def _count_at_least(self, node: Exists, red: dict, blue: dict) -> bool:
        return self.count_witnesses(node, red, blue, stop_at=node.count) >= node.count

    def count_witnesses(self, node: Exists, red: dict, blue: dict,
                        stop_at: int | None = None) -> int:
        """Number of tuples satisfying the quantifier scope (capped at ``stop_at``)."""
        guard = node.guard
        if node.sort == RED:
            target = red
            domains = []
            for i in node.indices:
                if i in guard and guard[i] in blue:
                    domains.append(self._sorted_neighbours(blue[guard[i]]))
                else:
                    domains.append(self.red_nodes)
        else:
            target = blue
            domains = [self.blue_nodes] * len(node.indices)
        saved = {i: target[i] for i in node.indices if i in target}
        found = 0
        try:
            for values in product(*domains):
                for i, value in zip(node.indices, values):
                    target[i] = value
                if self._guard_holds(guard, red, blue) and self._eval(node.body, red, blue):
                    found += 1
                    if stop_at is not None and found >= stop_at:
                        break
        finally:
            for i in node.indices:
                if i in saved:
                    target[i] = saved[i]
                else:
                    target.pop(i, None)
        return found


def evaluate(graph: IncidenceGraph, formula: Formula,
             red: Mapping[int, object] | None = None,
             blue: Mapping[int, object] | None = None) -> bool:
    """Return whether ``(graph, assignment)`` satisfies ``formula``."""
    return Evaluator(graph).holds(formula, red, blue)


def satisfies(interpretation: Interpretation, formula: Formula) -> bool:
    return evaluate(interpretation.graph, formula, interpretation.red, interpretation.blue)
