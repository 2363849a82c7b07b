"""Worked instances shipped with the package.

* the hypergraph of two disjoint triangles, each also carrying a 3-edge,
  together with a sentence describing it up to isomorphism;
* a width-2 entangled decomposition of a 12-vertex incidence graph with
  its hand-made colouring and schedule tables;
* two before/after pairs illustrating how a generalised decomposition is
  repaired into an entangled one.

The graphs and decompositions are also available as JSON files next to
this module (see :func:`fixture_path`).
"""

from __future__ import annotations

import json
from importlib import resources
from pathlib import Path

from ..core_model import Hypergraph, IncidenceGraph, to_incidence
from ..decomp import TreeDecomp
from ..logic.formulas import (BLUE, RED, And, AtomE, EqBlue, EqRed, Formula,
                              Not, conj, exists_eq, exists_geq)
from ..logic.guards import EMPTY_GUARD, Guard

# ---------------------------------------------------------------------------
# Two triangles with a 3-edge each


def triangles_hypergraph() -> Hypergraph:
    """Vertices 1..6, edges {1,2,3}, {4,5,6} and the six 2-edges of both triangles."""
    edges = {
        "e123": (1, 2, 3), "e456": (4, 5, 6),
        "e12": (1, 2), "e23": (2, 3), "e31": (3, 1),
        "e45": (4, 5), "e56": (5, 6), "e64": (6, 4),
    }
    return Hypergraph.build(range(1, 7), edges)


def triangles_graph() -> IncidenceGraph:
    return to_incidence(triangles_hypergraph())


def _neighbour_count(blue: int, count: int) -> Formula:
    """``E=count(v1).(E(e_blue,v1) & E(e_blue,v1))``."""
    return exists_eq(RED, count, (1,), Guard({1: blue}), AtomE(blue, 1))


def _edge_count(count: int) -> Formula:
    """Exactly ``count`` blue nodes: ``E=count(e1).(T & e1=e1)``."""
    return exists_eq(BLUE, count, (1,), EMPTY_GUARD, EqBlue(1, 1))


def _edges_with_degree(edges: int, degree: int) -> Formula:
    return exists_eq(BLUE, edges, (1,), EMPTY_GUARD, _neighbour_count(1, degree))


def _large_edges_disjoint() -> Formula:
    """No two distinct blue nodes with at least 3 neighbours share a red neighbour."""
    large = conj([exists_geq(RED, 3, (1,), Guard({1: j}), AtomE(j, 1)) for j in (1, 2)])
    alpha = And(Not(EqBlue(1, 2)), large)
    shared = exists_geq(RED, 1, (1,), Guard({1: 1}), AtomE(2, 1))
    return Not(exists_geq(BLUE, 1, (1, 2), EMPTY_GUARD, And(alpha, shared)))


def _triangle_side(i: int, j: int) -> Formula:
    """Exactly one blue node e2 adjacent to exactly v_i and v_j (and two red nodes)."""
    inner = And(And(AtomE(2, i), AtomE(2, j)),
                exists_eq(RED, 2, (4,), Guard({4: 2}), AtomE(2, 4)))
    return exists_eq(BLUE, 1, (2,), Guard({i: 1, j: 1}), inner)


def _triangles_present() -> Formula:
    """Exactly two blue nodes e1 covering three distinct red nodes that form a triangle."""
    delta = Guard({1: 1, 2: 1, 3: 1})
    distinct = conj([Not(EqRed(i, j)) for i, j in ((1, 2), (1, 3), (2, 3))])
    sides = And(And(_triangle_side(1, 2), _triangle_side(2, 3)), _triangle_side(3, 1))
    body = exists_geq(RED, 1, (1, 2, 3), delta, And(distinct, sides))
    return exists_eq(BLUE, 2, (1,), EMPTY_GUARD, body)


def triangles_sentence() -> Formula:
    """A GC^2 sentence whose models are exactly the hypergraphs isomorphic to the fixture."""
    parts = [
        _edge_count(8),
        _edges_with_degree(2, 3),
        _edges_with_degree(6, 2),
        _large_edges_disjoint(),
        _triangles_present(),
    ]
    return conj(parts)


def disjoint_large_edges_sentence() -> Formula:
    """All blue nodes with at least three neighbours are pairwise disjoint."""
    def at_least_three(j):
        return exists_geq(RED, 3, (1,), Guard({1: j}), AtomE(j, 1))

    intersect = exists_geq(RED, 1, (1,), Guard({1: 1}), AtomE(2, 1))
    both_large = conj([at_least_three(1), at_least_three(2)])
    body = And(And(intersect, both_large), Not(EqBlue(1, 2)))
    return Not(exists_geq(BLUE, 1, (1, 2), EMPTY_GUARD, body))


# ---------------------------------------------------------------------------
# Width-2 entangled decomposition


_DECOMPOSITION_NEIGHBOURS = {
    "a": ("v8", "v4", "v5", "v10", "v1"),
    "b": ("v9", "v6", "v7", "v11", "v1"),
    "c": ("v8", "v2", "v9"),
    "d": ("v2", "v4"),
    "e": ("v2", "v6"),
    "f": ("v10", "v3", "v11"),
    "g": ("v3", "v5"),
    "h": ("v3", "v7"),
    "m": ("v4", "v6"),
    "n": ("v5", "v7"),
    "j": ("v0", "v4", "v5", "v6", "v7"),
}

_TREE_EDGES = (("t1", "t2"), ("t2", "t3"), ("t2", "t4"), ("t3", "t5"), ("t3", "t6"),
               ("t4", "t7"), ("t4", "t8"))

_COVERS = {
    "t1": ("j", "b"), "t2": ("a", "b"), "t3": ("c", "m"), "t4": ("f", "n"),
    "t5": ("d",), "t6": ("e",), "t7": ("g",), "t8": ("h",),
}

_BAGS = {
    "t1": ("v0", "v1", "v4", "v5", "v6", "v7", "v9", "v11"),
    "t2": ("v1", "v4", "v5", "v6", "v7", "v8", "v9", "v10", "v11"),
    "t3": ("v2", "v4", "v6", "v8", "v9"),
    "t4": ("v3", "v5", "v7", "v10", "v11"),
    "t5": ("v2", "v4"),
    "t6": ("v2", "v6"),
    "t7": ("v3", "v5"),
    "t8": ("v3", "v7"),
}

# Hand-made 2-colouring of the blue nodes.
DECOMPOSITION_COLOURING = {"a": 1, "b": 2, "c": 2, "d": 1, "e": 1, "f": 2, "g": 1, "h": 1,
                           "j": 1, "m": 1, "n": 1}

# Hand-made schedule (tree-node, red node) -> guarding blue node.
DECOMPOSITION_SCHEDULE = {
    ("t1", "v0"): "j", ("t1", "v1"): "b", ("t1", "v4"): "j", ("t1", "v5"): "j",
    ("t1", "v6"): "j", ("t1", "v7"): "j", ("t1", "v9"): "b", ("t1", "v11"): "b",
    ("t2", "v1"): "b", ("t2", "v4"): "a", ("t2", "v5"): "a", ("t2", "v6"): "b",
    ("t2", "v7"): "b", ("t2", "v8"): "a", ("t2", "v9"): "b", ("t2", "v10"): "a",
    ("t2", "v11"): "b",
    ("t3", "v2"): "c", ("t3", "v4"): "m", ("t3", "v6"): "m", ("t3", "v8"): "c",
    ("t3", "v9"): "c",
    ("t4", "v3"): "f", ("t4", "v5"): "n", ("t4", "v7"): "n", ("t4", "v10"): "f",
    ("t4", "v11"): "f",
    ("t5", "v2"): "d", ("t5", "v4"): "d",
    ("t6", "v2"): "e", ("t6", "v6"): "e",
    ("t7", "v3"): "g", ("t7", "v5"): "g",
    ("t8", "v3"): "h", ("t8", "v7"): "h",
}


def decomposition_graph() -> IncidenceGraph:
    red = [f"v{i}" for i in range(12)]
    edges = [(e, v) for e, vs in _DECOMPOSITION_NEIGHBOURS.items() for v in vs]
    return IncidenceGraph.build(red, _DECOMPOSITION_NEIGHBOURS, edges)


def decomposition_tree() -> TreeDecomp:
    return TreeDecomp.build(_COVERS, _TREE_EDGES, _BAGS, _COVERS, root="t1")


# ---------------------------------------------------------------------------
# Repairing a generalised decomposition


def precision_before() -> tuple[IncidenceGraph, TreeDecomp]:
    """The tree-node t has a cover that reaches the red node i outside its bag."""
    hypergraph = Hypergraph.build("abcdefgi", {
        "abc": "abc", "cd": "cd", "efi": "efi", "gi": "gi",
    })
    tree = TreeDecomp.build(["t", "u"], [("t", "u")], {"t": "abcdefg", "u": "efgi"},
                            {"t": ("abc", "cd", "efi", "gi"), "u": ("efi", "gi")}, root="t")
    return to_incidence(hypergraph), tree


def precision_after() -> tuple[IncidenceGraph, TreeDecomp]:
    """The same node after adding the edges {e,f} and {g} and using them in the cover."""
    hypergraph = Hypergraph.build("abcdefgi", {
        "abc": "abc", "cd": "cd", "efi": "efi", "gi": "gi", "ef": "ef", "g": "g",
    })
    tree = TreeDecomp.build(["t", "u"], [("t", "u")], {"t": "abcdefg", "u": "efgi"},
                            {"t": ("abc", "cd", "ef", "g"), "u": ("efi", "gi")}, root="t")
    return to_incidence(hypergraph), tree


_SPLIT_EDGES = {"a": "pqu", "e": "pq", "x1": ("p", "w1"), "x2": ("p", "w2"),
                "x3": ("p", "w3")}
_SPLIT_VERTICES = ("p", "q", "u", "w1", "w2", "w3")
_SPLIT_TREE = (("t0", "t1"), ("t0", "t2"), ("t0", "t3"))


def _split_bags() -> dict:
    bags = {"t0": ("p", "q", "u")}
    for n in (1, 2, 3):
        bags[f"t{n}"] = ("p", "q", f"w{n}")
    return bags


def connectedness_before() -> tuple[IncidenceGraph, TreeDecomp]:
    """The blue node e occurs in three covers that are pairwise separated by t0."""
    hypergraph = Hypergraph.build(_SPLIT_VERTICES, _SPLIT_EDGES)
    covers = {"t0": ("a",), "t1": ("e", "x1"), "t2": ("e", "x2"), "t3": ("e", "x3")}
    tree = TreeDecomp.build(covers, _SPLIT_TREE, _split_bags(), covers, root="t0")
    return to_incidence(hypergraph), tree


def connectedness_after() -> tuple[IncidenceGraph, TreeDecomp]:
    """Two copies of e are added, one per extra connected part of its occurrences."""
    edges = dict(_SPLIT_EDGES, e2="pq", e3="pq")
    hypergraph = Hypergraph.build(_SPLIT_VERTICES, edges)
    covers = {"t0": ("a",), "t1": ("e", "x1"), "t2": ("e2", "x2"), "t3": ("e3", "x3")}
    tree = TreeDecomp.build(covers, _SPLIT_TREE, _split_bags(), covers, root="t0")
    return to_incidence(hypergraph), tree


# ---------------------------------------------------------------------------
# Files


FIXTURE_FILES = {
    "triangles.json": lambda: triangles_graph().to_json(),
    "triangles-hypergraph.json": lambda: triangles_hypergraph().to_json(),
    "decomposition-graph.json": lambda: decomposition_graph().to_json(),
    "decomposition-tree.json": lambda: decomposition_tree().to_json(),
    "precision-before-graph.json": lambda: precision_before()[0].to_json(),
    "precision-before-tree.json": lambda: precision_before()[1].to_json(),
    "precision-after-graph.json": lambda: precision_after()[0].to_json(),
    "precision-after-tree.json": lambda: precision_after()[1].to_json(),
    "connectedness-before-graph.json": lambda: connectedness_before()[0].to_json(),
    "connectedness-before-tree.json": lambda: connectedness_before()[1].to_json(),
    "connectedness-after-graph.json": lambda: connectedness_after()[0].to_json(),
    "connectedness-after-tree.json": lambda: connectedness_after()[1].to_json(),
}


def fixture_path(name: str) -> Path:
    """Path of a shipped fixture file (JSON graphs/decompositions, formula text)."""
    return Path(str(resources.files(__package__).joinpath(name)))


SENTENCE_FILES = {
    "triangles-sentence.txt": triangles_sentence,
    "disjoint-large-edges-sentence.txt": disjoint_large_edges_sentence,
}


def fixture_names() -> list[str]:
    return sorted(list(FIXTURE_FILES) + list(SENTENCE_FILES))


def render_fixture(name: str) -> str:
    """The exact text a fixture file should contain."""
    if name in SENTENCE_FILES:
        from ..logic.formulas import TOP, And
        from ..logic.parser import render_formula
        return render_formula(And(TOP, SENTENCE_FILES[name]())) + "\n"
    return json.dumps(FIXTURE_FILES[name](), indent=1, sort_keys=True) + "\n"


def write_fixtures(directory: str | Path) -> list[Path]:
    """Write every fixture file into ``directory``; returns the written paths."""
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    written = []
    for name in fixture_names():
        path = directory / name
        path.write_text(render_fixture(name))
        written.append(path)
    return written
