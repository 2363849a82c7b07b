"""Hypergraphs, incidence graphs and the structural edits used by the proofs.

Node ids are hashable values (normally integers or strings).  Red and blue
ids live in separate namespaces: an edge is always stored as a
``(blue, red)`` pair, so the colour of an id is determined by its position.
Every collection is kept in a canonical sorted order so that outputs are
deterministic.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Hashable, Iterable, Mapping

from .errors import CapExceeded, InvalidGraph, UnknownNode

NodeId = Hashable


def id_key(node: NodeId):
    """Sort key that orders integers before strings and anything else last."""
    if isinstance(node, bool):
        return (2, 0, repr(node))
    if isinstance(node, int):
        return (0, node, "")
    if isinstance(node, str):
        return (1, 0, node)
    if isinstance(node, tuple):
        return (3, 0, tuple(id_key(part) for part in node))
    return (2, 0, repr(node))


def sorted_ids(nodes: Iterable[NodeId]) -> tuple:
    return tuple(sorted(set(nodes), key=id_key))


def fresh_ids(existing: Iterable[NodeId], count: int) -> list[int]:
    """Return ``count`` integers larger than every integer in ``existing``."""
    ints = [x for x in existing if isinstance(x, int) and not isinstance(x, bool)]
    start = max(ints) + 1 if ints else 0
    return list(range(start, start + count))


@dataclass(frozen=True)
class IncidenceGraph:
    """A bipartite graph with red nodes (vertices) and blue nodes (edges).

    Every red node must have at least one blue neighbour.  The empty graph
    without any node is a legal value.
    """

    red: tuple
    blue: tuple
    edges: frozenset

    def __post_init__(self):
        red_set = set(self.red)
        blue_set = set(self.blue)
        if len(red_set) != len(self.red) or len(blue_set) != len(self.blue):
            raise InvalidGraph("duplicate node ids")
        touched = set()
        for pair in self.edges:
            if len(pair) != 2:
                raise InvalidGraph(f"malformed edge {pair!r}")
            b, r = pair
            if b not in blue_set:
                raise UnknownNode(f"edge {pair!r} uses unknown blue node {b!r}")
            if r not in red_set:
                raise UnknownNode(f"edge {pair!r} uses unknown red node {r!r}")
            touched.add(r)
        isolated = red_set - touched
        if isolated:
            raise InvalidGraph(
                f"red nodes without blue neighbour: {sorted_ids(isolated)!r}"
            )

    @classmethod
    def build(cls, red: Iterable[NodeId], blue: Iterable[NodeId],
              edges: Iterable[tuple]) -> "IncidenceGraph":
        return cls(sorted_ids(red), sorted_ids(blue),
                   frozenset((b, r) for b, r in edges))

    @classmethod
    def empty(cls) -> "IncidenceGraph":
        return cls((), (), frozenset())

    @cached_property
    def blue_neighbours(self) -> Mapping[NodeId, frozenset]:
        table = {b: set() for b in self.blue}
        for b, r in self.edges:
            table[b].add(r)
        return {b: frozenset(rs) for b, rs in table.items()}

    @cached_property
    def red_neighbours(self) -> Mapping[NodeId, frozenset]:
        table = {r: set() for r in self.red}
        for b, r in self.edges:
            table[r].add(b)
        return {r: frozenset(bs) for r, bs in table.items()}

    def neighbourhood(self, blue_node: NodeId) -> frozenset:
        try:
            return self.blue_neighbours[blue_node]
        except KeyError:
            raise UnknownNode(f"unknown blue node {blue_node!r}") from None

    def is_empty(self) -> bool:
        return not self.red and not self.blue

    def max_degree(self) -> int:
        """Largest blue neighbourhood size (0 for graphs without blue nodes)."""
        return max((len(n) for n in self.blue_neighbours.values()), default=0)

    def sorted_edges(self) -> list[tuple]:
        return sorted(self.edges, key=lambda e: (id_key(e[0]), id_key(e[1])))

    def to_json(self) -> dict:
        return {
            "red": list(self.red),
            "blue": list(self.blue),
            "edges": [list(e) for e in self.sorted_edges()],
        }

    @classmethod
    def from_json(cls, data: Mapping) -> "IncidenceGraph":
        try:
            return cls.build(data.get("red", []), data.get("blue", []),
                             [tuple(e) for e in data.get("edges", [])])
        except (TypeError, ValueError) as exc:
            raise InvalidGraph(f"malformed incidence graph JSON: {exc}") from None

    def relabel(self, red_map: Mapping, blue_map: Mapping) -> "IncidenceGraph":
        """Rename nodes through two injective maps."""
        return IncidenceGraph.build(
            (red_map[r] for r in self.red),
            (blue_map[b] for b in self.blue),
            ((blue_map[b], red_map[r]) for b, r in self.edges),
        )


@dataclass(frozen=True)
class Hypergraph:
    """Vertices, edge ids and an incidence map; edges may repeat."""

    vertices: tuple
    edge_ids: tuple
    incidence: Mapping = field(compare=False)

    def __post_init__(self):
        if set(self.incidence) != set(self.edge_ids):
            raise InvalidGraph("incidence map must be defined on exactly the edges")
        vertex_set = set(self.vertices)
        covered = set()
        for e, members in self.incidence.items():
            unknown = set(members) - vertex_set
            if unknown:
                raise UnknownNode(f"edge {e!r} uses unknown vertices {sorted_ids(unknown)!r}")
            covered |= set(members)
        if covered != vertex_set:
            raise InvalidGraph(
                f"vertices outside every edge: {sorted_ids(vertex_set - covered)!r}"
            )

    @classmethod
    def build(cls, vertices: Iterable[NodeId],
              incidence: Mapping[NodeId, Iterable[NodeId]]) -> "Hypergraph":
        frozen = {e: frozenset(vs) for e, vs in incidence.items()}
        return cls(sorted_ids(vertices), sorted_ids(frozen), frozen)

    def __eq__(self, other):
        if not isinstance(other, Hypergraph):
            return NotImplemented
        return (self.vertices == other.vertices and self.edge_ids == other.edge_ids
                and dict(self.incidence) == dict(other.incidence))

    def __hash__(self):
        return hash((self.vertices, self.edge_ids))

    def is_simple(self) -> bool:
        sets = list(self.incidence.values())
        return len(sets) == len(set(sets))

    def to_json(self) -> dict:
        return {
            "vertices": list(self.vertices),
            "edges": {str(e): sorted(self.incidence[e], key=id_key) for e in self.edge_ids},
        }

    @classmethod
    def from_json(cls, data: Mapping) -> "Hypergraph":
        return cls.build(data.get("vertices", []), data.get("edges", {}))


def to_incidence(hypergraph: Hypergraph) -> IncidenceGraph:
    return IncidenceGraph.build(
        hypergraph.vertices,
        hypergraph.edge_ids,
        ((e, v) for e in hypergraph.edge_ids for v in hypergraph.incidence[e]),
    )


def from_incidence(graph: IncidenceGraph) -> Hypergraph:
    # IncidenceGraph already rejects isolated red nodes on construction.
    return Hypergraph.build(graph.red, {b: graph.blue_neighbours[b] for b in graph.blue})


def add_pumped_edges(graph: IncidenceGraph, red_set: Iterable[NodeId],
                     count: int) -> IncidenceGraph:
    """Insert ``count`` fresh blue nodes whose neighbourhood is exactly ``red_set``."""
    red_set = frozenset(red_set)
    unknown = red_set - set(graph.red)
    if unknown:
        raise UnknownNode(f"unknown red ids {sorted_ids(unknown)!r}")
    if count < 0:
        raise ValueError("count must be non-negative")
    if count == 0:
        return graph
    new_blue = fresh_ids(graph.blue, count)
    return IncidenceGraph.build(
        graph.red,
        list(graph.blue) + new_blue,
        set(graph.edges) | {(b, r) for b in new_blue for r in red_set},
    )


def pumped_blue_nodes(before: IncidenceGraph, after: IncidenceGraph) -> list:
    """Blue nodes of ``after`` that are not present in ``before``, in order."""
    old = set(before.blue)
    return [b for b in after.blue if b not in old]


@dataclass(frozen=True)
class Pump:
    """Insert a fresh vertex into one edge."""

    edge: NodeId
    fresh_vertex: NodeId


@dataclass(frozen=True)
class LocalMerge:
    """Identify two vertices that share an edge with one fresh vertex."""

    first: NodeId
    second: NodeId
    edge: NodeId
    merged_vertex: NodeId


def modify_hypergraph(hypergraph: Hypergraph, op: Pump | LocalMerge) -> Hypergraph:
    incidence = {e: set(vs) for e, vs in hypergraph.incidence.items()}
    if isinstance(op, Pump):
        if op.edge not in incidence:
            raise UnknownNode(f"unknown edge {op.edge!r}")
        if op.fresh_vertex in hypergraph.vertices:
            raise InvalidGraph(f"vertex {op.fresh_vertex!r} is not fresh")
        incidence[op.edge].add(op.fresh_vertex)
        return Hypergraph.build(list(hypergraph.vertices) + [op.fresh_vertex], incidence)
    if isinstance(op, LocalMerge):
        if op.edge not in incidence:
            raise UnknownNode(f"unknown edge {op.edge!r}")
        members = incidence[op.edge]
        if op.first not in members or op.second not in members:
            raise InvalidGraph(
                f"vertices {op.first!r} and {op.second!r} are not co-incident in {op.edge!r}"
            )
        merged = op.merged_vertex
        if merged in hypergraph.vertices and merged not in (op.first, op.second):
            raise InvalidGraph(f"vertex {merged!r} is not fresh")
        projection = merge_projection(op)
        vertices = {projection(v) for v in hypergraph.vertices}
        new_incidence = {e: {projection(v) for v in vs} for e, vs in incidence.items()}
        return Hypergraph.build(vertices, new_incidence)
    raise TypeError(f"unsupported operation {op!r}")


def merge_projection(op: LocalMerge):
    def project(v):
        return op.merged_vertex if v in (op.first, op.second) else v
    return project


# ---------------------------------------------------------------------------
# Isomorphism


@dataclass(frozen=True)
class Isomorphism:
    red_map: Mapping
    blue_map: Mapping


def _refined_colours(graphs: list[IncidenceGraph]) -> list[dict]:
    """Joint colour refinement; returns one colour table per graph.

    Keys of a table are ``("r", id)`` and ``("b", id)``.
    """
    tables = []
    for g in graphs:
        table = {}
        for r in g.red:
            table[("r", r)] = ("r", len(g.red_neighbours[r]))
        for b in g.blue:
            table[("b", b)] = ("b", len(g.blue_neighbours[b]))
        tables.append(table)
    while True:
        signatures = []
        for g, table in zip(graphs, tables):
            sig = {}
            for r in g.red:
                sig[("r", r)] = (table[("r", r)],
                                 tuple(sorted(table[("b", b)] for b in g.red_neighbours[r])))
            for b in g.blue:
                sig[("b", b)] = (table[("b", b)],
                                 tuple(sorted(table[("r", r)] for r in g.blue_neighbours[b])))
            signatures.append(sig)
        palette = sorted({s for sig in signatures for s in sig.values()}, key=repr)
        index = {s: n for n, s in enumerate(palette)}
        new_tables = [{k: index[s] for k, s in sig.items()} for sig in signatures]
        old_classes = len({c for t in tables for c in t.values()})
        new_classes = len(palette)
        tables = new_tables
        if new_classes == old_classes:
            return tables


def find_isomorphism(first: IncidenceGraph, second: IncidenceGraph,
                     max_red: int = 12, max_blue: int = 12,
                     fixed_red: Mapping | None = None,
                     fixed_blue: Mapping | None = None) -> Isomorphism | None:
    """Return an isomorphism witness or ``None``.

    Uses colour refinement followed by backtracking over nodes in
    breadth-first order.  ``fixed_red``/``fixed_blue`` force the images of
    some nodes (used for labeled graphs).  Raises :class:`CapExceeded`
    beyond the caps.
    """
    forced = {("r", a): ("r", b) for a, b in (fixed_red or {}).items()}
    forced.update({("b", a): ("b", b) for a, b in (fixed_blue or {}).items()})
    for g in (first, second):
        if len(g.red) > max_red or len(g.blue) > max_blue:
            raise CapExceeded(
                f"isomorphism test limited to {max_red} red + {max_blue} blue nodes"
            )
    if (len(first.red), len(first.blue), len(first.edges)) != (
            len(second.red), len(second.blue), len(second.edges)):
        return None
    table1, table2 = _refined_colours([first, second])
    if sorted(table1.values()) != sorted(table2.values()):
        return None

    order = _bfs_order(first)
    by_colour: dict = {}
    for key, colour in table2.items():
        by_colour.setdefault((key[0], colour), []).append(key)

    mapping: dict = {}
    used: set = set()

    def neighbours(graph, key):
        side, node = key
        if side == "r":
            return [("b", b) for b in graph.red_neighbours[node]]
        return [("r", r) for r in graph.blue_neighbours[node]]

    def consistent(key, image):
        mapped_nbrs = [mapping[n] for n in neighbours(first, key) if n in mapping]
        image_nbrs = set(neighbours(second, image))
        if any(m not in image_nbrs for m in mapped_nbrs):
            return False
        # No extra adjacency: every neighbour of the image already used must be
        # the image of a neighbour of key.
        preimage_nbrs = {mapping[n] for n in neighbours(first, key) if n in mapping}
        return all(n not in used or n in preimage_nbrs for n in image_nbrs)

    def extend(pos: int) -> bool:
        if pos == len(order):
            return True
        key = order[pos]
        options = by_colour.get((key[0], table1[key]), [])
        if key in forced:
            options = [forced[key]] if forced[key] in options else []
        for image in options:
            if image in used or not consistent(key, image):
                continue
            mapping[key] = image
            used.add(image)
            if extend(pos + 1):
                return True
            del mapping[key]
            used.discard(image)
        return False

    if not extend(0):
        return None
    return Isomorphism(
        red_map={k[1]: v[1] for k, v in mapping.items() if k[0] == "r"},
        blue_map={k[1]: v[1] for k, v in mapping.items() if k[0] == "b"},
    )


def _bfs_order(graph: IncidenceGraph) -> list:
    seen: set = set()
    order: list = []
    starts = [("b", b) for b in graph.blue] + [("r", r) for r in graph.red]
    for start in starts:
        if start in seen:
            continue
        seen.add(start)
        queue = [start]
        while queue:
            key = queue.pop(0)
            order.append(key)
            side, node = key
            if side == "b":
                nbrs = [("r", r) for r in sorted(graph.blue_neighbours[node], key=id_key)]
            else:
                nbrs = [("b", b) for b in sorted(graph.red_neighbours[node], key=id_key)]
            for n in nbrs:
                if n not in seen:
                    seen.add(n)
                    queue.append(n)
    return order


def isomorphic(first: IncidenceGraph, second: IncidenceGraph, max_red: int = 12,
               max_blue: int = 12) -> bool:
    return find_isomorphism(first, second, max_red, max_blue) is not None


def disjoint_union(first: IncidenceGraph, second: IncidenceGraph) -> IncidenceGraph:
    """Disjoint union with ids tagged ``(0, id)`` and ``(1, id)``."""
    red = [(0, r) for r in first.red] + [(1, r) for r in second.red]
    blue = [(0, b) for b in first.blue] + [(1, b) for b in second.blue]
    edges = [((0, b), (0, r)) for b, r in first.edges]
    edges += [((1, b), (1, r)) for b, r in second.edges]
    return IncidenceGraph.build(red, blue, edges)


def renumber(graph: IncidenceGraph) -> IncidenceGraph:
    """Rename red and blue nodes to dense integers in sorted order."""
    red_map = {r: n for n, r in enumerate(graph.red)}
    blue_map = {b: n for n, b in enumerate(graph.blue)}
    return graph.relabel(red_map, blue_map)
