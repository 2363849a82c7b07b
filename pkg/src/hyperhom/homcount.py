"""Exact homomorphism counting.

Two independent code paths are provided for every kind of count:

* a backtracking engine working per connected component of the pattern.
  Its default strategy assigns blue nodes first (their images fix the
  admissible red images) and keeps, for every red node, the set of host
  red nodes still possible as a bitmask; once all blue nodes are placed,
  the red nodes are independent and contribute the product of their
  candidate counts.  When a component has many blue nodes but few red
  nodes (pumped patterns) the engine assigns red nodes first instead, and
  every blue node then contributes the number of host blue nodes whose
  neighbourhood contains the image of its own neighbourhood;
* a naive enumerator that tries every pair of maps, kept only as an oracle.

Counts are Python integers, so they never overflow.
"""

from __future__ import annotations

from itertools import product
from typing import Iterable, Mapping, Sequence

from .config import DEFAULT_CONFIG, Config
from .core_model import Hypergraph, IncidenceGraph, id_key
from .errors import CapExceeded
from .labeled import LabeledGraph


def _check_caps(pattern: IncidenceGraph, host: IncidenceGraph, config: Config):
    if len(pattern.blue) > config.pattern_blue or len(pattern.red) > config.pattern_red:
        raise CapExceeded(
            f"pattern has {len(pattern.blue)} blue + {len(pattern.red)} red nodes; cap is "
            f"{config.pattern_blue} + {config.pattern_red}")
    if len(host.blue) > config.host_blue or len(host.red) > config.host_red:
        raise CapExceeded(
            f"host has {len(host.blue)} blue + {len(host.red)} red nodes; cap is "
            f"{config.host_blue} + {config.host_red}")


class _Host:
    """Bitmask view of a host graph."""

    def __init__(self, graph: IncidenceGraph):
        self.graph = graph
        self.red_bit = {r: 1 << n for n, r in enumerate(graph.red)}
        self.all_red = (1 << len(graph.red)) - 1
        self.blue = graph.blue
        self.mask = {b: _mask(self.red_bit, graph.blue_neighbours[b]) for b in graph.blue}


def _mask(bits: Mapping, nodes: Iterable) -> int:
    value = 0
    for node in nodes:
        value |= bits[node]
    return value


def _components(graph: IncidenceGraph) -> list[tuple[list, list]]:
    """Connected components as (blue nodes, red nodes), deterministic order."""
    parent: dict = {}

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for b in graph.blue:
        parent[("b", b)] = ("b", b)
    for r in graph.red:
        parent[("r", r)] = ("r", r)
    for b, r in graph.edges:
        x, y = find(("b", b)), find(("r", r))
        if x != y:
            parent[y] = x
    groups: dict = {}
    for key in list(parent):
        groups.setdefault(find(key), ([], []))
        blues, reds = groups[find(key)]
        (blues if key[0] == "b" else reds).append(key[1])
    return list(groups.values())


BLUE_FIRST = "blue"
RED_FIRST = "red"
AUTO = "auto"


def _count_component(pattern: IncidenceGraph, blues: list, reds: list, host: _Host,
                     fixed_red: Mapping, fixed_blue: Mapping, engine: str) -> int:
    if engine == AUTO:
        blue_cost = len(host.blue) ** sum(1 for b in blues if b not in fixed_blue)
        red_cost = len(host.graph.red) ** sum(1 for r in reds if r not in fixed_red)
        engine = RED_FIRST if red_cost < blue_cost else BLUE_FIRST
    if engine == RED_FIRST:
        return _count_red_first(pattern, blues, reds, host, fixed_red, fixed_blue)
    if engine != BLUE_FIRST:
        raise ValueError(f"unknown engine {engine!r}")
    return _count_blue_first(pattern, blues, reds, host, fixed_red, fixed_blue)


def _count_red_first(pattern: IncidenceGraph, blues: list, reds: list, host: _Host,
                     fixed_red: Mapping, fixed_blue: Mapping) -> int:
    nbrs = pattern.red_neighbours
    order = sorted(reds, key=lambda r: (r not in fixed_red, -len(nbrs[r]), id_key(r)))
    position = {r: n for n, r in enumerate(order)}
    # Each blue node is resolved once its last red neighbour is placed.
    finished_at: dict = {n: [] for n in range(len(order))}
    free_blue = 1
    for b in blues:
        members = pattern.blue_neighbours[b]
        if not members:
            free_blue *= 1 if b in fixed_blue else len(host.blue)
            continue
        finished_at[max(position[r] for r in members)].append(b)
    masks = host.mask
    host_blue_masks = list(masks.values())
    red_options = [[host.red_bit[fixed_red[r]]] if r in fixed_red else list(host.red_bit.values())
                   for r in order]
    checks = []
    for n in range(len(order)):
        entry = []
        for b in finished_at[n]:
            member_pos = [position[r] for r in pattern.blue_neighbours[b]]
            entry.append((member_pos, masks[fixed_blue[b]] if b in fixed_blue else None))
        checks.append(entry)
    images = [0] * len(order)

    def extend(depth: int) -> int:
        if depth == len(order):
            return 1
        total = 0
        for bit in red_options[depth]:
            images[depth] = bit
            factor = 1
            for member_pos, fixed_mask in checks[depth]:
                needed = 0
                for p in member_pos:
                    needed |= images[p]
                if fixed_mask is not None:
                    ways = 1 if fixed_mask & needed == needed else 0
                else:
                    ways = sum(1 for m in host_blue_masks if m & needed == needed)
                factor *= ways
                if not factor:
                    break
            if factor:
                total += factor * extend(depth + 1)
        return total

    return free_blue * extend(0)


def _count_blue_first(pattern: IncidenceGraph, blues: list, reds: list, host: _Host,
                      fixed_red: Mapping, fixed_blue: Mapping) -> int:
    if not blues:
        total = 1
        for r in reds:
            if r in fixed_red:
                continue
            total *= len(host.graph.red)
        return total
    nbrs = pattern.blue_neighbours
    red_index = {r: n for n, r in enumerate(reds)}
    # Blue order: fixed nodes first, then greedily the node sharing most red
    # neighbours with the nodes already ordered.
    remaining = set(blues)
    order: list = []
    touched: set = set()
    while remaining:
        best = max(
            remaining,
            key=lambda b: (b in fixed_blue, len(nbrs[b] & touched), len(nbrs[b]),
                           _neg_key(b)))
        order.append(best)
        remaining.discard(best)
        touched |= nbrs[best]
    neighbour_lists = [[red_index[r] for r in nbrs[b]] for b in order]
    candidates = [[fixed_blue[b]] if b in fixed_blue else list(host.blue) for b in order]
    initial = [host.red_bit[fixed_red[r]] if r in fixed_red else host.all_red for r in reds]
    if any(d == 0 for d in initial):
        return 0
    masks = host.mask
    depth_total = len(order)

    def extend(depth: int, domains: list) -> int:
        if depth == depth_total:
            result = 1
            for d in domains:
                result *= d.bit_count()
            return result
        total = 0
        local = neighbour_lists[depth]
        for c in candidates[depth]:
            m = masks[c]
            new = domains[:]
            ok = True
            for idx in local:
                narrowed = new[idx] & m
                if not narrowed:
                    ok = False
                    break
                new[idx] = narrowed
            if ok:
                total += extend(depth + 1, new)
        return total

    return extend(0, initial)


def _neg_key(node):
    # max() picks the largest key; invert the id order so ties prefer small ids.
    key = id_key(node)
    return tuple(-x if isinstance(x, int) else 0 for x in key[:2])


def count_with_fixed(pattern: IncidenceGraph, host: IncidenceGraph,
                     fixed_red: Mapping | None = None, fixed_blue: Mapping | None = None,
                     config: Config = DEFAULT_CONFIG, engine: str = AUTO) -> int:
    """Count homomorphisms ``pattern -> host`` that extend the given partial maps.

    ``engine`` selects the branching strategy (``"blue"``, ``"red"`` or
    ``"auto"``); all strategies return the same number.
    """
    _check_caps(pattern, host, config)
    fixed_red = fixed_red or {}
    fixed_blue = fixed_blue or {}
    view = _Host(host)
    total = 1
    for blues, reds in _components(pattern):
        if not blues and not reds:
            continue
        if not reds and len(blues) == 1 and blues[0] not in fixed_blue:
            total *= len(host.blue)
        else:
            total *= _count_component(pattern, blues, reds, view, fixed_red, fixed_blue,
                                      engine)
        if total == 0:
            return 0
    return total


def count_homs_incidence(pattern: IncidenceGraph, host: IncidenceGraph,
                         config: Config = DEFAULT_CONFIG, engine: str = AUTO) -> int:
    """Number of incidence-graph homomorphisms (edge preserving colour-respecting maps)."""
    return count_with_fixed(pattern, host, None, None, config, engine)


def label_constraints(pattern: LabeledGraph, host: LabeledGraph):
    """Forced images imposed by the labels, or ``None`` if no map can respect them."""
    if not set(pattern.r) <= set(host.r) or not set(pattern.b) <= set(host.b):
        return None
    fixed_red: dict = {}
    for i, node in pattern.r.items():
        target = host.r[i]
        if fixed_red.setdefault(node, target) != target:
            return None
    fixed_blue: dict = {}
    for j, node in pattern.b.items():
        target = host.b[j]
        if fixed_blue.setdefault(node, target) != target:
            return None
    return fixed_red, fixed_blue


def count_homs_labeled(pattern: LabeledGraph, host: LabeledGraph,
                       config: Config = DEFAULT_CONFIG, engine: str = AUTO) -> int:
    """Number of homomorphisms that send every label of ``pattern`` to the same label of ``host``.

    Returns 0 when the label domains of ``pattern`` are not contained in those of ``host``.
    """
    constraints = label_constraints(pattern, host)
    if constraints is None:
        return 0
    fixed_red, fixed_blue = constraints
    return count_with_fixed(pattern.graph, host.graph, fixed_red, fixed_blue, config, engine)


def hom_vector(family: Sequence[IncidenceGraph], host: IncidenceGraph,
               config: Config = DEFAULT_CONFIG) -> list[int]:
    return [count_homs_incidence(member, host, config) for member in family]


def indistinguishable_over(family: Sequence[IncidenceGraph], first: IncidenceGraph,
                           second: IncidenceGraph, config: Config = DEFAULT_CONFIG) -> bool:
    return hom_vector(family, first, config) == hom_vector(family, second, config)


# ---------------------------------------------------------------------------
# Hypergraph homomorphisms (exact image condition)


def count_homs_hypergraph(pattern: Hypergraph, host: Hypergraph,
                          config: Config = DEFAULT_CONFIG) -> int:
    """Pairs ``(h_V, h_E)`` with ``f_host(h_E(e)) = h_V(f_pattern(e))`` for every edge."""
    size = len(pattern.vertices) + len(pattern.edge_ids)
    if size > config.pattern_blue + config.pattern_red:
        raise CapExceeded(f"pattern hypergraph has {size} elements")
    edges = sorted(pattern.edge_ids, key=lambda e: (-len(pattern.incidence[e]), id_key(e)))
    host_edges = [(e, pattern_set) for e, pattern_set in host.incidence.items()]
    vertex_map: dict = {}

    def extend(pos: int) -> int:
        if pos == len(edges):
            return 1
        edge = edges[pos]
        members = sorted(pattern.incidence[edge], key=id_key)
        unassigned = [v for v in members if v not in vertex_map]
        assigned_image = {vertex_map[v] for v in members if v in vertex_map}
        total = 0
        for _, target in host_edges:
            if len(target) > len(members) or not assigned_image <= target:
                continue
            if not members:
                total += extend(pos + 1)
                continue
            for images in product(sorted(target, key=id_key), repeat=len(unassigned)):
                if assigned_image | set(images) != target:
                    continue
                for v, w in zip(unassigned, images):
                    vertex_map[v] = w
                total += extend(pos + 1)
                for v in unassigned:
                    del vertex_map[v]
        return total

    return extend(0)


# ---------------------------------------------------------------------------
# Naive oracles (kept deliberately simple and independent)


def naive_count_homs_labeled(pattern: LabeledGraph, host: LabeledGraph) -> int:
    if not set(pattern.r) <= set(host.r) or not set(pattern.b) <= set(host.b):
        return 0
    p, h = pattern.graph, host.graph
    count = 0
    for red_images in product(h.red, repeat=len(p.red)):
        red_map = dict(zip(p.red, red_images))
        if any(red_map[node] != host.r[i] for i, node in pattern.r.items()):
            continue
        for blue_images in product(h.blue, repeat=len(p.blue)):
            blue_map = dict(zip(p.blue, blue_images))
            if any(blue_map[node] != host.b[j] for j, node in pattern.b.items()):
                continue
            if all((blue_map[b], red_map[r]) in h.edges for b, r in p.edges):
                count += 1
    return count


def naive_count_homs_incidence(pattern: IncidenceGraph, host: IncidenceGraph) -> int:
    return naive_count_homs_labeled(LabeledGraph.unlabeled(pattern),
                                    LabeledGraph.unlabeled(host))


def naive_count_homs_hypergraph(pattern: Hypergraph, host: Hypergraph) -> int:
    count = 0
    for vertex_images in product(host.vertices, repeat=len(pattern.vertices)):
        vmap = dict(zip(pattern.vertices, vertex_images))
        for edge_images in product(host.edge_ids, repeat=len(pattern.edge_ids)):
            emap = dict(zip(pattern.edge_ids, edge_images))
            if all(host.incidence[emap[e]] == {vmap[v] for v in pattern.incidence[e]}
                   for e in pattern.edge_ids):
                count += 1
    return count
