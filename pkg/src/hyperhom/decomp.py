"""Generalised and entangled hypertree decompositions of incidence graphs.

A decomposition is a tree whose nodes carry a bag (red nodes) and a cover
(blue nodes).  This module validates decompositions, searches for them,
normalises them into binary monotone shape and turns a distinguishing
ghd into a distinguishing ehd by pumping blue nodes.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations, product
from typing import Callable, Hashable, Iterable, Mapping

from .config import DEFAULT_CONFIG, Config
from .core_model import (Hypergraph, IncidenceGraph, LocalMerge, Pump,
                         add_pumped_edges, fresh_ids, id_key, merge_projection,
                         pumped_blue_nodes, sorted_ids, to_incidence)
from .errors import InvalidDecomposition, SearchCapExceeded, UnknownNode

GHD = "ghd"
EHD = "ehd"
EXACT = "exact"
GREEDY = "greedy"


def _pair(a, b) -> tuple:
    return (a, b) if id_key(a) <= id_key(b) else (b, a)


@dataclass(frozen=True)
class TreeDecomp:
    """Tree over ``nodes`` with a bag and a cover per node and an optional root."""

    nodes: tuple
    tree_edges: frozenset
    bag: Mapping = field(compare=False)
    cover: Mapping = field(compare=False)
    root: Hashable | None = None

    def __post_init__(self):
        node_set = set(self.nodes)
        if len(node_set) != len(self.nodes):
            raise InvalidDecomposition("duplicate tree-node ids")
        if not self.nodes:
            raise InvalidDecomposition("a decomposition needs at least one tree-node")
        if set(self.bag) != node_set or set(self.cover) != node_set:
            raise InvalidDecomposition("bag and cover must be defined on exactly the tree-nodes")
        for a, b in self.tree_edges:
            if a not in node_set or b not in node_set or a == b:
                raise InvalidDecomposition(f"bad tree edge {(a, b)!r}")
        if len(self.tree_edges) != len(self.nodes) - 1:
            raise InvalidDecomposition("the tree must have exactly |nodes| - 1 edges")
        seen = {self.nodes[0]}
        stack = [self.nodes[0]]
        adjacency = self.adjacency
        while stack:
            t = stack.pop()
            for u in adjacency[t]:
                if u not in seen:
                    seen.add(u)
                    stack.append(u)
        if seen != node_set:
            raise InvalidDecomposition("the tree is not connected")
        if self.root is not None and self.root not in node_set:
            raise InvalidDecomposition(f"root {self.root!r} is not a tree-node")

    @classmethod
    def build(cls, nodes: Iterable, tree_edges: Iterable, bag: Mapping, cover: Mapping,
              root=None) -> "TreeDecomp":
        nodes = sorted_ids(nodes)
        return cls(nodes, frozenset(_pair(a, b) for a, b in tree_edges),
                   {t: frozenset(bag[t]) for t in nodes},
                   {t: frozenset(cover[t]) for t in nodes}, root)

    def __eq__(self, other):
        if not isinstance(other, TreeDecomp):
            return NotImplemented
        return (self.nodes == other.nodes and self.tree_edges == other.tree_edges
                and dict(self.bag) == dict(other.bag) and dict(self.cover) == dict(other.cover)
                and self.root == other.root)

    def __hash__(self):
        return hash((self.nodes, self.tree_edges, self.root))

    @property
    def adjacency(self) -> dict:
        table = {t: [] for t in self.nodes}
        for a, b in self.tree_edges:
            table[a].append(b)
            table[b].append(a)
        return {t: sorted(ns, key=id_key) for t, ns in table.items()}

    def with_root(self, root) -> "TreeDecomp":
        return TreeDecomp(self.nodes, self.tree_edges, self.bag, self.cover, root)

    def children(self, root=None) -> dict:
        """Children lists of the tree rooted at ``root`` (default: own root or first node)."""
        root = self._root(root)
        adjacency = self.adjacency
        result = {t: [] for t in self.nodes}
        seen = {root}
        queue = [root]
        while queue:
            t = queue.pop(0)
            for u in adjacency[t]:
                if u not in seen:
                    seen.add(u)
                    result[t].append(u)
                    queue.append(u)
        return result

    def parents(self, root=None) -> dict:
        result = {self._root(root): None}
        for t, kids in self.children(root).items():
            for c in kids:
                result[c] = t
        return result

    def top_down(self, root=None) -> list:
        root = self._root(root)
        kids = self.children(root)
        order = [root]
        for t in order:
            order.extend(kids[t])
        return order

    def _root(self, root):
        if root is not None:
            return root
        return self.root if self.root is not None else self.nodes[0]

    def to_json(self) -> dict:
        data = {
            "nodes": list(self.nodes),
            "edges": [list(e) for e in sorted(self.tree_edges,
                                               key=lambda e: (id_key(e[0]), id_key(e[1])))],
            "bag": {str(t): sorted(self.bag[t], key=id_key) for t in self.nodes},
            "cover": {str(t): sorted(self.cover[t], key=id_key) for t in self.nodes},
        }
        if self.root is not None:
            data["root"] = self.root
        return data

    @classmethod
    def from_json(cls, data: Mapping) -> "TreeDecomp":
        try:
            nodes = list(data["nodes"])
            by_text = {str(t): t for t in nodes}
            bag = {by_text[str(t)]: vs for t, vs in data["bag"].items()}
            cover = {by_text[str(t)]: bs for t, bs in data["cover"].items()}
            return cls.build(nodes, [tuple(e) for e in data.get("edges", [])], bag, cover,
                             data.get("root"))
        except (KeyError, TypeError, ValueError) as exc:
            raise InvalidDecomposition(f"malformed decomposition JSON: {exc}") from None


def width(decomposition: TreeDecomp) -> int:
    return max((len(c) for c in decomposition.cover.values()), default=0)


# ---------------------------------------------------------------------------
# Validation


@dataclass
class ValidationReport:
    mode: str
    violations: list[str] = field(default_factory=list)

    @property
    def valid(self) -> bool:
        return not self.violations

    def __bool__(self) -> bool:
        return self.valid

    def to_json(self) -> dict:
        return {"mode": self.mode, "valid": self.valid, "violations": list(self.violations)}


def _connected(decomposition: TreeDecomp, members: set) -> bool:
    if not members:
        return True
    adjacency = decomposition.adjacency
    start = next(iter(members))
    seen = {start}
    stack = [start]
    while stack:
        t = stack.pop()
        for u in adjacency[t]:
            if u in members and u not in seen:
                seen.add(u)
                stack.append(u)
    return seen == members


def validate(decomposition: TreeDecomp, graph: IncidenceGraph, mode: str = GHD) -> ValidationReport:
    """Check the ghd conditions (and the two extra ehd conditions in ``ehd`` mode)."""
    if mode not in (GHD, EHD):
        raise ValueError(f"unknown mode {mode!r}")
    red_set, blue_set = set(graph.red), set(graph.blue)
    for t in decomposition.nodes:
        unknown_red = decomposition.bag[t] - red_set
        unknown_blue = decomposition.cover[t] - blue_set
        if unknown_red:
            raise UnknownNode(f"bag of {t!r} uses unknown red nodes {sorted_ids(unknown_red)!r}")
        if unknown_blue:
            raise UnknownNode(
                f"cover of {t!r} uses unknown blue nodes {sorted_ids(unknown_blue)!r}")
    report = ValidationReport(mode)
    out = report.violations
    nbrs = graph.blue_neighbours
    for e in graph.blue:
        if not any(e in decomposition.cover[t] and nbrs[e] <= decomposition.bag[t]
                   for t in decomposition.nodes):
            out.append(f"completeness: no tree-node covers blue node {e!r} together with "
                       f"its whole neighbourhood")
    for v in graph.red:
        holders = {t for t in decomposition.nodes if v in decomposition.bag[t]}
        if not _connected(decomposition, holders):
            out.append(f"red connectedness: tree-nodes containing red node {v!r} are "
                       f"disconnected: {list(sorted_ids(holders))!r}")
    for t in decomposition.nodes:
        covered = frozenset().union(*(nbrs[e] for e in decomposition.cover[t]))
        missing = decomposition.bag[t] - covered
        if missing:
            out.append(f"covering: bag of {t!r} has uncovered red nodes "
                       f"{list(sorted_ids(missing))!r}")
        if mode == EHD and covered != decomposition.bag[t]:
            extra = covered - decomposition.bag[t]
            if extra:
                out.append(f"precise coverage: cover of {t!r} reaches red nodes "
                           f"{list(sorted_ids(extra))!r} outside its bag")
    if mode == EHD:
        for e in graph.blue:
            holders = {t for t in decomposition.nodes if e in decomposition.cover[t]}
            if not _connected(decomposition, holders):
                out.append(f"blue connectedness: tree-nodes covering blue node {e!r} are "
                           f"disconnected: {list(sorted_ids(holders))!r}")
    return report


def is_valid(decomposition: TreeDecomp, graph: IncidenceGraph, mode: str = GHD) -> bool:
    return validate(decomposition, graph, mode).valid


def precise_bag(graph: IncidenceGraph, cover: Iterable) -> frozenset:
    return frozenset().union(*(graph.blue_neighbours[e] for e in cover))


# ---------------------------------------------------------------------------
# Search


def search_width(graph: IncidenceGraph, k: int, mode: str = GHD, engine: str = EXACT,
                 config: Config = DEFAULT_CONFIG) -> TreeDecomp | None:
    """Find a decomposition of width at most ``k``.

    The exact engine returns a decomposition iff one exists.  The greedy
    engine only gives an upper bound: ``None`` does not prove absence.
    """
    if mode not in (GHD, EHD):
        raise ValueError(f"unknown mode {mode!r}")
    if engine not in (EXACT, GREEDY):
        raise ValueError(f"unknown engine {engine!r}")
    if k < 0:
        raise ValueError("k must be non-negative")
    if engine == EXACT and len(graph.blue) > config.search_blue:
        raise SearchCapExceeded(
            f"exact search is limited to {config.search_blue} blue nodes, got {len(graph.blue)}")
    if not graph.blue:
        return TreeDecomp.build([0], [], {0: ()}, {0: ()}, 0)
    if mode == GHD:
        if engine == EXACT:
            return _exact_ghd(graph, k)
        return _greedy_ghd(graph, k)
    budget = None if engine == EXACT else 20000
    return _ehd_search(graph, k, budget)


def _min_cover(graph: IncidenceGraph, bag: frozenset, k: int) -> tuple | None:
    """Smallest set of at most ``k`` blue nodes whose neighbourhoods contain ``bag``."""
    if not bag:
        return ()
    candidates = [e for e in graph.blue if graph.blue_neighbours[e] & bag]
    for size in range(1, k + 1):
        for combo in combinations(candidates, size):
            if bag <= precise_bag(graph, combo):
                return combo
    return None


def _primal_adjacency(graph: IncidenceGraph) -> dict:
    table = {v: set() for v in graph.red}
    for e in graph.blue:
        members = graph.blue_neighbours[e]
        for v in members:
            table[v] |= members
    for v in table:
        table[v].discard(v)
    return table


def _elimination_bag(adjacency: dict, vertex, eliminated: frozenset) -> frozenset:
    """``vertex`` plus every non-eliminated vertex reachable through eliminated ones."""
    seen = {vertex}
    stack = [vertex]
    bag = {vertex}
    while stack:
        u = stack.pop()
        for w in adjacency[u]:
            if w in seen:
                continue
            seen.add(w)
            if w in eliminated:
                stack.append(w)
            else:
                bag.add(w)
    return frozenset(bag)


def _decomposition_from_order(graph: IncidenceGraph, order: list, k: int) -> TreeDecomp:
    adjacency = _primal_adjacency(graph)
    position = {v: n for n, v in enumerate(order)}
    bags = {}
    eliminated: set = set()
    for v in order:
        bags[v] = _elimination_bag(adjacency, v, frozenset(eliminated))
        eliminated.add(v)
    nodes = list(range(len(order)))
    node_of = {v: n for n, v in enumerate(order)}
    tree_edges = []
    roots = []
    for v in order:
        later = [u for u in bags[v] if u != v]
        if later:
            parent = min(later, key=lambda u: position[u])
            tree_edges.append((node_of[v], node_of[parent]))
        else:
            roots.append(node_of[v])
    # Join the trees of different primal components into one tree.
    for a, b in zip(roots, roots[1:]):
        tree_edges.append((a, b))
    bag = {node_of[v]: bags[v] for v in order}
    nodes, tree_edges = _contract_redundant(nodes, tree_edges, bag)
    cover = {}
    for n in nodes:
        chosen = _min_cover(graph, bag[n], k)
        if chosen is None:
            chosen = _greedy_cover(graph, bag[n])
        cover[n] = frozenset(chosen)
    # Completeness leaves: one per blue node, attached to a bag containing
    # its neighbourhood (or anywhere for blue nodes without red neighbours).
    next_id = len(nodes)
    if not nodes:
        nodes.append(next_id)
        bag[next_id], cover[next_id] = frozenset(), frozenset()
        next_id += 1
    for e in graph.blue:
        members = graph.blue_neighbours[e]
        if any(e in cover[n] and members <= bag[n] for n in nodes):
            continue
        host = next((n for n in nodes if members <= bag[n]), None)
        if host is None:
            raise AssertionError("elimination bags must contain every neighbourhood")
        bag[next_id] = members
        cover[next_id] = frozenset([e])
        tree_edges.append((host, next_id))
        nodes.append(next_id)
        next_id += 1
    return TreeDecomp.build(nodes, tree_edges, bag, cover, nodes[0])


def _contract_redundant(nodes: list, tree_edges: list, bag: dict) -> tuple[list, list]:
    """Merge every tree-node into a neighbour whose bag contains its own bag."""
    nodes = list(nodes)
    edges = {frozenset(e) for e in tree_edges}
    changed = True
    while changed:
        changed = False
        for edge in sorted(edges, key=lambda e: sorted(e)):
            x, y = sorted(edge)
            if bag[y] <= bag[x]:
                keep, drop = x, y
            elif bag[x] <= bag[y]:
                keep, drop = y, x
            else:
                continue
            edges.discard(edge)
            edges = {frozenset(keep if n == drop else n for n in e) for e in edges}
            nodes.remove(drop)
            del bag[drop]
            changed = True
            break
    return nodes, [tuple(sorted(e)) for e in edges]


def _exact_ghd(graph: IncidenceGraph, k: int) -> TreeDecomp | None:
    if k < 1:
        return None
    reds = list(graph.red)
    adjacency = _primal_adjacency(graph)
    coverable: dict = {}

    def ok(bag: frozenset) -> bool:
        if bag not in coverable:
            coverable[bag] = _min_cover(graph, bag, k) is not None
        return coverable[bag]

    index = {v: n for n, v in enumerate(reds)}
    full = (1 << len(reds)) - 1
    # best[mask] = last vertex of a feasible elimination of exactly the vertices in mask
    reachable = {0: None}
    frontier = [0]
    for _ in range(len(reds)):
        nxt = []
        for mask in frontier:
            eliminated = frozenset(v for v in reds if mask >> index[v] & 1)
            for v in reds:
                bit = 1 << index[v]
                if mask & bit or (mask | bit) in reachable:
                    continue
                if ok(_elimination_bag(adjacency, v, eliminated)):
                    reachable[mask | bit] = (mask, v)
                    nxt.append(mask | bit)
        frontier = nxt
    if full not in reachable:
        return None
    order = []
    mask = full
    while mask:
        previous, v = reachable[mask]
        order.append(v)
        mask = previous
    order.reverse()
    return _decomposition_from_order(graph, order, k)


def _greedy_cover(graph: IncidenceGraph, bag: frozenset) -> tuple:
    remaining = set(bag)
    chosen = []
    while remaining:
        best = max(graph.blue, key=lambda e: (len(graph.blue_neighbours[e] & remaining),
                                              [-x if isinstance(x, int) else 0
                                               for x in id_key(e)[:2]]))
        chosen.append(best)
        remaining -= graph.blue_neighbours[best]
    return tuple(chosen)


def _greedy_ghd(graph: IncidenceGraph, k: int) -> TreeDecomp | None:
    adjacency = _primal_adjacency(graph)
    remaining = set(graph.red)
    order = []
    eliminated: set = set()
    while remaining:
        v = min(remaining, key=lambda u: (len(_elimination_bag(adjacency, u, frozenset(eliminated))),
                                          id_key(u)))
        order.append(v)
        eliminated.add(v)
        remaining.discard(v)
    decomposition = _decomposition_from_order(graph, order, len(graph.blue))
    return decomposition if width(decomposition) <= k else None


def _ehd_search(graph: IncidenceGraph, k: int, budget: int | None) -> TreeDecomp | None:
    """Grow reduced ehds in breadth-first order; every new tree-node brings a new blue node.

    Tree-nodes are expanded in creation order and the children of one node
    are added in ascending option order, so every rooted tree is generated
    once.  A node is closed once the search moves past it; a red node whose
    bags are all closed must already have all its blue neighbours placed.
    """
    if k < 1:
        return None
    blues = list(graph.blue)
    all_blue = frozenset(blues)
    options = [frozenset(c) for size in range(1, k + 1) for c in combinations(blues, size)]
    bag_of = {c: precise_bag(graph, c) for c in options}
    red_nbrs = graph.red_neighbours
    visited: set = set()
    steps = [0]

    def dead(covers: list, first_open: int, present_blue: frozenset,
             present_red: frozenset) -> bool:
        open_red = frozenset().union(*(bag_of[c] for c in covers[first_open:]))
        return any(not red_nbrs[v] <= present_blue for v in present_red - open_red)

    def grow(covers: list, parents: list, present_blue: frozenset, present_red: frozenset,
             current: int, last_option: int):
        if present_blue == all_blue:
            return covers, parents
        if budget is not None:
            steps[0] += 1
            if steps[0] > budget:
                return None
        state = (tuple(covers), tuple(parents), current, last_option)
        if state in visited:
            return None
        visited.add(state)
        for p in range(current, len(covers)):
            if p > current and dead(covers, p, present_blue, present_red):
                return None
            parent_cover = covers[p]
            parent_bag = bag_of[parent_cover]
            first = last_option + 1 if p == current else 0
            for n in range(first, len(options)):
                c = options[n]
                if c <= parent_cover or parent_cover <= c:
                    continue
                if not (c - present_blue):
                    continue
                if not (c & present_blue) <= parent_cover:
                    continue
                if not (bag_of[c] & present_red) <= parent_bag:
                    continue
                found = grow(covers + [c], parents + [p], present_blue | c,
                             present_red | bag_of[c], p, n)
                if found is not None:
                    return found
                if budget is not None and steps[0] > budget:
                    return None
        return None

    first = blues[0]
    for c in options:
        if first not in c:
            continue
        found = grow([c], [None], c, bag_of[c], 0, -1)
        if found is not None:
            covers, parents = found
            nodes = list(range(len(covers)))
            edges = [(i, p) for i, p in enumerate(parents) if p is not None]
            return TreeDecomp.build(nodes, edges, {i: bag_of[c] for i, c in enumerate(covers)},
                                    dict(enumerate(covers)), 0)
        if budget is not None and steps[0] > budget:
            return None
    return None


def exact_width(graph: IncidenceGraph, mode: str, config: Config = DEFAULT_CONFIG) -> int:
    """Smallest k for which the exact engine finds a decomposition."""
    for k in range(0, len(graph.blue) + 1):
        if search_width(graph, k, mode, EXACT, config) is not None:
            return k
    raise AssertionError("the single-node decomposition always has width |blue|")


# ---------------------------------------------------------------------------
# Exhaustive oracles (independent of the search engines)


def _all_trees(count: int) -> list[list[tuple]]:
    if count == 1:
        return [[]]
    if count == 2:
        return [[(0, 1)]]
    trees = []
    for code in product(range(count), repeat=count - 2):
        degree = [1] * count
        for x in code:
            degree[x] += 1
        edges = []
        seq = list(code)
        for x in seq:
            leaf = min(i for i in range(count) if degree[i] == 1)
            edges.append((leaf, x))
            degree[leaf] -= 1
            degree[x] -= 1
        u, w = [i for i in range(count) if degree[i] == 1]
        edges.append((u, w))
        trees.append(edges)
    return trees


def _subsets(items: list, max_size: int | None = None) -> list[frozenset]:
    top = len(items) if max_size is None else min(max_size, len(items))
    return [frozenset(c) for size in range(top + 1) for c in combinations(items, size)]


def brute_force_exists(graph: IncidenceGraph, k: int, mode: str,
                       max_nodes: int | None = None) -> bool:
    """Try every tree with at most ``max_nodes`` nodes and every bag/cover choice.

    Intended for tiny graphs only (it is exponential in every parameter).
    """
    max_nodes = max_nodes or max(1, len(graph.blue))
    covers = _subsets(list(graph.blue), k)
    if mode == EHD:
        labels = [(precise_bag(graph, c), c) for c in covers]
    else:
        labels = [(bag, c) for c in covers
                  for bag in _subsets(sorted(precise_bag(graph, c), key=id_key))]
    for count in range(1, max_nodes + 1):
        for edges in _all_trees(count):
            for choice in product(labels, repeat=count):
                candidate = TreeDecomp.build(range(count), edges,
                                             {i: choice[i][0] for i in range(count)},
                                             {i: choice[i][1] for i in range(count)})
                if validate(candidate, graph, mode).valid:
                    return True
    return False


# ---------------------------------------------------------------------------
# Binary monotone normal form


def normalize_binary_monotone(decomposition: TreeDecomp,
                              graph: IncidenceGraph) -> tuple[TreeDecomp, Hashable]:
    """Re-root at a widest node, pad parent covers, and split nodes with 3+ children."""
    report = validate(decomposition, graph, EHD)
    if not report.valid:
        raise InvalidDecomposition("; ".join(report.violations))
    root = min(decomposition.nodes,
               key=lambda t: (-len(decomposition.cover[t]), id_key(t)))
    kids = decomposition.children(root)
    cover = {t: set(decomposition.cover[t]) for t in decomposition.nodes}
    for t in reversed(decomposition.top_down(root)):
        for c in kids[t]:
            if len(cover[t]) < len(cover[c]):
                extra = sorted(cover[c] - cover[t], key=id_key)
                cover[t] |= set(extra[:len(cover[c]) - len(cover[t])])
    bag = {t: precise_bag(graph, cover[t]) for t in decomposition.nodes}
    nodes = list(decomposition.nodes)
    edges = []
    fresh = iter(fresh_ids(nodes, sum(max(0, len(v) - 2) for v in kids.values())))
    for t in decomposition.top_down(root):
        children = kids[t]
        if len(children) <= 2:
            edges.extend((t, c) for c in children)
            continue
        # t keeps children[0] and a chain of copies carries the others.
        copies = [next(fresh) for _ in range(len(children) - 2)]
        for copy in copies:
            nodes.append(copy)
            bag[copy] = bag[t]
            cover[copy] = set(cover[t])
        edges.append((t, children[0]))
        edges.append((t, copies[0]))
        for i, copy in enumerate(copies):
            edges.append((copy, children[i + 1]))
            if i + 1 < len(copies):
                edges.append((copy, copies[i + 1]))
        edges.append((copies[-1], children[-1]))
    result = TreeDecomp.build(nodes, edges, bag, cover, root)
    return result, root


def is_binary_monotone(decomposition: TreeDecomp, root) -> bool:
    kids = decomposition.children(root)
    return all(len(c) <= 2 for c in kids.values()) and all(
        len(decomposition.cover[t]) >= len(decomposition.cover[c])
        for t, cs in kids.items() for c in cs)


# ---------------------------------------------------------------------------
# Pumping: from a distinguishing ghd to a distinguishing ehd


HomCounter = Callable[[IncidenceGraph, IncidenceGraph], int]


def _default_counter(config: Config) -> HomCounter:
    from .homcount import count_homs_incidence

    def count(pattern, host):
        return count_homs_incidence(pattern, host, config)
    return count


def find_pump_count(pattern: IncidenceGraph, blue_node, red_set: Iterable, minimum: int,
                    first: IncidenceGraph, second: IncidenceGraph,
                    config: Config = DEFAULT_CONFIG, counter: HomCounter | None = None) -> int:
    """Least ``n >= minimum`` such that ``pattern + n*red_set`` still separates the hosts."""
    red_set = frozenset(red_set)
    if blue_node not in pattern.blue_neighbours:
        raise UnknownNode(f"unknown blue node {blue_node!r}")
    if not red_set <= pattern.blue_neighbours[blue_node]:
        raise ValueError("the pumped red set must lie inside the neighbourhood of the blue node")
    count = counter or _default_counter(config)
    if count(pattern, first) == count(pattern, second):
        raise ValueError("the pattern must distinguish the two hosts")
    for n in range(minimum, minimum + config.pump_window + 1):
        pumped = add_pumped_edges(pattern, red_set, n)
        if count(pumped, first) != count(pumped, second):
            return n
    raise SearchCapExceeded(
        f"no pump count in [{minimum}, {minimum + config.pump_window}] separates the hosts")


@dataclass
class PumpStep:
    """Record of one pumping step of :func:`ghd_to_ehd` (for inspection and tests)."""

    stage: int
    source: Hashable
    red_set: frozenset
    count: int
    new_blue: list


def ghd_to_ehd(pattern: IncidenceGraph, decomposition: TreeDecomp, first: IncidenceGraph,
               second: IncidenceGraph, config: Config = DEFAULT_CONFIG,
               counter: HomCounter | None = None,
               steps: list | None = None) -> tuple[IncidenceGraph, TreeDecomp]:
    """Pump ``pattern`` so that the transformed decomposition is an ehd.

    Stage 1 makes every cover precise; stage 2 makes every blue node's
    tree-nodes connected.  Pump counts are chosen so that the pattern keeps
    distinguishing ``first`` from ``second``.
    """
    report = validate(decomposition, pattern, GHD)
    if not report.valid:
        raise InvalidDecomposition("; ".join(report.violations))
    count = counter or _default_counter(config)
    if count(pattern, first) == count(pattern, second):
        raise ValueError("the pattern must distinguish the two hosts")
    log = steps if steps is not None else []

    # Stage 1: precise coverage.
    graph = pattern
    nbrs = pattern.blue_neighbours
    nodes = list(decomposition.nodes)
    tree_edges = list(decomposition.tree_edges)
    bag = {t: frozenset(decomposition.bag[t]) for t in nodes}
    cover = {t: set(decomposition.cover[t]) for t in nodes}
    pending: dict = {}
    for t in decomposition.nodes:
        for e in sorted(decomposition.cover[t], key=id_key):
            if not nbrs[e] <= bag[t]:
                s = nbrs[e] & bag[t]
                pending.setdefault(s, []).append((t, e))
    copies_of: dict = {}
    for s in sorted(pending, key=lambda x: sorted(map(id_key, x))):
        t0, e0 = pending[s][0]
        n = find_pump_count(graph, e0, s, 1, first, second, config, count)
        pumped = add_pumped_edges(graph, s, n)
        new_blue = pumped_blue_nodes(graph, pumped)
        graph = pumped
        copies_of[s] = new_blue
        log.append(PumpStep(1, e0, s, n, new_blue))
    for s, places in pending.items():
        for t, e in places:
            cover[t].discard(e)
    for s, places in pending.items():
        for t, e in places:
            cover[t].add(copies_of[s][0])
    for s in sorted(pending, key=lambda x: sorted(map(id_key, x))):
        copies = copies_of[s]
        if len(copies) < 2:
            continue
        anchor = min((t for t in nodes if copies[0] in cover[t]), key=id_key)
        for extra in copies[1:]:
            leaf = fresh_ids(nodes, 1)[0]
            nodes.append(leaf)
            bag[leaf] = s
            cover[leaf] = {extra}
            tree_edges.append((anchor, leaf))
    stage_one = TreeDecomp.build(nodes, tree_edges, bag, cover, decomposition.root)

    # Stage 2: connectedness for blue nodes.
    nbrs = graph.blue_neighbours
    for e in list(graph.blue):
        holders = {t for t in stage_one.nodes if e in cover[t]}
        components = _components_of(stage_one, holders)
        if len(components) < 2:
            continue
        components.sort(key=lambda comp: id_key(min(comp, key=id_key)))
        s = nbrs[e]
        n = find_pump_count(graph, e, s, len(components) - 1, first, second, config, count)
        pumped = add_pumped_edges(graph, s, n)
        new_blue = pumped_blue_nodes(graph, pumped)
        graph = pumped
        log.append(PumpStep(2, e, frozenset(s), n, new_blue))
        for i, comp in enumerate(components[1:], start=1):
            for t in comp:
                cover[t].discard(e)
                cover[t].add(new_blue[i - 1])
        anchor = min(components[0], key=id_key)
        for extra in new_blue[len(components) - 1:]:
            leaf = fresh_ids(nodes, 1)[0]
            nodes.append(leaf)
            bag[leaf] = frozenset(s)
            cover[leaf] = {extra}
            tree_edges.append((anchor, leaf))
    result = TreeDecomp.build(nodes, tree_edges, bag, cover, decomposition.root)
    return graph, result


def _components_of(decomposition: TreeDecomp, members: set) -> list[set]:
    adjacency = decomposition.adjacency
    remaining = set(members)
    components = []
    while remaining:
        start = min(remaining, key=id_key)
        comp = {start}
        stack = [start]
        while stack:
            t = stack.pop()
            for u in adjacency[t]:
                if u in remaining and u not in comp:
                    comp.add(u)
                    stack.append(u)
        remaining -= comp
        components.append(comp)
    return components


# ---------------------------------------------------------------------------
# Decomposition transforms for the hypergraph edits


def transform_for_edit(decomposition: TreeDecomp, hypergraph: Hypergraph,
                       op: Pump | LocalMerge) -> TreeDecomp:
    """Turn a ghd of ``hypergraph`` into a ghd of the edited hypergraph (same width)."""
    graph = to_incidence(hypergraph)
    if isinstance(op, Pump):
        members = graph.blue_neighbours.get(op.edge)
        if members is None:
            raise UnknownNode(f"unknown edge {op.edge!r}")
        target = next((t for t in decomposition.nodes
                       if op.edge in decomposition.cover[t] and members <= decomposition.bag[t]),
                      None)
        if target is None:
            raise InvalidDecomposition(f"no tree-node witnesses completeness for {op.edge!r}")
        bag = dict(decomposition.bag)
        bag[target] = bag[target] | {op.fresh_vertex}
        return TreeDecomp.build(decomposition.nodes, decomposition.tree_edges, bag,
                                decomposition.cover, decomposition.root)
    if isinstance(op, LocalMerge):
        project = merge_projection(op)
        bag = {t: {project(v) for v in decomposition.bag[t]} for t in decomposition.nodes}
        return TreeDecomp.build(decomposition.nodes, decomposition.tree_edges, bag,
                                decomposition.cover, decomposition.root)
    raise TypeError(f"unsupported operation {op!r}")
