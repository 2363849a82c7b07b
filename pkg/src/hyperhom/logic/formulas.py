"""Abstract syntax of the two-sorted guarded counting logic.

Variables are referred to by index: ``v_i`` for red variables (``i >= 1``)
and ``e_j`` for blue variables (``1 <= j <= k``).  A counting quantifier
stores its guard function separately from its body, i.e. the node
``Exists(sort, n, indices, g, psi)`` stands for
``E>=n(indices).(Gamma_g & psi)``.

Nodes are immutable, hash in constant time and cache their free variables.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence

from .guards import EMPTY_GUARD, Guard

RED = "red"
BLUE = "blue"


class Formula:
    """Base class.  Subclasses set ``free_red``, ``free_blue`` and ``_hash``."""

    __slots__ = ()

    def __eq__(self, other):
        if self is other:
            return True
        if type(self) is not type(other) or hash(self) != hash(other):
            return False
        return self._fields() == other._fields()

    def __hash__(self):
        return self._hash

    def _fields(self) -> tuple:
        raise NotImplementedError

    @property
    def free(self) -> tuple[frozenset, frozenset]:
        return self.free_red, self.free_blue

    def __str__(self) -> str:
        from .parser import render_formula
        return render_formula(self)


def _init(node, fields_tuple, free_red, free_blue):
    object.__setattr__(node, "free_red", frozenset(free_red))
    object.__setattr__(node, "free_blue", frozenset(free_blue))
    object.__setattr__(node, "_hash", hash((type(node).__name__,) + fields_tuple))


@dataclass(frozen=True, eq=False)
class Top(Formula):
    free_red: frozenset = field(init=False, repr=False)
    free_blue: frozenset = field(init=False, repr=False)
    _hash: int = field(init=False, repr=False)

    def __post_init__(self):
        _init(self, (), (), ())

    def _fields(self):
        return ()


@dataclass(frozen=True, eq=False)
class AtomE(Formula):
    """``E(e_blue, v_red)``: the blue variable is adjacent to the red variable."""

    blue: int
    red: int
    free_red: frozenset = field(init=False, repr=False)
    free_blue: frozenset = field(init=False, repr=False)
    _hash: int = field(init=False, repr=False)

    def __post_init__(self):
        _init(self, (self.blue, self.red), (self.red,), (self.blue,))

    def _fields(self):
        return (self.blue, self.red)


@dataclass(frozen=True, eq=False)
class EqBlue(Formula):
    left: int
    right: int
    free_red: frozenset = field(init=False, repr=False)
    free_blue: frozenset = field(init=False, repr=False)
    _hash: int = field(init=False, repr=False)

    def __post_init__(self):
        _init(self, (self.left, self.right), (), (self.left, self.right))

    def _fields(self):
        return (self.left, self.right)


@dataclass(frozen=True, eq=False)
class EqRed(Formula):
    left: int
    right: int
    free_red: frozenset = field(init=False, repr=False)
    free_blue: frozenset = field(init=False, repr=False)
    _hash: int = field(init=False, repr=False)

    def __post_init__(self):
        _init(self, (self.left, self.right), (self.left, self.right), ())

    def _fields(self):
        return (self.left, self.right)


@dataclass(frozen=True, eq=False)
class Not(Formula):
    inner: Formula
    free_red: frozenset = field(init=False, repr=False)
    free_blue: frozenset = field(init=False, repr=False)
    _hash: int = field(init=False, repr=False)

    def __post_init__(self):
        _init(self, (hash(self.inner),), self.inner.free_red, self.inner.free_blue)

    def _fields(self):
        return (self.inner,)


@dataclass(frozen=True, eq=False)
class And(Formula):
    left: Formula
    right: Formula
    free_red: frozenset = field(init=False, repr=False)
    free_blue: frozenset = field(init=False, repr=False)
    _hash: int = field(init=False, repr=False)

    def __post_init__(self):
        _init(self, (hash(self.left), hash(self.right)),
              self.left.free_red | self.right.free_red,
              self.left.free_blue | self.right.free_blue)

    def _fields(self):
        return (self.left, self.right)


@dataclass(frozen=True, eq=False)
class Exists(Formula):
    """``E>=count(indices).(Gamma_guard & body)`` over red or blue tuples."""

    sort: str
    count: int
    indices: tuple
    guard: Guard
    body: Formula
    free_red: frozenset = field(init=False, repr=False)
    free_blue: frozenset = field(init=False, repr=False)
    _hash: int = field(init=False, repr=False)

    def __post_init__(self):
        if self.sort not in (RED, BLUE):
            raise ValueError(f"unknown sort {self.sort!r}")
        object.__setattr__(self, "indices", tuple(self.indices))
        if not isinstance(self.guard, Guard):
            object.__setattr__(self, "guard", Guard(self.guard))
        red = set(self.guard.domain) | self.body.free_red
        blue = set(self.guard.image) | self.body.free_blue
        if self.sort == RED:
            red -= set(self.indices)
        else:
            blue -= set(self.indices)
        _init(self, (self.sort, self.count, self.indices, hash(self.guard),
                     hash(self.body)), red, blue)

    def _fields(self):
        return (self.sort, self.count, self.indices, self.guard, self.body)

    @property
    def scope_free_red(self) -> frozenset:
        """Free red variables of ``(Gamma_guard & body)``."""
        return self.guard.domain | self.body.free_red

    @property
    def scope_free_blue(self) -> frozenset:
        return self.guard.image | self.body.free_blue


TOP = Top()


# ---------------------------------------------------------------------------
# Builders for guard formulas and the usual shorthands.


def guard_formula(guard: Guard) -> Formula:
    """Right-associated conjunction of ``E(e_g(i), v_i)`` in ascending ``i``."""
    atoms = [AtomE(j, i) for i, j in guard.items_sorted]
    if not atoms:
        return TOP
    result = atoms[-1]
    for atom in reversed(atoms[:-1]):
        result = And(atom, result)
    return result


def guard_of(formula: Formula) -> Guard | None:
    """Inverse of :func:`guard_formula` on guard-shaped formulas.

    Accepts ``T`` or any ``&``-tree of ``E`` atoms with pairwise distinct
    red indices; returns ``None`` otherwise.
    """
    if isinstance(formula, Top):
        return EMPTY_GUARD
    atoms: list[AtomE] = []
    stack = [formula]
    while stack:
        node = stack.pop()
        if isinstance(node, AtomE):
            atoms.append(node)
        elif isinstance(node, And):
            stack.append(node.right)
            stack.append(node.left)
        else:
            return None
    entries: dict[int, int] = {}
    for atom in atoms:
        if atom.red in entries:
            return None
        entries[atom.red] = atom.blue
    return Guard(entries)


def balanced(items: Sequence[Formula], combine) -> Formula:
    if len(items) == 1:
        return items[0]
    middle = len(items) // 2
    return combine(balanced(items[:middle], combine), balanced(items[middle:], combine))


def conj(items: Iterable[Formula]) -> Formula:
    """Balanced conjunction of a non-empty list."""
    items = list(items)
    if not items:
        raise ValueError("empty conjunction")
    return balanced(items, And)


def disj(items: Iterable[Formula]) -> Formula:
    """Balanced disjunction, expanded as ``!(!a & !b)``."""
    items = list(items)
    if not items:
        raise ValueError("empty disjunction")
    return balanced(items, lambda a, b: Not(And(Not(a), Not(b))))


def implies(premise: Formula, conclusion: Formula) -> Formula:
    return disj([Not(premise), conclusion])


def exists_geq(sort: str, count: int, indices: Iterable[int], guard: Guard,
               body: Formula) -> Exists:
    return Exists(sort, count, tuple(sorted(indices)), guard, body)


def exists_eq(sort: str, count: int, indices: Iterable[int], guard: Guard,
              body: Formula) -> Formula:
    """Exactly ``count`` tuples: ``E>=n ... & !E>=n+1 ...`` (``!E>=1`` for 0)."""
    indices = tuple(sorted(indices))
    upper = Exists(sort, count + 1, indices, guard, body)
    if count == 0:
        return Not(Exists(sort, 1, indices, guard, body))
    return And(Exists(sort, count, indices, guard, body), Not(upper))


def forall(sort: str, indices: Iterable[int], guard: Guard, body: Formula) -> Formula:
    """``forall x.(Gamma_g -> body)`` written as ``!E>=1 x.(Gamma_g & !body)``."""
    return Not(Exists(sort, 1, tuple(sorted(indices)), guard, Not(body)))


def top_normal_form() -> Formula:
    """An NGC body equivalent to ``T``: ``!E>=1(e1).(T & !e1=e1)``."""
    return Not(Exists(BLUE, 1, (1,), EMPTY_GUARD, Not(EqBlue(1, 1))))


def formula_size(formula: Formula) -> int:
    """Number of nodes of the formula tree (shared subtrees counted once)."""
    seen: set[int] = set()
    stack = [formula]
    while stack:
        node = stack.pop()
        if id(node) in seen:
            continue
        seen.add(id(node))
        stack.extend(children(node))
    return len(seen)


def children(node: Formula) -> list[Formula]:
    if isinstance(node, Not):
        return [node.inner]
    if isinstance(node, And):
        return [node.left, node.right]
    if isinstance(node, Exists):
        return [node.body]
    return []


def max_indices(formula: Formula) -> tuple[int, int]:
    """Largest red and blue index mentioned anywhere (0 if none)."""
    red = blue = 0
    seen: set[int] = set()
    stack = [formula]
    while stack:
        node = stack.pop()
        if id(node) in seen:
            continue
        seen.add(id(node))
        if isinstance(node, AtomE):
            red, blue = max(red, node.red), max(blue, node.blue)
        elif isinstance(node, EqBlue):
            blue = max(blue, node.left, node.right)
        elif isinstance(node, EqRed):
            red = max(red, node.left, node.right)
        elif isinstance(node, Exists):
            red = max([red, *node.guard.domain])
            blue = max([blue, *node.guard.image])
            if node.sort == RED:
                red = max([red, *node.indices])
            else:
                blue = max([blue, *node.indices])
        stack.extend(children(node))
    return red, blue
