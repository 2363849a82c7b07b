"""Guard functions: finite partial maps from red indices to blue indices.

The same type doubles as the generic "partial function on labels" used by
the labeled-graph calculus (guards, transitions, restrictions).
"""

from __future__ import annotations

from typing import Iterable, Iterator, Mapping


class Guard(Mapping[int, int]):
    """Immutable, hashable partial map ``red index -> blue index``."""

    __slots__ = ("_items", "_map", "_hash")

    def __init__(self, entries: Mapping[int, int] | Iterable[tuple[int, int]] = ()):
        pairs = dict(entries.items() if isinstance(entries, Mapping) else entries)
        items = tuple(sorted(pairs.items()))
        for i, j in items:
            if not isinstance(i, int) or not isinstance(j, int):
                raise TypeError("guard entries must be integers")
        object.__setattr__(self, "_items", items)
        object.__setattr__(self, "_map", dict(items))
        object.__setattr__(self, "_hash", hash(items))

    def __setattr__(self, name, value):
        raise AttributeError("Guard is immutable")

    def __getitem__(self, key: int) -> int:
        return self._map[key]

    def __contains__(self, key) -> bool:
        return key in self._map

    def get(self, key, default=None):
        return self._map.get(key, default)

    def __iter__(self) -> Iterator[int]:
        return (i for i, _ in self._items)

    def __len__(self) -> int:
        return len(self._items)

    def __hash__(self) -> int:
        return self._hash

    def __eq__(self, other) -> bool:
        if isinstance(other, Guard):
            return self._items == other._items
        if isinstance(other, Mapping):
            return self._map == dict(other)
        return NotImplemented

    def __repr__(self) -> str:
        inner = ", ".join(f"{i}->{j}" for i, j in self._items)
        return f"Guard({{{inner}}})"

    @property
    def items_sorted(self) -> tuple:
        return self._items

    @property
    def domain(self) -> frozenset:
        return frozenset(self._map)

    @property
    def image(self) -> frozenset:
        return frozenset(self._map.values())

    def restrict(self, indices: Iterable[int]) -> "Guard":
        keep = set(indices)
        return Guard((i, j) for i, j in self._items if i in keep)

    def without(self, indices: Iterable[int]) -> "Guard":
        drop = set(indices)
        return Guard((i, j) for i, j in self._items if i not in drop)

    def union(self, other: Mapping[int, int]) -> "Guard":
        """``self`` u ``other`` where ``self`` takes precedence on shared indices."""
        merged = dict(other)
        merged.update(self._map)
        return Guard(merged)

    def compatible(self, other: Mapping[int, int]) -> bool:
        return all(other[i] == j for i, j in self._items if i in other)

    def conflicts(self, other: Mapping[int, int]) -> list[int]:
        return [i for i, j in self._items if i in other and other[i] != j]

    def to_json(self) -> dict:
        return {str(i): j for i, j in self._items}

    @classmethod
    def from_json(cls, data: Mapping) -> "Guard":
        return cls((int(i), int(j)) for i, j in data.items())


EMPTY_GUARD = Guard()
