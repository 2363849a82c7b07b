"""Translation of GC^k formulas into the NGC^k normal form.

``to_normal_form(phi, f, k)`` returns ``phi_f`` such that ``(Gamma_f & phi_f)``
is in NGC^k, has the same free variables as ``(Gamma_f & phi)`` and is
equivalent to it.  The recursion follows the structure of ``phi``:
atoms stay unchanged, negation and conjunction recurse with restricted
guards, and quantifiers re-guard their body.
"""

from __future__ import annotations

from ..config import DEFAULT_CONFIG
from ..errors import NotInGC
from .formulas import (RED, And, AtomE, EqBlue, EqRed, Exists, Formula, Not,
                       Top, guard_formula, top_normal_form)
from .guards import Guard
from .syntax import GCK, check_syntax


def to_normal_form(formula: Formula, guard: Guard, k: int,
                   red_index_max: int = DEFAULT_CONFIG.red_index_max,
                   validate: bool = True) -> Formula:
    guard = guard if isinstance(guard, Guard) else Guard(guard)
    if validate:
        report = check_syntax(formula, k, GCK, red_index_max)
        if not report.valid:
            raise NotInGC("; ".join(report.violations))
        if guard.domain != formula.free_red:
            raise NotInGC(
                f"guard domain {sorted(guard.domain)} must equal the free red variables "
                f"{sorted(formula.free_red)}")
    return _Translator().run(formula, guard)


class _Translator:
    def __init__(self):
        self.memo: dict = {}
        self.keep: list = []

    def run(self, node: Formula, guard: Guard) -> Formula:
        key = (id(node), guard)
        hit = self.memo.get(key)
        if hit is not None:
            return hit
        self.keep.append(node)
        result = self._translate(node, guard)
        self.memo[key] = result
        return result

    def _translate(self, node: Formula, guard: Guard) -> Formula:
        if isinstance(node, Top):
            return top_normal_form()
        if isinstance(node, (AtomE, EqBlue, EqRed)):
            return node
        if isinstance(node, Not):
            return Not(self.run(node.inner, guard))
        if isinstance(node, And):
            return And(self.run(node.left, guard.restrict(node.left.free_red)),
                       self.run(node.right, guard.restrict(node.right.free_red)))
        if isinstance(node, Exists):
            inner = node.guard
            if node.sort == RED:
                new_guard = guard.union(inner)
            else:
                quantified = set(node.indices)
                image = inner.image
                new_guard = Guard(
                    (i, inner[i] if (guard[i] in quantified or guard[i] not in image)
                     else guard[i])
                    for i in inner)
            body = self.run(node.body, new_guard)
            if inner:
                body = And(guard_formula(inner), body)
            return Exists(node.sort, node.count, node.indices, new_guard, body)
        raise TypeError(f"not a formula: {node!r}")
