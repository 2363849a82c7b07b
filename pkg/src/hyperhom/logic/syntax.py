"""Well-formedness checks for GC^k and membership checks for NGC^k."""

from __future__ import annotations

from dataclasses import dataclass, field

from ..config import DEFAULT_CONFIG
from .formulas import (RED, And, AtomE, EqBlue, EqRed, Exists, Formula, Not,
                       Top, guard_of)
from .guards import Guard
from .parser import render_formula

GCK = "gck"
NGCK = "ngck"


@dataclass
class SyntaxReport:
    mode: str
    violations: list[str] = field(default_factory=list)

    @property
    def valid(self) -> bool:
        return not self.violations

    def __bool__(self) -> bool:
        return self.valid

    def to_json(self) -> dict:
        return {"mode": self.mode, "valid": self.valid, "violations": list(self.violations)}


def _short(node: Formula, limit: int = 60) -> str:
    text = render_formula(node)
    return text if len(text) <= limit else text[:limit - 3] + "..."


class _Where:
    """Renders the node only when a violation message is actually built."""

    def __init__(self, node: Formula):
        self.node = node

    def __format__(self, spec: str) -> str:
        return _short(self.node)


def _check_gc(node: Formula, k: int, red_max: int, out: list[str], seen: set):
    if id(node) in seen:
        return
    seen.add(id(node))

    def red_ok(i):
        return isinstance(i, int) and 1 <= i <= red_max

    def blue_ok(j):
        return isinstance(j, int) and 1 <= j <= k

    if isinstance(node, Top):
        return
    if isinstance(node, AtomE):
        if not blue_ok(node.blue):
            out.append(f"blue index e{node.blue} outside [1,{k}]")
        if not red_ok(node.red):
            out.append(f"red index v{node.red} outside [1,{red_max}]")
        return
    if isinstance(node, EqBlue):
        for j in (node.left, node.right):
            if not blue_ok(j):
                out.append(f"blue index e{j} outside [1,{k}]")
        return
    if isinstance(node, EqRed):
        for i in (node.left, node.right):
            if not red_ok(i):
                out.append(f"red index v{i} outside [1,{red_max}]")
        return
    if isinstance(node, Not):
        _check_gc(node.inner, k, red_max, out, seen)
        return
    if isinstance(node, And):
        _check_gc(node.left, k, red_max, out, seen)
        _check_gc(node.right, k, red_max, out, seen)
        return
    if isinstance(node, Exists):
        where = _Where(node)
        if node.count < 1:
            out.append(f"quantifier count must be >= 1 in {where}")
        if not node.indices:
            out.append(f"quantifier without variables in {where}")
        if any(a >= b for a, b in zip(node.indices, node.indices[1:])):
            out.append(f"quantified indices not strictly ascending in {where}")
        for i, j in node.guard.items_sorted:
            if not red_ok(i):
                out.append(f"guard index v{i} outside [1,{red_max}] in {where}")
            if not blue_ok(j):
                out.append(f"guard value e{j} outside [1,{k}] in {where}")
        if node.guard.domain != node.body.free_red:
            out.append(f"guard domain {sorted(node.guard.domain)} differs from free red "
                       f"variables {sorted(node.body.free_red)} of the body in {where}")
        scope = node.scope_free_red if node.sort == RED else node.scope_free_blue
        for i in node.indices:
            if node.sort == RED and not red_ok(i):
                out.append(f"red index v{i} outside [1,{red_max}] in {where}")
            if node.sort != RED and not blue_ok(i):
                out.append(f"blue index e{i} outside [1,{k}] in {where}")
            if i not in scope:
                letter = "v" if node.sort == RED else "e"
                out.append(f"quantified variable {letter}{i} is not free in the scope of {where}")
        _check_gc(node.body, k, red_max, out, seen)
        return
    out.append(f"unknown node {node!r}")


def _check_ngc(guard: Guard, node: Formula, out: list[str], seen: set | None = None):
    seen = set() if seen is None else seen
    key = (id(node), guard)
    if key in seen:
        return
    seen.add(key)
    where = _Where(node)
    if guard.domain != node.free_red:
        out.append(f"guard domain {sorted(guard.domain)} differs from free red variables "
                   f"{sorted(node.free_red)} of {where}")
        return
    if isinstance(node, Top):
        out.append("T is not admitted as a body; use the normal form of T")
        return
    if isinstance(node, (AtomE, EqBlue, EqRed)):
        return  # rules 1-3: only the domain condition checked above
    if isinstance(node, Not):
        _check_ngc(guard, node.inner, out, seen)  # rule 4
        return
    if isinstance(node, And):
        # rule 5 with g1, g2 the restrictions of g (compatible by construction)
        _check_ngc(guard.restrict(node.left.free_red), node.left, out, seen)
        _check_ngc(guard.restrict(node.right.free_red), node.right, out, seen)
        return
    if isinstance(node, Exists):
        inner = node.guard
        if node.sort == RED:
            if not set(node.indices) <= inner.domain:
                out.append(f"rule 6: quantified red variables must be guarded in {where}")
            expected = inner.without(node.indices)
            if guard != expected:
                out.append(f"rule 6: outer guard {guard!r} must equal {expected!r} in {where}")
        else:
            if not set(node.indices) <= node.scope_free_blue:
                out.append(f"rule 7: quantified blue variables must be free in {where}")
            if guard.domain != inner.domain:
                out.append(f"rule 7: guard domains differ in {where}")
            else:
                image = inner.image
                for i, j in guard.items_sorted:
                    if not (j == inner[i] or j in node.indices or j not in image):
                        out.append(f"rule 7: guard change v{i}: e{inner[i]} -> e{j} "
                                   f"not permitted in {where}")
        _check_ngc(inner, node.body, out, seen)
        return
    out.append(f"unknown node {node!r}")


def split_guarded(formula: Formula) -> tuple[Guard, Formula] | None:
    """Split ``(Gamma_g & psi)`` into ``(g, psi)``; ``None`` if not shaped so."""
    if not isinstance(formula, And):
        return None
    guard = guard_of(formula.left)
    if guard is None:
        return None
    return guard, formula.right


def check_syntax(formula: Formula, k: int, mode: str = GCK,
                 red_index_max: int = DEFAULT_CONFIG.red_index_max) -> SyntaxReport:
    report = SyntaxReport(mode)
    _check_gc(formula, k, red_index_max, report.violations, set())
    if mode == GCK:
        return report
    if mode != NGCK:
        raise ValueError(f"unknown mode {mode!r}")
    split = split_guarded(formula)
    if split is None:
        halves = None
        if isinstance(formula, And):
            halves = (split_guarded(formula.left), split_guarded(formula.right))
        if halves and halves[0] and halves[1]:
            g1, g2 = halves[0][0], halves[1][0]
            conflicts = g1.conflicts(g2)
            if conflicts:
                report.violations.append(
                    f"rule 5: guards {g1!r} and {g2!r} are incompatible on red "
                    f"indices {conflicts}")
                return report
        report.violations.append("formula is not of the shape (Gamma_g & psi)")
        return report
    guard, body = split
    _check_ngc(guard, body, report.violations)
    return report


def is_ngc(formula: Formula, k: int, red_index_max: int = DEFAULT_CONFIG.red_index_max) -> bool:
    return check_syntax(formula, k, NGCK, red_index_max).valid
