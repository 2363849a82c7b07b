"""Text syntax for formulas.

Grammar (whitespace is insignificant)::

    F ::= T | E(e<j>,v<i>) | e<j>=e<j'> | v<i>=v<i'> | !F | (F & F)
        | E>=<n>(<vars>).(G & F)

where ``<vars>`` is a comma separated list of variables of one sort in
ascending index order and ``G`` is a guard conjunction: ``T`` or a
``&``-tree of ``E`` atoms whose red indices are pairwise distinct.
"""

from __future__ import annotations

from .formulas import (BLUE, RED, And, AtomE, EqBlue, EqRed, Exists, Formula,
                       Not, Top, TOP, guard_formula, guard_of)
from ..errors import FormulaSyntaxError


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.pos = 0

    def skip(self):
        while self.pos < len(self.text) and self.text[self.pos].isspace():
            self.pos += 1

    def peek(self, literal: str) -> bool:
        self.skip()
        return self.text.startswith(literal, self.pos)

    def expect(self, literal: str):
        self.skip()
        if not self.text.startswith(literal, self.pos):
            found = self.text[self.pos:self.pos + 8] or "end of input"
            raise FormulaSyntaxError(f"expected {literal!r}, found {found!r}", self.pos)
        self.pos += len(literal)

    def number(self) -> int:
        self.skip()
        start = self.pos
        while self.pos < len(self.text) and self.text[self.pos].isdigit():
            self.pos += 1
        if start == self.pos:
            raise FormulaSyntaxError("expected a number", start)
        return int(self.text[start:self.pos])

    def variable(self) -> tuple[str, int, int]:
        self.skip()
        start = self.pos
        if self.peek("v"):
            self.pos += 1
            return RED, self.number(), start
        if self.peek("e"):
            self.pos += 1
            return BLUE, self.number(), start
        raise FormulaSyntaxError("expected a variable", start)

    def formula(self) -> Formula:
        self.skip()
        start = self.pos
        if self.peek("!"):
            self.pos += 1
            return Not(self.formula())
        if self.peek("E>="):
            return self.quantifier()
        if self.peek("E("):
            self.pos += 2
            sort, j, at = self.variable()
            if sort != BLUE:
                raise FormulaSyntaxError("first argument of E must be blue", at)
            self.expect(",")
            sort, i, at = self.variable()
            if sort != RED:
                raise FormulaSyntaxError("second argument of E must be red", at)
            self.expect(")")
            return AtomE(j, i)
        if self.peek("T"):
            self.pos += 1
            return TOP
        if self.peek("("):
            self.pos += 1
            left = self.formula()
            self.expect("&")
            right = self.formula()
            self.expect(")")
            return And(left, right)
        if self.peek("v") or self.peek("e"):
            sort, a, _ = self.variable()
            self.expect("=")
            sort2, b, at = self.variable()
            if sort2 != sort:
                raise FormulaSyntaxError("equality between different sorts", at)
            return EqRed(a, b) if sort == RED else EqBlue(a, b)
        raise FormulaSyntaxError("unexpected input", start)

    def quantifier(self) -> Formula:
        self.expect("E>=")
        count_at = self.pos
        count = self.number()
        if count < 1:
            raise FormulaSyntaxError("quantifier count must be at least 1", count_at)
        self.expect("(")
        variables = [self.variable()]
        while self.peek(","):
            self.pos += 1
            variables.append(self.variable())
        self.expect(")")
        self.expect(".")
        sorts = {v[0] for v in variables}
        if len(sorts) != 1:
            raise FormulaSyntaxError("quantified variables must share one sort",
                                     variables[0][2])
        indices = [v[1] for v in variables]
        if any(a >= b for a, b in zip(indices, indices[1:])):
            raise FormulaSyntaxError("quantified indices must be strictly ascending",
                                     variables[0][2])
        self.expect("(")
        guard_at = self.pos
        guard_part = self.formula()
        self.expect("&")
        body = self.formula()
        self.expect(")")
        guard = guard_of(guard_part)
        if guard is None:
            raise FormulaSyntaxError(
                "first conjunct of a quantifier body must be a guard conjunction",
                guard_at)
        return Exists(sorts.pop(), count, tuple(indices), guard, body)


def parse_formula(text: str) -> Formula:
    parser = _Parser(text)
    result = parser.formula()
    parser.skip()
    if parser.pos != len(text):
        raise FormulaSyntaxError("trailing input", parser.pos)
    return result


def render_formula(formula: Formula) -> str:
    parts: list[str] = []
    _render(formula, parts)
    return "".join(parts)


def _render(node: Formula, out: list[str]):
    if isinstance(node, Top):
        out.append("T")
    elif isinstance(node, AtomE):
        out.append(f"E(e{node.blue},v{node.red})")
    elif isinstance(node, EqBlue):
        out.append(f"e{node.left}=e{node.right}")
    elif isinstance(node, EqRed):
        out.append(f"v{node.left}=v{node.right}")
    elif isinstance(node, Not):
        out.append("!")
        _render(node.inner, out)
    elif isinstance(node, And):
        out.append("(")
        _render(node.left, out)
        out.append(" & ")
        _render(node.right, out)
        out.append(")")
    elif isinstance(node, Exists):
        letter = "v" if node.sort == RED else "e"
        names = ",".join(f"{letter}{i}" for i in node.indices)
        out.append(f"E>={node.count}({names}).(")
        _render(guard_formula(node.guard), out)
        out.append(" & ")
        _render(node.body, out)
        out.append(")")
    else:
        raise TypeError(f"not a formula: {node!r}")
