"""Guarded two-sorted counting logic: syntax, semantics and normal form."""

from .formulas import (BLUE, RED, TOP, And, AtomE, EqBlue, EqRed, Exists,
                       Formula, Not, Top, conj, disj, exists_eq, exists_geq,
                       forall, guard_formula, guard_of, implies,
                       top_normal_form)
from .guards import EMPTY_GUARD, Guard
from .normal_form import to_normal_form
from .parser import parse_formula, render_formula
from .semantics import Evaluator, Interpretation, evaluate, satisfies
from .syntax import GCK, NGCK, SyntaxReport, check_syntax, is_ngc, split_guarded


def free_vars(formula: Formula) -> tuple[frozenset, frozenset]:
    """Free red and blue variable indices of ``formula``."""
    return formula.free_red, formula.free_blue


__all__ = [
    "BLUE", "RED", "TOP", "And", "AtomE", "EqBlue", "EqRed", "Exists", "Formula",
    "Not", "Top", "conj", "disj", "exists_eq", "exists_geq", "forall",
    "guard_formula", "guard_of", "implies", "top_normal_form", "EMPTY_GUARD",
    "Guard", "to_normal_form", "parse_formula", "render_formula", "Evaluator",
    "Interpretation", "evaluate", "satisfies", "GCK", "NGCK", "SyntaxReport",
    "check_syntax", "is_ngc", "split_guarded", "free_vars",
]
