"""Exception types shared by all modules.

The command line maps every subclass of :class:`HyperhomError` to exit
code 1 and prints the class name, so the names are part of the interface.
"""

from __future__ import annotations


class HyperhomError(Exception):
    """Base class for domain errors."""


class InvalidGraph(HyperhomError):
    """An incidence graph or hypergraph violates its structural invariants."""


class UnknownNode(HyperhomError):
    """A referenced node id does not exist in the graph."""


class CapExceeded(HyperhomError):
    """A desk-scale size cap was exceeded."""


class SearchCapExceeded(CapExceeded):
    """A bounded numeric search ran past its window."""


class InvalidDecomposition(HyperhomError):
    """A tree decomposition is structurally malformed or fails validation."""


class FormulaSyntaxError(HyperhomError):
    """Formula text could not be parsed."""

    def __init__(self, message: str, position: int):
        super().__init__(f"{message} at position {position}")
        self.position = position


class NotInGC(HyperhomError):
    """A formula is not a well-formed GC^k formula."""


class NotInNGC(HyperhomError):
    """A formula is not in the NGC^k normal form."""


class UnassignedFreeVariable(HyperhomError):
    """Evaluation was requested without assigning every free variable."""


class InvalidLabeling(HyperhomError):
    """Label maps of a labeled graph are inconsistent."""


class NotATransition(HyperhomError):
    """A guard function is not a transition for the current guards."""


class CertificateError(HyperhomError):
    """A derivation certificate violates one of the calculus rules."""

    def __init__(self, rule: int, message: str):
        super().__init__(f"rule {rule}: {message}")
        self.rule = rule


class IncompatibleQuantumGraph(HyperhomError):
    """Components of a quantum graph do not share label domains and guards."""


class OverlappingIndicatorSets(HyperhomError):
    """The sets X and Y of an indicator normalization intersect."""


class SizeParamsViolation(HyperhomError):
    """A host graph does not meet the size parameters of a compiled formula."""


class InputError(HyperhomError):
    """An input file cannot be read or decoded."""


class CrossCheckFailed(HyperhomError):
    """An assertion of the cross-check did not hold."""
