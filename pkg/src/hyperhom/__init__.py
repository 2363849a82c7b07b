"""Homomorphism counts, guarded counting logic and entangled hypertree decompositions."""

from .bridge import (Bounds, SizeParams, crosscheck_main_theorem, distinguish_by_ehw,
                     enumerate_segmentations, formula_from_cert, quantum_from_formula)
from .config import Config, load_config
from .core_model import Hypergraph, IncidenceGraph, to_incidence
from .decomp import TreeDecomp, ghd_to_ehd, search_width, validate
from .homcount import count_homs_hypergraph, count_homs_incidence, count_homs_labeled
from .labeled import LabeledGraph, cert_to_ehd, ehd_to_cert, eval_cert
from .logic import check_syntax, evaluate, parse_formula, to_normal_form
from .quantum import QuantumGraph, normalize_indicator, qhom

__version__ = "0.1.0"

__all__ = [
    "Bounds", "SizeParams", "crosscheck_main_theorem", "distinguish_by_ehw",
    "enumerate_segmentations", "formula_from_cert", "quantum_from_formula", "Config",
    "load_config", "Hypergraph", "IncidenceGraph", "to_incidence", "TreeDecomp", "ghd_to_ehd",
    "search_width", "validate", "count_homs_hypergraph", "count_homs_incidence",
    "count_homs_labeled", "LabeledGraph", "cert_to_ehd", "ehd_to_cert", "eval_cert",
    "check_syntax", "evaluate", "parse_formula", "to_normal_form", "QuantumGraph",
    "normalize_indicator", "qhom",
]
