"""Structured d-DNNF pairs to SDDs over a vtree with auxiliary variables."""

from .circuit import Circuit, CircuitBuilder, Gate
from .errors import (CapExceeded, CircuitError, InputError, ParseError, PropertyViolation,
                     StructuralError)
from .formats import parse_circuit, parse_vtree, serialize_circuit, serialize_vtree
from .hwb import build_hwb, hwb_value, separation_experiment
from .oracle import TruthTable, count_subfunctions, equivalent, model_count, truth_table
from .simulation import node_map, simulate, two_var_sdd, verify_lemma2, verify_node_set_props
from .transforms import make_simple, node_sets, prepare, restrict, smooth
from .validators import check, check_sdd
from .vtree import Vtree, modify, normalize, prune, shell

__version__ = "0.1.0"

__all__ = [
    "CapExceeded", "Circuit", "CircuitBuilder", "CircuitError", "Gate", "InputError",
    "ParseError", "PropertyViolation", "StructuralError", "TruthTable", "Vtree",
    "build_hwb", "check", "check_sdd", "count_subfunctions", "equivalent", "hwb_value",
    "make_simple", "model_count", "modify", "node_map", "node_sets", "normalize",
    "parse_circuit", "parse_vtree", "prepare", "prune", "restrict", "separation_experiment",
    "serialize_circuit", "serialize_vtree", "shell", "simulate", "smooth", "truth_table",
    "two_var_sdd", "verify_lemma2", "verify_node_set_props",
]
