"""Symbolic equivalence checking of parameterised quantum circuits.

Circuits with symbolic rotation angles are represented as tensor
decision diagrams whose edge weights are canonical trigonometric
polynomials (themselves stored as decision diagrams), so equivalence —
exact or up to a global phase — is decided without instantiating the
parameters.
"""

from ._kernels import USING_COMPILED
from .checker import (CheckError, CheckReport, CheckTimeout, Verdict, check,
                      check_alternate, check_construct, confirm_by_sampling)
from .circuit import (Gate, PQC, ParseError, adjoint_gate, lower_gate,
                      pair_compatible, param_profile, parse_pqc, print_pqc)
from .oracle import (BenchSpec, generate, generate_text, inject_errors,
                     rewrite_equivalent, simulate)
from .params import AngleExpr, ParamSymbol, ParamTable
from .stdd import STDD, IndexOrder, StddManager, TensorIndex
from .trdd import TrRef, TrddManager
from .trigpoly import TrigPoly, common_factor, expand_cos, expand_sin

__version__ = "0.1.0"

__all__ = [
    "AngleExpr", "BenchSpec", "CheckError", "CheckReport", "CheckTimeout",
    "Gate", "IndexOrder", "PQC", "ParamSymbol", "ParamTable", "ParseError",
    "STDD", "StddManager", "TensorIndex", "TrRef", "TrddManager", "TrigPoly",
    "USING_COMPILED", "Verdict", "adjoint_gate", "check", "check_alternate",
    "check_construct", "common_factor", "confirm_by_sampling", "expand_cos",
    "expand_sin", "generate", "generate_text", "inject_errors", "lower_gate",
    "pair_compatible", "param_profile", "parse_pqc", "print_pqc",
    "rewrite_equivalent", "simulate",
]
