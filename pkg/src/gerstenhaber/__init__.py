"""Exact Gerstenhaber calculus on Lie algebroids with a numeric point-check harness."""

from .scalars import Polynomial, Rational, VarSet, parse_scalar
from .exterior import Frame, Multivector, wedge, eval_on_covectors, sharp_power
from .algebroid import LieAlgebroid, tangent_algebroid, schouten, anchor_push, validate_algebroid
from .report import Report, VerificationError

__all__ = [
    "Polynomial", "Rational", "VarSet", "parse_scalar",
    "Frame", "Multivector", "wedge", "eval_on_covectors", "sharp_power",
    "LieAlgebroid", "tangent_algebroid", "schouten", "anchor_push", "validate_algebroid",
    "Report", "VerificationError",
]

__version__ = "0.1.0"
