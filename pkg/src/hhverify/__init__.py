"""Numerical checks of Hermite-Hadamard type bounds for phi-convex and
quasi-phi-convex functions on rotated segments."""

__version__ = "0.1.0"

from .bounds import (BoundResult, HolderParams, Status, TheoremId, check_hadamard_chain, evaluate,
                     explain)
from .convexity import ClassKind, ConvexityReport, Verdict, check_implication_chain, check_membership
from .expr import DomainError, ParseError, differentiate, eval_abs_deriv, parse, render
from .quadrature import check_trapezoid_identity, check_midpoint_identity, integrate_segment, segment_mean
from .segment import PhiSegment, SegmentGrid

__all__ = [
    "BoundResult", "ClassKind", "ConvexityReport", "DomainError", "HolderParams", "ParseError",
    "PhiSegment", "SegmentGrid", "Status", "TheoremId", "Verdict", "check_hadamard_chain",
    "check_trapezoid_identity", "check_midpoint_identity", "check_implication_chain", "check_membership",
    "differentiate", "eval_abs_deriv", "evaluate", "explain", "integrate_segment", "parse",
    "render", "segment_mean",
]
