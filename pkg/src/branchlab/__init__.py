"""Exact local intersection theory of plane curves via Puiseux branches."""

__version__ = "0.1.0"

from .errors import BranchlabError, InputError, InvariantViolation, ResourceCap
from .poly import MultiPoly, PlaneCurve, parse_poly

__all__ = [
    "BranchlabError",
    "InputError",
    "InvariantViolation",
    "MultiPoly",
    "PlaneCurve",
    "ResourceCap",
    "__version__",
    "parse_poly",
]
