"""Numerical analysis of conformal slant submersions from cosymplectic manifolds."""

__version__ = "0.1.0"

from .expr import DomainError, ExprError, ParseError, parse
from .geometry import (AlmostContactStructure, GeometryError, ManifoldSpec, builtin,
                       builtin_cosymplectic, check_cosymplectic, christoffel_at)
from .map_analysis import (SmoothMapSpec, conformality, frame_at, slant_angle,
                           slant_decomposition)
from .oneill import LocalGeometry, oneill_tensors, second_fundamental_form
from .theorems import CHECKS, Analysis, Tolerances, run_checks
from .verdict import CheckVerdict

__all__ = [
    "AlmostContactStructure", "Analysis", "CHECKS", "CheckVerdict", "DomainError", "ExprError",
    "GeometryError", "LocalGeometry", "ManifoldSpec", "ParseError", "SmoothMapSpec",
    "Tolerances", "builtin", "builtin_cosymplectic", "check_cosymplectic", "christoffel_at",
    "conformality", "frame_at", "oneill_tensors", "parse", "run_checks",
    "second_fundamental_form", "slant_angle", "slant_decomposition",
]
