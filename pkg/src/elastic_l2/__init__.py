"""L2 growth of solutions to the isotropic elastic wave equation.

The package evaluates the exact Fourier solution for Gaussian-polynomial
initial data, the closed-form angular and radial constants that control the
large-time behaviour, and a finite-difference solver used as an independent
cross-check.
"""

from .core_model import (
    ConstraintViolation,
    GaussianPolyAtom,
    GaussianPolyData,
    LameParams,
    atom,
    gaussian_data,
    make_lame,
)
from .moments import MomentSet, assemble_moments
from .quadrature import QuadratureError, QuadratureSpec
from .spectral import DecompositionTerm, SolutionEvaluator

__all__ = [
    "ConstraintViolation",
    "DecompositionTerm",
    "GaussianPolyAtom",
    "GaussianPolyData",
    "LameParams",
    "MomentSet",
    "QuadratureError",
    "QuadratureSpec",
    "SolutionEvaluator",
    "assemble_moments",
    "atom",
    "gaussian_data",
    "make_lame",
]

__version__ = "0.1.0"
