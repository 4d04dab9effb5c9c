"""Euclidean Jordan algebras, stratified cone models and branching checks."""

__version__ = "0.1.0"

from .jordan import Family, JordanAlgebra, build_algebra
from .representation import RepSpec, make_matrix_rep, make_scalar_rep

__all__ = ["Family", "JordanAlgebra", "RepSpec", "build_algebra", "make_matrix_rep", "make_scalar_rep",
           "__version__"]
