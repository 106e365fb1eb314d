"""Noncommutative residue densities for perturbed Dirac operators."""

from .clifford import AntisymTensor3, CliffordRep, build_rep, clifford_vector, supertrace
from .errors import (DimensionError, DivergenceError, JetDepthError, ResidueError, RouteDisagreement,
                     SymbolInversionError, TruncationError, ValidityError)
from .operators import JetData, PerturbationSpec
from .residue import (THEOREMS, VerificationRecord, boundary_case1, boundary_case2, compare,
                      interior_closed_form, interior_density, interior_density_routes)

__all__ = ["AntisymTensor3", "CliffordRep", "build_rep", "clifford_vector", "supertrace",
           "DimensionError", "DivergenceError", "JetDepthError", "ResidueError", "RouteDisagreement",
           "SymbolInversionError", "TruncationError", "ValidityError", "JetData", "PerturbationSpec",
           "THEOREMS", "VerificationRecord", "boundary_case1", "boundary_case2", "compare",
           "interior_closed_form", "interior_density", "interior_density_routes"]

__version__ = "0.1.0"
