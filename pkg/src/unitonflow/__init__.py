"""Harmonic maps from the sphere into the unitary group, built from
echelon arrays of rational functions, together with their one-parameter
energy flow and numerical verification suites."""

from .ratfun import ComplexPoly, ComplexRational
from .cxlinalg import Frame, orthonormalize, projector
from .uniton_array import (ArrayColumn, ConstantLeftFactor, FZeroArray,
                           UnitonArray, array_from_json, array_to_json,
                           from_f0, is_diagonal, to_echelon, validate,
                           validate_f0)
from .harmonic_builder import (LaurentMatrix, ProjectionChain, build_chain,
                               evaluate_phi, extended_solution, phi_from_chain)
from .spectral_flow import deform, deform_k, flow_family, limit_array
from .verifier import (eta, grassmann_check, harmonicity_residual,
                       lambda_plus_check, maurer_cartan_check,
                       s1_invariance_check)
from .lemma_oracles import ChainPair, VFamily, check_identities

__version__ = "0.1.0"

__all__ = [
    "ComplexPoly", "ComplexRational", "Frame", "orthonormalize", "projector",
    "ArrayColumn", "ConstantLeftFactor", "FZeroArray", "UnitonArray",
    "array_from_json", "array_to_json", "from_f0", "is_diagonal",
    "to_echelon", "validate", "validate_f0",
    "LaurentMatrix", "ProjectionChain", "build_chain", "evaluate_phi",
    "extended_solution", "phi_from_chain",
    "deform", "deform_k", "flow_family", "limit_array",
    "eta", "grassmann_check", "harmonicity_residual", "lambda_plus_check",
    "maurer_cartan_check", "s1_invariance_check",
    "ChainPair", "VFamily", "check_identities",
]
