"""Exactly solvable two-dimensional position-dependent-mass Schrodinger model:
closed-form spectra and eigenbases, intertwining operators, mass-class
generation and finite-difference cross-checks."""
from .errors import DomainError, VerificationError
from .model import (ModelParams, QuantumNumbers, SusyLabels, Psi_state, degeneracy, energy_level,
                    eval_chi, eval_phi, eval_psi, eval_Psi, eval_zero_mode, psi_state, zero_mode_state)
from .coeffs import TransformMatrix, Z_row, transform_matrix, x_factor
from .operators import apply, build_operator
from .identities import IDENTITIES, verify_identity
from .massgen import hyperbolic_family, mass_class_solution, one_dim_susy
from .oracle import FdConfig, fd_eigs_2d, fd_eigs_pt

__all__ = [
    "DomainError", "VerificationError", "ModelParams", "QuantumNumbers", "SusyLabels", "Psi_state",
    "degeneracy", "energy_level", "eval_chi", "eval_phi", "eval_psi", "eval_Psi", "eval_zero_mode",
    "psi_state", "zero_mode_state", "TransformMatrix", "Z_row", "transform_matrix", "x_factor", "apply",
    "build_operator", "IDENTITIES", "verify_identity", "hyperbolic_family", "mass_class_solution",
    "one_dim_susy", "FdConfig", "fd_eigs_2d", "fd_eigs_pt",
]
