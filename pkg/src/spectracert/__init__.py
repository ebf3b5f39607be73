"""Numerical toolkit for the facial geometry of compact spectrahedra.

Covers membership and stratification of the boundary by kernel dimension,
extreme point tests, Perron eigenpair bounds, continuous kernel sections,
Hadamard-inverse domination certificates separating boundary pieces, and a
finite-dimensional measurement separation check.
"""
__version__ = "0.1.0"

from .tolerances import DEFAULT_TOL, Tolerances
from .pencil import (AffineReduction, HermitianPencil, Membership, MembershipVerdict,
                     SymmetricPencil, affine_hull_reduce, boundedness_probe, deepest_point,
                     evaluate, membership, symmetrize_hermitian)
from .strata import kernel_dimension, locally_closed_witness, stratify_samples
from .faces import extreme_oracle_geometric, face_direction_space, is_extreme, walk_to_extreme
from .perron import perron_eigenpair, verify_perron_bounds
from .hadamard import alpha_constant, hadamard_inverse, read_psd_check, spectral_split
from .sections import KernelSection, build_gamma, gram_matrix, riesz_projection
from .certify import (PairConfig, SeparationCertificate, audit_certificate, certify_pair,
                      certify_separation)
from .povm import FinitePOVM, FinitePVM, conclude_equality_check, hypothesis_holds, povm_sweep
from .io import load_example, parse_pencil

__all__ = [
    "DEFAULT_TOL", "Tolerances", "AffineReduction", "HermitianPencil", "Membership",
    "MembershipVerdict", "SymmetricPencil", "affine_hull_reduce", "boundedness_probe",
    "deepest_point", "evaluate", "membership", "symmetrize_hermitian",
    "kernel_dimension", "locally_closed_witness", "stratify_samples",
    "extreme_oracle_geometric", "face_direction_space", "is_extreme", "walk_to_extreme",
    "perron_eigenpair", "verify_perron_bounds",
    "alpha_constant", "hadamard_inverse", "read_psd_check", "spectral_split",
    "KernelSection", "build_gamma", "gram_matrix", "riesz_projection",
    "PairConfig", "SeparationCertificate", "audit_certificate", "certify_pair", "certify_separation",
    "FinitePOVM", "FinitePVM", "conclude_equality_check", "hypothesis_holds", "povm_sweep",
    "load_example", "parse_pencil",
]
