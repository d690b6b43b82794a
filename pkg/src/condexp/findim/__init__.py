"""Exact finite-dimensional tracial algebras: the ground truth and oracle backend."""

from .algebra import BlockMatrix, MultiMatrixAlgebra, direct_sum, kron
from .backend import (
    FindimNormOracle,
    FindimPair,
    NotRepresentable,
    PerturbedNormOracle,
    TermInclusion,
    UnassignedGenerator,
    certified_gap_function,
    check_assignment,
    element_as_term,
    eval_term,
    findim_pair_oracle,
    infer_adjoint_structure,
    unit_ball_violations,
)
from .polar import is_unitary, polar_bound_holds, polar_round_unitary, unitarity_defect_sq
from .subalgebra import (
    GapCertificate,
    SubalgebraSpec,
    certify_gap,
    commutant,
    conditional_expectation_exact,
    contraction_witness,
    distance_exact,
    is_contraction,
    norm2_exact,
    psd_check,
    psd_witness,
)

__all__ = [
    "BlockMatrix",
    "MultiMatrixAlgebra",
    "direct_sum",
    "kron",
    "FindimNormOracle",
    "FindimPair",
    "NotRepresentable",
    "PerturbedNormOracle",
    "TermInclusion",
    "UnassignedGenerator",
    "certified_gap_function",
    "check_assignment",
    "element_as_term",
    "eval_term",
    "findim_pair_oracle",
    "infer_adjoint_structure",
    "unit_ball_violations",
    "is_unitary",
    "polar_bound_holds",
    "polar_round_unitary",
    "unitarity_defect_sq",
    "GapCertificate",
    "SubalgebraSpec",
    "certify_gap",
    "commutant",
    "conditional_expectation_exact",
    "contraction_witness",
    "distance_exact",
    "is_contraction",
    "norm2_exact",
    "psd_check",
    "psd_witness",
]
