"""Oracle-relative algorithms for distances to and expectations onto a subalgebra."""

from .certificates import (
    CertificateParams,
    LowerBound,
    best_level,
    certify_lower_bound,
    commutator_norm,
    fprime,
    g,
    psi,
    psi_components,
    unitarity_defect,
)
from .expectation import (
    SearchExhausted,
    distance_from_expectation,
    expectation_from_distance,
    internal_precision,
    pimsner_popa_expectation,
)
from .gapfn import kazhdan_points, spectral_gap_fn_from_kazhdan
from .search import (
    BudgetExhausted,
    Certified,
    DistanceResult,
    Emission,
    interleaved_distance,
    lower_bound_machine,
    upper_bound_machine,
)

__all__ = [
    "CertificateParams",
    "LowerBound",
    "best_level",
    "certify_lower_bound",
    "commutator_norm",
    "fprime",
    "g",
    "psi",
    "psi_components",
    "unitarity_defect",
    "SearchExhausted",
    "distance_from_expectation",
    "expectation_from_distance",
    "internal_precision",
    "pimsner_popa_expectation",
    "kazhdan_points",
    "spectral_gap_fn_from_kazhdan",
    "BudgetExhausted",
    "Certified",
    "DistanceResult",
    "Emission",
    "interleaved_distance",
    "lower_bound_machine",
    "upper_bound_machine",
]
