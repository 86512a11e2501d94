"""Cesaro summation of i.i.d. sequences and 2D random fields.

Weighted-mean kernels, heavy-tail samplers, moment-condition classifiers,
and the diagnostics that check predicted convergence against simulation
and analytic series. The HTTP facade lives in cesaro_fields.service, the
command line in cesaro_fields.cli.
"""

__version__ = "0.1.0"

from .convergence import (
    AS_SCENARIOS,
    MATRIX_ORDERS,
    CaseRequirements,
    CompleteSumResult,
    ConvergenceVerdict,
    InProbabilityResult,
    MomentRequirement,
    TrajectoryResult,
    classify_moment_case_1d,
    classify_moment_case_2d,
    complete_convergence_sum,
    complete_convergence_sum_1d,
    empirical_complete_event_sum,
    in_probability_test,
    run_matrix,
    straddle_profiles,
    trajectory_diagnostic,
    verdict,
)
from .errors import (
    CapacityError,
    CesaroFieldsError,
    DomainError,
    NumericError,
    RangeError,
)
from .fields import (
    FAMILIES,
    FieldSpec,
    TailProfile,
    derive_seed,
    feller_check,
    moment_finite,
    sample,
    sample_block,
    tail_prob,
    truncated_mean_expect,
)
from .integrals import (
    RegimeCase,
    branch_form,
    branch_ratio,
    equivalence_check,
    equivalence_matrix,
    gamma_integral,
    integral_growth,
    moment_integral,
    regime_case,
    stabilization_report,
    verify_report,
)
from .means import (
    MeanGrid,
    TruncatedStats,
    cesaro_mean_1d,
    cesaro_mean_2d,
    dyadic_checkpoints,
    mean_lattice,
    power_form_sums,
    truncated_stats,
)
from .weights import (
    CesaroOrder,
    WeightTable,
    asymptotic_ratio,
    log_weight,
    weight,
    weight_row,
)

__all__ = [
    "__version__",
    "AS_SCENARIOS",
    "MATRIX_ORDERS",
    "CapacityError",
    "CaseRequirements",
    "CesaroFieldsError",
    "CesaroOrder",
    "CompleteSumResult",
    "ConvergenceVerdict",
    "DomainError",
    "FAMILIES",
    "FieldSpec",
    "InProbabilityResult",
    "MeanGrid",
    "MomentRequirement",
    "NumericError",
    "RangeError",
    "RegimeCase",
    "TailProfile",
    "TrajectoryResult",
    "TruncatedStats",
    "WeightTable",
    "asymptotic_ratio",
    "branch_form",
    "branch_ratio",
    "cesaro_mean_1d",
    "cesaro_mean_2d",
    "classify_moment_case_1d",
    "classify_moment_case_2d",
    "complete_convergence_sum",
    "complete_convergence_sum_1d",
    "derive_seed",
    "dyadic_checkpoints",
    "empirical_complete_event_sum",
    "equivalence_check",
    "equivalence_matrix",
    "feller_check",
    "gamma_integral",
    "in_probability_test",
    "integral_growth",
    "log_weight",
    "mean_lattice",
    "moment_finite",
    "moment_integral",
    "power_form_sums",
    "regime_case",
    "run_matrix",
    "sample",
    "sample_block",
    "stabilization_report",
    "straddle_profiles",
    "tail_prob",
    "trajectory_diagnostic",
    "truncated_mean_expect",
    "truncated_stats",
    "verdict",
    "verify_report",
    "weight",
    "weight_row",
]
