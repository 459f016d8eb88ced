"""
Minimum-change excitation corrections for linear arrays with failed elements.

Given an array whose dead elements are pinned to zero, the package finds a
correction of as few working excitations as possible that restores a
pattern requirement (by default a maximum sidelobe level over an angular
region), and ships an exhaustive enumeration oracle plus a benchmark
harness for validating the heuristic.
"""

from .correction import CorrectionResult, TraceEntry, least_important, make_trial, minimize_corrections
from .errors import (
    BudgetExceededError,
    CorrectionMaskError,
    DegenerateBroadsideError,
    EmptyRegionError,
    InfeasibleError,
    NoMainlobeError,
    NumericalFailureError,
)
from .model import (
    DB_FLOOR,
    AngularRegion,
    ArrayGeometry,
    FailureScenario,
    MetricSpec,
    array_factor,
    beamwidth,
    dynamic_range,
    evaluate_metric,
    hpbw,
    max_sll,
    pattern_db,
    sidelobe_region,
    sll_db,
    steering_matrix,
    uniform_grid,
    uniform_positions,
)
from .oracle import OracleResult, exhaustive_min
from .solver import SolverConfig, l0_norm, l1_norm, solve_constrained_l1
from .taper import apply_failures, corrected_weights, dolph_chebyshev

__version__ = "0.1.0"

__all__ = [
    "AngularRegion",
    "ArrayGeometry",
    "BudgetExceededError",
    "CorrectionMaskError",
    "CorrectionResult",
    "DB_FLOOR",
    "DegenerateBroadsideError",
    "EmptyRegionError",
    "FailureScenario",
    "InfeasibleError",
    "MetricSpec",
    "NoMainlobeError",
    "NumericalFailureError",
    "OracleResult",
    "SolverConfig",
    "TraceEntry",
    "apply_failures",
    "array_factor",
    "beamwidth",
    "corrected_weights",
    "dolph_chebyshev",
    "dynamic_range",
    "evaluate_metric",
    "exhaustive_min",
    "hpbw",
    "l0_norm",
    "l1_norm",
    "least_important",
    "make_trial",
    "max_sll",
    "minimize_corrections",
    "pattern_db",
    "sidelobe_region",
    "sll_db",
    "solve_constrained_l1",
    "steering_matrix",
    "uniform_grid",
    "uniform_positions",
    "__version__",
]
