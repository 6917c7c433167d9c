"""Design-based Gini estimation over stratified two-stage cluster samples."""

from ._giniseq import (  # noqa: F401
    DataError,
    DegenerateSampleError,
    InsufficientReplicatesError,
    SourceError,
    analytic_gini,
    estimate_survey,
    gini,
    optimal_c,
    pilot_sizes,
    run_adaptive,
    simulate,
)

__all__ = [
    "DataError",
    "DegenerateSampleError",
    "InsufficientReplicatesError",
    "SourceError",
    "analytic_gini",
    "estimate_survey",
    "gini",
    "optimal_c",
    "pilot_sizes",
    "run_adaptive",
    "simulate",
]
