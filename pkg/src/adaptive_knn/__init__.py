"""Adaptive estimation for approximate k-nearest-neighbour search."""

from .algorithm import AdaptiveKNN, IterationLimitExceeded, RunConfig, RunReport, TerminationStatus, accounting, run
from .bounds import ComplexityReport, GapProfile, complexity_report, lower_bound, min_samples_for_gap, upper_score
from .core import (
    ArmSampler,
    ArmState,
    ConfidenceSpec,
    ConfigurationError,
    Dataset,
    DimensionError,
    Query,
    SamplingMode,
    Variant,
    alpha_fn,
    exact_distance,
    sample_coordinate,
    update_estimate,
)
from .datagen import SubspaceSpec, generate_coherent, generate_subspace, load_csv
from .heaps import HeapBank
from .oracle import OracleResult, brute_force, recall

__all__ = [
    "AdaptiveKNN", "ArmSampler", "ArmState", "ComplexityReport", "ConfidenceSpec", "ConfigurationError",
    "Dataset", "DimensionError", "GapProfile", "HeapBank", "IterationLimitExceeded", "OracleResult", "Query",
    "RunConfig", "RunReport", "SamplingMode", "SubspaceSpec", "TerminationStatus", "Variant", "accounting",
    "alpha_fn", "brute_force", "complexity_report", "exact_distance", "generate_coherent", "generate_subspace",
    "load_csv", "lower_bound", "min_samples_for_gap", "recall", "run", "sample_coordinate", "update_estimate",
    "upper_score",
]
