"""Swap tests for whether a fitted model treats two features interchangeably."""

__version__ = "0.1.0"

from .core import (
    Dataset,
    FeaturePair,
    InsufficientDataError,
    PairedDataset,
    ValidationError,
    all_pairs,
    load_vector,
    read_csv,
    split_pairs,
    swap_coordinates,
    write_csv,
)
from .engine import (
    NonVacuousWarning,
    TestConfig,
    TestReport,
    compute_statistic,
    decision_threshold,
    p_value,
    run_all_pairs,
    run_test,
)
from .multiplicity import PvalueBatch, benjamini_yekutieli, fdr_simulation_check
from .power import (
    OdcEstimate,
    PowerQuery,
    min_gap_binary,
    min_gap_linear,
    odc_deviation_binary,
    odc_deviation_linear,
    odc_monte_carlo,
    rho_n,
)
from .scores import ScoreFunction
from .shift import (
    GaussianSpec,
    InternalConsistencyError,
    ShiftBound,
    exchangeable_zero_bound,
    gaussian_swap_bound,
    uniform_binary_bound,
    user_bound,
)
from .simgen import GeneratorSpec

__all__ = [
    "Dataset",
    "FeaturePair",
    "GaussianSpec",
    "GeneratorSpec",
    "InsufficientDataError",
    "InternalConsistencyError",
    "NonVacuousWarning",
    "OdcEstimate",
    "PairedDataset",
    "PowerQuery",
    "PvalueBatch",
    "ScoreFunction",
    "ShiftBound",
    "TestConfig",
    "TestReport",
    "ValidationError",
    "all_pairs",
    "benjamini_yekutieli",
    "compute_statistic",
    "decision_threshold",
    "exchangeable_zero_bound",
    "fdr_simulation_check",
    "gaussian_swap_bound",
    "load_vector",
    "min_gap_binary",
    "min_gap_linear",
    "odc_deviation_binary",
    "odc_deviation_linear",
    "odc_monte_carlo",
    "p_value",
    "read_csv",
    "rho_n",
    "run_all_pairs",
    "run_test",
    "split_pairs",
    "swap_coordinates",
    "uniform_binary_bound",
    "user_bound",
    "write_csv",
]
