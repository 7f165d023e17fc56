"""Python bindings for the ttsa core library."""

from ._core import (
    CovariancePrediction,
    NoiseDistribution,
    NoiseSpec,
    SchedulePair,
    StepSchedule,
    SystemSpec,
    TtsaError,
    delta_matrix,
    ensemble_covariance,
    fixed_point,
    gained_reduced_covariance,
    l_norms,
    load_config,
    normality_check,
    optimal_gain_covariance,
    predict_full,
    predict_reduced,
    propagate,
    validate,
)

__all__ = [name for name in dir() if not name.startswith("_")]
