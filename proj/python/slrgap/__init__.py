"""Reduction laboratory for sparse regression and spiked covariance models."""

from slrgap._core import (
    ModelParams,
    derive_planted_slr,
    distinguish_pair,
    ldlr_norm_bound,
    overlap_moment,
    prediction_error,
    run_experiment_json,
    sample_pair,
    sample_spike,
    solve_lasso,
)

__all__ = [
    "ModelParams",
    "derive_planted_slr",
    "distinguish_pair",
    "ldlr_norm_bound",
    "overlap_moment",
    "prediction_error",
    "run_experiment_json",
    "sample_pair",
    "sample_spike",
    "solve_lasso",
]
