"""Kernel predictors: offline fitting, online evaluation, persistence and validation."""

from kdpc.predictors._predictors import PredictorSettings, Predictors, fit_predictors, predict, resolve_bandwidth
from kdpc.predictors.krr import AlphaP, compute_alpha_p, factorize, fit_p1, fit_p2
from kdpc.predictors.storage import load_predictors, save_predictors
from kdpc.predictors.validation import ValidationReport, open_loop_validate, prediction_rmse

__all__ = [
    "PredictorSettings", "Predictors", "fit_predictors", "predict", "resolve_bandwidth",
    "AlphaP", "compute_alpha_p", "factorize", "fit_p1", "fit_p2",
    "load_predictors", "save_predictors",
    "ValidationReport", "open_loop_validate", "prediction_rmse",
]
