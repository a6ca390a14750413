"""Closed-loop experiments: scenarios, simulation, metrics and result files."""

from kdpc.experiments.metrics import STEADY_STATE_WINDOW, Metrics, compute_metrics, segments, series_metrics
from kdpc.experiments.plots import plot_result
from kdpc.experiments.runner import ControllerSeries, ExperimentResult, make_controller, run_controller, run_scenario
from kdpc.experiments.scenarios import CONTROLLERS, PiecewiseConstant, Scenario, default_scenarios
from kdpc.experiments.storage import COLUMNS, read_series, write_metrics, write_results, write_series

__all__ = [
    "STEADY_STATE_WINDOW", "Metrics", "compute_metrics", "segments", "series_metrics",
    "plot_result",
    "ControllerSeries", "ExperimentResult", "make_controller", "run_controller", "run_scenario",
    "CONTROLLERS", "PiecewiseConstant", "Scenario", "default_scenarios",
    "COLUMNS", "read_series", "write_metrics", "write_results", "write_series",
]
