"""Open-loop quality checks of fitted predictors against recorded or freshly simulated windows."""

import logging
from dataclasses import dataclass, replace

import numpy as np  # type: ignore

from kdpc.data import ExcitationConfig, assemble_dataset, collect_trajectories
from kdpc.plants import Plant
from kdpc.predictors._predictors import Predictors, predict
from kdpc.structs import Dataset
from kdpc.utils.checks import ArtifactError

log = logging.getLogger(__name__)
log.addHandler(logging.NullHandler())


@dataclass(frozen=True, eq=False)
class ValidationReport:
    """Prediction error of a predictor over a set of windows; `per_step_rmse[i]` is the RMSE `i + 1` steps ahead."""

    per_step_rmse: np.ndarray
    rmse: float
    windows: int

    def as_dict(self) -> dict:
        """Plain representation for YAML reports."""
        return {"per_step_rmse": [float(value) for value in self.per_step_rmse], "rmse": self.rmse,
                "windows": self.windows}


def prediction_rmse(predictors: Predictors, dataset: Dataset) -> ValidationReport:
    """Compare predictions against the recorded future outputs of every window of a dataset."""
    if (dataset.t_ini, dataset.n_horizon, dataset.n_u, dataset.n_y) != \
            (predictors.t_ini, predictors.n_horizon, predictors.n_u, predictors.n_y):
        raise ArtifactError("dataset horizons or channel counts do not match the predictors")
    errors = np.empty_like(dataset.y_f)
    for i in range(dataset.size):
        k_p_ini = predictors.similarity(dataset.d_ini[:, i])
        errors[:, i] = predict(predictors, k_p_ini, dataset.d_f_u[:, i]) - dataset.y_f[:, i]

    # rows are time-major, so each horizon step owns `n_y` consecutive rows
    squared = errors.reshape(predictors.n_horizon, predictors.n_y, dataset.size) ** 2
    per_step = np.sqrt(squared.mean(axis=(1, 2)))
    return ValidationReport(per_step_rmse=per_step, rmse=float(np.sqrt(squared.mean())), windows=dataset.size)


def open_loop_validate(predictors: Predictors, plant: Plant, excitation: ExcitationConfig,
                       seed_shift: int = 1) -> ValidationReport:
    """Validate predictors on fresh windows collected with the excitation seed shifted by `seed_shift`."""
    excitation = replace(excitation, seed=excitation.seed + seed_shift)
    trajectories = collect_trajectories(plant, excitation, predictors.t_ini, predictors.n_horizon)
    dataset = assemble_dataset(trajectories, predictors.t_ini, predictors.n_horizon, excitation.stride)
    report = prediction_rmse(predictors, dataset)
    log.info("open-loop validation over %d windows: RMSE %.4g", report.windows, report.rmse)
    return report
