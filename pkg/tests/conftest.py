"""Shared fixtures: the benchmark dataset and the predictors fitted to it are built once per session."""

import numpy as np  # type: ignore
import pytest

from kdpc.data import ExcitationConfig, assemble_dataset, collect_trajectories
from kdpc.kernels import KernelSpec
from kdpc.plants import VanDerPolPlant
from kdpc.predictors import PredictorSettings, Predictors, fit_predictors
from kdpc.structs import Dataset

T_INI = 10
N_HORIZON = 15


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(0)


@pytest.fixture(scope="session")
def benchmark_dataset() -> Dataset:
    trajectories = collect_trajectories(VanDerPolPlant(), ExcitationConfig(), T_INI, N_HORIZON)
    return assemble_dataset(trajectories, T_INI, N_HORIZON)


@pytest.fixture(scope="session")
def benchmark_predictors(benchmark_dataset: Dataset) -> Predictors:
    return fit_predictors(benchmark_dataset, PredictorSettings())


def synthetic_predictors(t_ini: int = 2, n_horizon: int = 3, size: int = 6, seed: int = 0) -> Predictors:
    """Small random predictors for tests that only exercise the controller algebra."""
    rng = np.random.default_rng(seed)
    return Predictors(p1=0.1 * rng.normal(size=(n_horizon, size)), p2=np.tril(np.full((n_horizon, n_horizon), 0.5)),
                      lambda_reg=1e-3, mu_reg=1e-1, kernel_past=KernelSpec(bandwidth=2.0),
                      kernel_future=KernelSpec(bandwidth=2.0), dataset_digest="synthetic",
                      d_ini=rng.normal(size=(2 * t_ini, size)), t_ini=t_ini, n_horizon=n_horizon)
