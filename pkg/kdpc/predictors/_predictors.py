"""Pre-computed kernel predictors and the offline procedure that fits them to a dataset."""

import logging
from dataclasses import dataclass
from typing import Union

import numpy as np  # type: ignore

from kdpc.data import check_pe
from kdpc.kernels import KernelSpec, make_kernel, median_bandwidth
from kdpc.predictors.krr import fit_p1, fit_p2
from kdpc.structs import Dataset
from kdpc.utils.checks import ContractViolationError, DimensionMismatchError, check_finite, check_positive, \
    check_shape

log = logging.getLogger(__name__)
log.addHandler(logging.NullHandler())

Bandwidth = Union[float, str]


@dataclass(frozen=True)
class PredictorSettings:
    """Regularization and bandwidths of the offline fit; a bandwidth of `"median"` uses the median heuristic."""

    lambda_reg: float = 1e-3
    mu_reg: float = 1e-3
    bandwidth_past: Bandwidth = "median"
    bandwidth_future: Bandwidth = "median"

    def __post_init__(self) -> None:
        """Validate regularizers and bandwidths."""
        check_positive("lambda_reg", self.lambda_reg)
        check_positive("mu_reg", self.mu_reg)
        for name in ("bandwidth_past", "bandwidth_future"):
            value = getattr(self, name)
            if isinstance(value, str):
                if value != "median":
                    raise ContractViolationError(f"`{name}` must be a positive number or \"median\", got `{value}`")
            else:
                check_positive(name, value)


def resolve_bandwidth(setting: Bandwidth, points: np.ndarray) -> float:
    """Turn a bandwidth setting into a number, applying the median heuristic to `points` if requested."""
    if setting == "median":
        return median_bandwidth(points)
    return float(setting)


@dataclass(frozen=True, eq=False)
class Predictors:
    """Fitted predictor matrices and everything needed to evaluate them online.

    `d_ini` holds the past windows of the training data: online similarity vectors are taken against its columns.
    """

    p1: np.ndarray
    p2: np.ndarray
    lambda_reg: float
    mu_reg: float
    kernel_past: KernelSpec
    kernel_future: KernelSpec
    dataset_digest: str
    d_ini: np.ndarray
    t_ini: int
    n_horizon: int
    n_u: int = 1
    n_y: int = 1
    lambda_min_pp: float = float("nan")

    def __post_init__(self) -> None:
        """Check regularizers, dimensions and finiteness."""
        check_positive("lambda_reg", self.lambda_reg)
        check_positive("mu_reg", self.mu_reg)
        size = self.d_ini.shape[1]
        check_shape("p1", self.p1, (self.n_y * self.n_horizon, size))
        check_shape("p2", self.p2, (self.n_y * self.n_horizon, self.n_u * self.n_horizon))
        check_shape("d_ini", self.d_ini, ((self.n_u + self.n_y) * self.t_ini, size))
        check_finite("p1", self.p1)
        check_finite("p2", self.p2)

    @property
    def size(self) -> int:
        """Number of training windows `T`."""
        return self.d_ini.shape[1]

    def similarity(self, z_ini: np.ndarray) -> np.ndarray:
        """Similarity vector between an online past window and every training past window."""
        return make_kernel(self.kernel_past).similarity_vector(self.d_ini, z_ini)


def predict(p: Predictors, k_p_ini: np.ndarray, delta_u: np.ndarray) -> np.ndarray:
    """Predicted future outputs `P1 k_p_ini + P2 delta_u`."""
    k_p_ini, delta_u = np.ravel(k_p_ini), np.ravel(delta_u)
    if k_p_ini.size != p.size:
        raise DimensionMismatchError(f"similarity vector must have {p.size} entries, instead got {k_p_ini.size}")
    if delta_u.size != p.n_u * p.n_horizon:
        raise DimensionMismatchError(f"increments must have {p.n_u * p.n_horizon} entries, instead got {delta_u.size}")
    return p.p1 @ k_p_ini + p.p2 @ delta_u


def fit_predictors(dataset: Dataset, settings: PredictorSettings) -> Predictors:
    """Fit both predictors to a dataset."""
    kernel_past = KernelSpec(bandwidth=resolve_bandwidth(settings.bandwidth_past, dataset.d_ini))
    kernel_future = KernelSpec(bandwidth=resolve_bandwidth(settings.bandwidth_future, dataset.d_f_u))
    log.info("kernel bandwidths: past %.6g, future %.6g", kernel_past.bandwidth, kernel_future.bandwidth)

    k_pp = make_kernel(kernel_past).gram(dataset.d_ini)
    lambda_min = check_pe(k_pp)
    log.info("lambda_min(K_pp) = %.3e over T = %d windows", lambda_min, dataset.size)
    p1 = fit_p1(dataset.y_f, k_pp, settings.lambda_reg)

    k_ff = make_kernel(kernel_future).gram(dataset.d_f_u)
    p2 = fit_p2(dataset.d_f_u, k_ff, settings.mu_reg, dataset.y_f, kernel_future)

    return Predictors(p1=p1, p2=p2, lambda_reg=settings.lambda_reg, mu_reg=settings.mu_reg,
                      kernel_past=kernel_past, kernel_future=kernel_future, dataset_digest=dataset.digest(),
                      d_ini=dataset.d_ini.copy(), t_ini=dataset.t_ini, n_horizon=dataset.n_horizon,
                      n_u=dataset.n_u, n_y=dataset.n_y, lambda_min_pp=lambda_min)
