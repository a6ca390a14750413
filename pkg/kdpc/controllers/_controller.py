"""Interfaces shared by receding-horizon controllers."""

from abc import ABC, abstractmethod
from dataclasses import dataclass, field
from typing import Optional, Sequence, Tuple, Union

import numpy as np  # type: ignore
from scipy.linalg import eigvalsh  # type: ignore

from kdpc.solvers import QPSolution
from kdpc.utils.checks import ContractViolationError, DimensionMismatchError, check_positive, check_symmetric

Weight = Union[float, Sequence[float], np.ndarray]


def weight_matrix(name: str, weight: Weight, size: int, channels: int = 1) -> np.ndarray:
    """Expand a weight into a positive-definite `(size, size)` matrix.

    Scalars scale the identity, vectors of `channels` entries are repeated over the horizon, vectors of `size` entries
    become a diagonal and `(size, size)` matrices are used as given.
    """
    weight = np.asarray(weight, dtype=np.float64)
    if weight.ndim == 0:
        matrix = float(weight) * np.eye(size)
    elif weight.ndim == 1 and weight.size == size:
        matrix = np.diag(weight)
    elif weight.ndim == 1 and weight.size == channels:
        matrix = np.diag(np.tile(weight, size // channels))
    elif weight.shape == (size, size):
        matrix = weight
    else:
        raise DimensionMismatchError(f"weight `{name}` of shape {weight.shape} does not fit a horizon of {size}")
    check_symmetric(name, matrix)
    if eigvalsh(matrix, subset_by_index=[0, 0])[0] <= 0:
        raise ContractViolationError(f"weight `{name}` must be positive definite")
    return matrix


def _freeze(weight: Weight) -> Weight:
    values = np.asarray(weight, dtype=np.float64)
    if values.ndim == 2:
        return tuple(tuple(row) for row in values.tolist())
    return tuple(values.ravel().tolist())


@dataclass(frozen=True)
class ControllerConfig:
    """Horizons, weights and constraints of the receding-horizon controllers.

    `q`, `r` and `lambda_y` weigh the tracking error, the input increments and the output slack of the data-driven
    controller. The model-based baseline uses `q` on the tracking error, `nmpc_r` on the distance of the inputs from
    the steady input of the reference and keeps inputs within `[u_min, u_max]`.
    """

    t_ini: int = 10
    n_horizon: int = 15
    q: Weight = 100.0
    r: Weight = 0.1
    lambda_y: Weight = 1e4
    sigma_bar: float = 0.5
    du_min: float = -2.0
    du_max: float = 2.0
    y_min: float = -5.0
    y_max: float = 5.0
    u_min: float = -10.0
    u_max: float = 10.0
    nmpc_r: float = 10.0
    nmpc_iterations: int = 3

    def __post_init__(self) -> None:
        """Validate horizons, weights and constraint sets."""
        if self.t_ini < 1 or self.n_horizon < 1:
            raise ContractViolationError(f"horizons must be positive, instead got t_ini={self.t_ini}, "
                                         f"n_horizon={self.n_horizon}")
        for name in ("q", "r", "lambda_y"):
            weight = getattr(self, name)
            if not np.isscalar(weight):
                object.__setattr__(self, name, _freeze(weight))
            self.weight(name)
        check_positive("sigma_bar", self.sigma_bar)
        check_positive("nmpc_r", self.nmpc_r)
        if not self.du_min < 0 < self.du_max:
            raise ContractViolationError(f"increment bounds must straddle zero, instead got [{self.du_min}, "
                                         f"{self.du_max}]")
        if not self.y_min < self.y_max:
            raise ContractViolationError(f"output bounds must be increasing, instead got [{self.y_min}, {self.y_max}]")
        if not self.u_min < self.u_max:
            raise ContractViolationError(f"input bounds must be increasing, instead got [{self.u_min}, {self.u_max}]")
        if self.nmpc_iterations < 1:
            raise ContractViolationError("the baseline needs at least one linearization iteration")

    def weight(self, name: str, channels: int = 1) -> np.ndarray:
        """Weight matrix `q`, `r` or `lambda_y` over a horizon of `channels`-dimensional signals."""
        return weight_matrix(name, getattr(self, name), channels * self.n_horizon, channels)


@dataclass(frozen=True, eq=False)
class StepRecord:
    """Log entry of one controller step.

    `status` is the QP status, `"warmup"` while the controller is still filling its measurement buffer, or `"diverged"`
    when a model rollout blew up before any QP was set up.
    """

    u_applied: float
    delta_u_first: float
    predicted_y: np.ndarray
    optimal_cost: float
    status: str
    slack_norm: float = 0.0
    iterations: int = 0
    solution: Optional[QPSolution] = field(default=None, repr=False)

    @property
    def feasible(self) -> bool:
        """Whether the step was solved to optimality."""
        return self.status == "optimal"


class Controller(ABC):
    """Generic abstract receding-horizon controller for single-input single-output plants.

    A controller owns its mutable state and must be stepped strictly sequentially: step `k` receives the output
    `y(k)`, the reference preview `y_r(k + 1), ..., y_r(k + N)` and, for model-based controllers, the true state.
    """

    name: str
    config: ControllerConfig

    def __init__(self, config: ControllerConfig) -> None:
        """Initialize a generic controller."""
        self.config = config

    @abstractmethod
    def reset(self, u_prev: float = 0.0) -> None:
        """Forget all history, assuming the input `u_prev` was applied just before the first step."""
        ...

    @abstractmethod
    def step(self, y_k: float, y_ref: np.ndarray, x_k: Optional[np.ndarray] = None) -> Tuple[float, StepRecord]:
        """Compute the input to apply at the current step."""
        ...
