"""Kernelized data-driven predictive controller with integral action through input increments.

At every step the controller measures `y(k)`, compares its last `t_ini` increment/output pairs to the past windows of
the training data, and solves

    minimize    |y_hat - y_r|_Q^2 + |du|_R^2 + |s|_Lambda^2
    subject to  y_hat = P1 k_p + P2 du + s,  y_hat in [y_min, y_max],
                du in [du_min, du_max],  |s|_inf <= sigma_bar

over the future increments `du` and the output slack `s`; the first increment is added to the previous input.
"""

import logging
from collections import deque
from dataclasses import dataclass, field
from typing import Deque, Optional, Tuple

import numpy as np  # type: ignore

from kdpc.controllers._controller import Controller, ControllerConfig, StepRecord
from kdpc.predictors import Predictors
from kdpc.solvers import AdmmSolver, QPProblem, QPSolution, QPSolver
from kdpc.utils.checks import ContractViolationError, DimensionMismatchError, NotWarmError

log = logging.getLogger(__name__)
log.addHandler(logging.NullHandler())


@dataclass
class ControllerState:
    """Previous input and the last `t_ini` pairs `(du(k - 1), y(k))`, oldest first.

    The increment that precedes the very first measurement is taken to be zero.
    """

    t_ini: int
    u_prev: float = 0.0
    last_delta_u: float = 0.0
    buffer: Deque[Tuple[float, float]] = field(default_factory=deque)

    def __post_init__(self) -> None:
        """Bound the buffer to `t_ini` pairs."""
        self.buffer = deque(self.buffer, maxlen=self.t_ini)

    @property
    def warm(self) -> bool:
        """Whether the buffer holds a full past window."""
        return len(self.buffer) == self.t_ini

    def push(self, y_k: float) -> None:
        """Record a new output, paired with the increment that preceded it."""
        self.buffer.append((self.last_delta_u, float(y_k)))

    def apply(self, delta_u: float) -> float:
        """Apply an increment and return the resulting absolute input."""
        self.last_delta_u = float(delta_u)
        self.u_prev = self.u_prev + self.last_delta_u
        return self.u_prev


def build_z_ini(state: ControllerState) -> np.ndarray:
    """Stack the buffer as `[du_ini; y_ini]`, oldest first, in the layout of the dataset past windows."""
    if not state.warm:
        raise NotWarmError(f"buffer holds {len(state.buffer)} of {state.t_ini} pairs")
    pairs = np.array(state.buffer, dtype=np.float64)
    return np.concatenate([pairs[:, 0], pairs[:, 1]])


def build_kdpc_qp(k_p_ini: np.ndarray, y_ref: np.ndarray, p: Predictors,
                  cfg: ControllerConfig) -> Tuple[QPProblem, float]:
    """Quadratic program over `[du; s]` for one step, with the constant cost term dropped from its objective."""
    n_du, n_s = p.n_u * p.n_horizon, p.n_y * p.n_horizon
    y_ref = np.ravel(y_ref).astype(np.float64)
    if y_ref.size != n_s:
        raise DimensionMismatchError(f"reference preview must have {n_s} entries, instead got {y_ref.size}")

    q = cfg.weight("q", p.n_y)
    r = cfg.weight("r", p.n_u)
    lambda_y = cfg.weight("lambda_y", p.n_y)
    free = p.p1 @ k_p_ini
    offset = free - y_ref
    q_p2 = q @ p.p2

    h = 2.0 * np.block([[p.p2.T @ q_p2 + r, q_p2.T], [q_p2, q + lambda_y]])
    g = 2.0 * np.concatenate([q_p2.T @ offset, q @ offset])
    a_ineq = np.block([[p.p2, np.eye(n_s)], [-p.p2, -np.eye(n_s)]])
    b_ineq = np.concatenate([cfg.y_max - free, free - cfg.y_min])
    lb = np.concatenate([np.full(n_du, cfg.du_min), np.full(n_s, -cfg.sigma_bar)])
    ub = np.concatenate([np.full(n_du, cfg.du_max), np.full(n_s, cfg.sigma_bar)])

    problem = QPProblem(h=0.5 * (h + h.T), g=g, a_ineq=a_ineq, b_ineq=b_ineq, lb=lb, ub=ub)
    return problem, float(offset @ q @ offset)


def kdpc_step(state: ControllerState, y_k: float, y_ref: np.ndarray, p: Predictors, cfg: ControllerConfig,
              qp_solver: QPSolver, warm_start: Optional[QPSolution] = None) -> Tuple[float, StepRecord]:
    """Run one step of the controller on a buffer that is warm once `y_k` is recorded.

    If the QP is not solved to optimality the previous input is held.
    """
    if len(state.buffer) + 1 < state.t_ini:
        raise NotWarmError(f"buffer holds {len(state.buffer)} of {state.t_ini} pairs before this step")
    state.push(y_k)
    k_p_ini = p.similarity(build_z_ini(state))
    problem, constant = build_kdpc_qp(k_p_ini, y_ref, p, cfg)
    solution = qp_solver.solve(problem, warm_start)

    n_du = p.n_u * p.n_horizon
    if not solution.optimal:
        log.warning("KDPC QP returned `%s`, holding the input at %.6g", solution.status.value, state.u_prev)
        u_k = state.apply(0.0)
        return u_k, StepRecord(u_applied=u_k, delta_u_first=0.0, predicted_y=p.p1 @ k_p_ini,
                               optimal_cost=float("nan"), status=solution.status.value,
                               iterations=solution.iterations, solution=solution)

    delta_u, slack = solution.z[:n_du], solution.z[n_du:]
    delta_u_first = float(delta_u[0])
    u_k = state.apply(delta_u_first)
    return u_k, StepRecord(u_applied=u_k, delta_u_first=delta_u_first,
                           predicted_y=p.p1 @ k_p_ini + p.p2 @ delta_u + slack,
                           optimal_cost=solution.objective + constant, status=solution.status.value,
                           slack_norm=float(np.max(np.abs(slack), initial=0.0)), iterations=solution.iterations,
                           solution=solution)


class KdpcController(Controller):
    """Receding-horizon controller on fitted kernel predictors.

    During the first `t_ini - 1` steps the buffer is still filling and zero increments are applied.
    """

    name = "kdpc"

    predictors: Predictors
    solver: QPSolver
    state: ControllerState

    _last_solution: Optional[QPSolution]

    def __init__(self, predictors: Predictors, config: ControllerConfig, solver: Optional[QPSolver] = None) -> None:
        """Initialize the controller from fitted predictors with matching horizons."""
        super().__init__(config)
        if (predictors.t_ini, predictors.n_horizon) != (config.t_ini, config.n_horizon):
            raise ContractViolationError(f"predictors were fitted for t_ini={predictors.t_ini}, "
                                         f"n_horizon={predictors.n_horizon} but the controller uses "
                                         f"t_ini={config.t_ini}, n_horizon={config.n_horizon}")
        if (predictors.n_u, predictors.n_y) != (1, 1):
            raise ContractViolationError("the controller drives single-input single-output plants")
        self.predictors = predictors
        self.solver = solver if solver is not None else AdmmSolver()
        self.reset()

    def reset(self, u_prev: float = 0.0) -> None:
        """Empty the buffer and forget the previous solution."""
        self.state = ControllerState(t_ini=self.config.t_ini, u_prev=float(u_prev))
        self._last_solution = None

    def step(self, y_k: float, y_ref: np.ndarray, x_k: Optional[np.ndarray] = None) -> Tuple[float, StepRecord]:
        """Measure `y_k` and return the next input; the plant state is not used."""
        if len(self.state.buffer) + 1 < self.state.t_ini:
            self.state.push(y_k)
            u_k = self.state.apply(0.0)
            return u_k, StepRecord(u_applied=u_k, delta_u_first=0.0, predicted_y=np.zeros(0),
                                   optimal_cost=float("nan"), status="warmup")

        u_k, record = kdpc_step(self.state, y_k, y_ref, self.predictors, self.config, self.solver,
                                self._last_solution)
        self._last_solution = record.solution if record.feasible else None
        return u_k, record
