"""Model-based NMPC baseline by successive linearization.

The baseline knows the exact plant model and the true state but has no disturbance model and no integral action, so
constant disturbances leave a steady-state offset.
"""

import logging
from typing import Optional, Tuple, Union

import numpy as np  # type: ignore

from kdpc.controllers._controller import Controller, ControllerConfig, StepRecord
from kdpc.plants import Plant, PlantState, VanDerPolPlant, VdpParams
from kdpc.solvers import AdmmSolver, QPProblem, QPSolution, QPSolver
from kdpc.utils.checks import ContractViolationError, DimensionMismatchError, SimulationDivergedError

log = logging.getLogger(__name__)
log.addHandler(logging.NullHandler())

Model = Union[Plant, VdpParams]


def _rollout(model: Plant, x_k: np.ndarray, inputs: np.ndarray) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Nominal outputs `y(k + 1 .. k + N)` along an input sequence and the output sensitivities to each input."""
    n_horizon = inputs.size
    c = model.output_matrix()
    states = [x_k]
    for u in inputs:
        states.append(model.transition(states[-1], float(u)))
    jacobians = [model.jacobians(states[i], float(inputs[i])) for i in range(n_horizon)]

    # sensitivity[i, j] = C A_i ... A_{j+1} B_j for j <= i
    sensitivity = np.zeros((n_horizon, n_horizon))
    for j in range(n_horizon):
        direction = jacobians[j][1][:, 0]
        for i in range(j, n_horizon):
            if i > j:
                direction = jacobians[i][0] @ direction
            sensitivity[i, j] = c[0] @ direction
    outputs = np.array([float(c[0] @ x) for x in states[1:]])
    return outputs, sensitivity, np.array(states)


def build_nmpc_qp(outputs: np.ndarray, sensitivity: np.ndarray, nominal: np.ndarray, y_ref: np.ndarray,
                  u_steady: np.ndarray, cfg: ControllerConfig) -> Tuple[QPProblem, float]:
    """Quadratic program over absolute inputs for the model linearized along `nominal`."""
    q = cfg.weight("q")
    free = outputs - sensitivity @ nominal
    offset = free - y_ref
    q_g = q @ sensitivity
    h = 2.0 * (sensitivity.T @ q_g + cfg.nmpc_r * np.eye(nominal.size))
    g = 2.0 * (q_g.T @ offset - cfg.nmpc_r * u_steady)
    problem = QPProblem(h=0.5 * (h + h.T), g=g,
                        a_ineq=np.vstack([sensitivity, -sensitivity]),
                        b_ineq=np.concatenate([cfg.y_max - free, free - cfg.y_min]),
                        lb=np.full(nominal.size, cfg.u_min), ub=np.full(nominal.size, cfg.u_max))
    return problem, float(offset @ q @ offset + cfg.nmpc_r * u_steady @ u_steady)


def nmpc_step(x_k: Union[PlantState, np.ndarray], y_ref: np.ndarray, model: Model, cfg: ControllerConfig,
              qp_solver: QPSolver, u_prev: float = 0.0,
              u_guess: Optional[np.ndarray] = None) -> Tuple[float, StepRecord]:
    """Run one step of the baseline from the true state `x_k`.

    The model is linearized along the rollout of `u_guess` (by default `u_prev` held over the horizon) and the
    linearization is refined along each new solution up to `cfg.nmpc_iterations` times. If a QP is not solved to
    optimality or the rollout diverges, the previous input is held.
    """
    model = VanDerPolPlant(model) if isinstance(model, VdpParams) else model
    x_k = x_k.as_array() if isinstance(x_k, PlantState) else np.asarray(x_k, dtype=np.float64)
    y_ref = np.ravel(y_ref).astype(np.float64)
    if y_ref.size != cfg.n_horizon:
        raise DimensionMismatchError(f"reference preview must have {cfg.n_horizon} entries, instead got {y_ref.size}")
    nominal = np.full(cfg.n_horizon, float(u_prev)) if u_guess is None else np.ravel(u_guess).astype(np.float64)
    nominal = np.clip(nominal, cfg.u_min, cfg.u_max)
    u_steady = np.array([model.steady_input(r) for r in y_ref])

    solution: Optional[QPSolution] = None
    for _ in range(cfg.nmpc_iterations):
        try:
            outputs, sensitivity, _ = _rollout(model, x_k, nominal)
        except SimulationDivergedError:
            log.warning("NMPC rollout diverged, holding the input at %.6g", u_prev)
            return float(u_prev), StepRecord(u_applied=float(u_prev), delta_u_first=0.0, predicted_y=np.zeros(0),
                                             optimal_cost=float("nan"), status="diverged")
        problem, constant = build_nmpc_qp(outputs, sensitivity, nominal, y_ref, u_steady, cfg)
        solution = qp_solver.solve(problem, solution)
        if not solution.optimal:
            log.warning("NMPC QP returned `%s`, holding the input at %.6g", solution.status.value, u_prev)
            return float(u_prev), StepRecord(u_applied=float(u_prev), delta_u_first=0.0, predicted_y=outputs,
                                             optimal_cost=float("nan"), status=solution.status.value,
                                             iterations=solution.iterations, solution=solution)
        predicted = outputs + sensitivity @ (solution.z - nominal)
        cost = solution.objective + constant
        nominal = solution.z

    u_k = float(nominal[0])
    return u_k, StepRecord(u_applied=u_k, delta_u_first=u_k - float(u_prev), predicted_y=predicted,
                           optimal_cost=cost, status=solution.status.value, iterations=solution.iterations,
                           solution=solution)


class NmpcController(Controller):
    """Successive-linearization NMPC that is handed the true plant state at every step."""

    name = "nmpc"

    model: Plant
    solver: QPSolver
    u_prev: float

    _plan: Optional[np.ndarray]

    def __init__(self, model: Model, config: ControllerConfig, solver: Optional[QPSolver] = None) -> None:
        """Initialize the baseline from a plant model."""
        super().__init__(config)
        self.model = VanDerPolPlant(model) if isinstance(model, VdpParams) else model
        self.solver = solver if solver is not None else AdmmSolver()
        self.reset()

    def reset(self, u_prev: float = 0.0) -> None:
        """Forget the previous plan."""
        self.u_prev = float(u_prev)
        self._plan = None

    def step(self, y_k: float, y_ref: np.ndarray, x_k: Optional[np.ndarray] = None) -> Tuple[float, StepRecord]:
        """Return the next input from the true state; the measured output is not used."""
        if x_k is None:
            raise ContractViolationError("the NMPC baseline needs the true plant state")
        # previous plan shifted by one step, its last input repeated
        guess = None if self._plan is None else np.append(self._plan[1:], self._plan[-1])
        u_k, record = nmpc_step(x_k, y_ref, self.model, self.config, self.solver, self.u_prev, guess)
        self._plan = record.solution.z.copy() if record.feasible and record.solution is not None else None
        self.u_prev = u_k
        return u_k, record
