"""Closed-loop simulation of controllers on the benchmark plant."""

import logging
from dataclasses import dataclass, field
from typing import Dict, List, Optional

import numpy as np  # type: ignore

from kdpc.controllers import Controller, ControllerConfig, KdpcController, NmpcController
from kdpc.experiments.scenarios import Scenario
from kdpc.plants import Channel, VanDerPolPlant, VdpParams
from kdpc.predictors import Predictors
from kdpc.solvers import AdmmSolver, AdmmSolverSettings
from kdpc.utils.checks import ContractViolationError, SimulationDivergedError

log = logging.getLogger(__name__)
log.addHandler(logging.NullHandler())


@dataclass(eq=False)
class ControllerSeries:
    """Per-step log of one controller on one scenario.

    Row `k` holds the output `y(k)` measured at `t_k`, the reference and disturbance at `t_k` and the input applied at
    `t_k` in response. If the plant diverged, `diverged_at` is the step whose input caused it and the series stops
    there.
    """

    controller: str
    t: List[float] = field(default_factory=list)
    y: List[float] = field(default_factory=list)
    y_ref: List[float] = field(default_factory=list)
    u: List[float] = field(default_factory=list)
    delta_u: List[float] = field(default_factory=list)
    d: List[float] = field(default_factory=list)
    cost: List[float] = field(default_factory=list)
    status: List[str] = field(default_factory=list)
    diverged_at: Optional[int] = None

    def __len__(self) -> int:
        """Number of recorded steps."""
        return len(self.t)

    def array(self, name: str) -> np.ndarray:
        """One numeric column as an array."""
        return np.asarray(getattr(self, name), dtype=np.float64)

    @property
    def error(self) -> np.ndarray:
        """Tracking error `y - y_ref` at every step."""
        return self.array("y") - self.array("y_ref")


@dataclass(eq=False)
class ExperimentResult:
    """Aligned time series of every controller run on one scenario."""

    scenario: Scenario
    ts: float
    series: Dict[str, ControllerSeries] = field(default_factory=dict)

    @property
    def diverged(self) -> bool:
        """Whether any controller drove the plant to divergence."""
        return any(series.diverged_at is not None for series in self.series.values())


def make_controller(name: str, predictors: Optional[Predictors], cfg: ControllerConfig, params: VdpParams,
                    solver_settings: Optional[AdmmSolverSettings] = None) -> Controller:
    """Build a controller by name with its own solver instance."""
    solver = AdmmSolver(solver_settings)
    if name == "kdpc":
        if predictors is None:
            raise ContractViolationError("the kdpc controller needs fitted predictors")
        return KdpcController(predictors, cfg, solver)
    if name == "nmpc":
        return NmpcController(params, cfg, solver)
    raise ContractViolationError(f"unknown controller `{name}`")


def run_controller(controller: Controller, scenario: Scenario, params: VdpParams) -> ControllerSeries:
    """Close the loop between one controller and a fresh plant carrying the scenario disturbance."""
    plant = VanDerPolPlant(params, scenario.disturbance)
    series = ControllerSeries(controller=controller.name)
    observation, _ = plant.reset(options={"state": scenario.x0})
    controller.reset(scenario.u0)
    y_k = float(observation[0])
    n_horizon = controller.config.n_horizon

    for k in range(scenario.steps(params.ts)):
        t_k = k * params.ts
        u_k, record = controller.step(y_k, scenario.reference.preview(k, n_horizon, params.ts), plant.state)
        if record.status not in ("optimal", "warmup"):
            log.warning("%s on `%s`: step %d returned `%s`", controller.name, scenario.name, k, record.status)
        series.t.append(t_k)
        series.y.append(y_k)
        series.y_ref.append(scenario.reference.value_at(t_k))
        series.u.append(u_k)
        series.delta_u.append(record.delta_u_first)
        series.d.append(scenario.disturbance.value_at(t_k, Channel.INPUT)
                        + scenario.disturbance.value_at(t_k, Channel.OUTPUT))
        series.cost.append(record.optimal_cost)
        series.status.append(record.status)
        try:
            observation, *_ = plant.step(np.array([u_k]))
        except SimulationDivergedError as error:
            log.error("%s on `%s`: plant diverged at step %d", controller.name, scenario.name, k)
            series.diverged_at = error.step if error.step >= 0 else k
            break
        y_k = float(observation[0])
    return series


def run_scenario(s: Scenario, p: Optional[Predictors], cfg: ControllerConfig, params: Optional[VdpParams] = None,
                 solver_settings: Optional[AdmmSolverSettings] = None) -> ExperimentResult:
    """Simulate every controller of a scenario in closed loop.

    A diverging run does not abort the others: its series ends at the divergence step.
    """
    if not s.controllers:
        raise ContractViolationError(f"scenario `{s.name}` requests no controllers")
    params = params if params is not None else VdpParams()
    result = ExperimentResult(scenario=s, ts=params.ts)
    for name in s.controllers:
        controller = make_controller(name, p, cfg, params, solver_settings)
        result.series[name] = run_controller(controller, s, params)
        log.info("ran %s on `%s` for %d steps", name, s.name, len(result.series[name]))
    return result
