"""Discrete-time (forward Euler) Van der Pol oscillator used as the benchmark plant."""

from dataclasses import dataclass
from typing import Optional, Sequence, Tuple

import numpy as np  # type: ignore

from kdpc.plants._plant import Plant
from kdpc.plants.disturbances import DisturbanceSchedule
from kdpc.structs import Trajectory, array
from kdpc.utils.checks import SimulationDivergedError, check_finite, check_positive


@dataclass(frozen=True)
class VdpParams:
    """Parameters of the discretized Van der Pol oscillator."""

    mu_vdp: float = 1.0
    ts: float = 0.05

    def __post_init__(self) -> None:
        """Validate the sampling time."""
        check_positive("ts", self.ts)
        check_finite("mu_vdp", self.mu_vdp)


@dataclass(frozen=True)
class PlantState:
    """State `(x1, x2)` of the Van der Pol oscillator; the undisturbed output is `x1`."""

    x1: float
    x2: float

    def __post_init__(self) -> None:
        """Reject non-finite states."""
        if not (np.isfinite(self.x1) and np.isfinite(self.x2)):
            raise SimulationDivergedError(f"non-finite plant state ({self.x1}, {self.x2})")

    def as_array(self) -> np.ndarray:
        """State as a length-2 array."""
        return np.array([self.x1, self.x2], dtype=np.float64)

    @staticmethod
    def from_array(x: Sequence[float]) -> "PlantState":
        """State from a length-2 array."""
        x1, x2 = array(x)
        return PlantState(float(x1), float(x2))


def vdp_step(x: PlantState, u: float, d_in: float, p: VdpParams) -> PlantState:
    """Advance the oscillator by one sampling period under input `u` and input disturbance `d_in`."""
    check_finite("u", u)
    check_finite("d_in", d_in)
    ts, x1, x2 = p.ts, x.x1, x.x2
    # `x1 * x1` rather than `x1 ** 2`: float powers raise on overflow while products saturate to inf.
    x1_next = x1 + ts * x2
    x2_next = -ts * x1 + x2 + ts * u + ts * p.mu_vdp * (1.0 - x1 * x1) * x2 + ts * d_in
    return PlantState(x1_next, x2_next)


def measure(x: PlantState, d_out: float) -> float:
    """Measured output of a state under an additive output disturbance."""
    return x.x1 + d_out


class VanDerPolPlant(Plant):
    """Van der Pol oscillator with input and output disturbances injected from a schedule."""

    params: VdpParams

    def __init__(self, params: Optional[VdpParams] = None, schedule: Optional[DisturbanceSchedule] = None) -> None:
        """Initialize the oscillator from its parameters and an optional disturbance schedule."""
        self.params = params if params is not None else VdpParams()
        super().__init__(self.params.ts, schedule)

    @property
    def state_size(self) -> int:
        """Van der Pol has a two-dimensional state."""
        return 2

    def transition(self, x: np.ndarray, u: float, d_in: float = 0.0) -> np.ndarray:
        """Forward-Euler Van der Pol map."""
        return vdp_step(PlantState.from_array(x), u, d_in, self.params).as_array()

    def observe(self, x: np.ndarray, d_out: float = 0.0) -> float:
        """First state plus the output disturbance."""
        return measure(PlantState.from_array(x), d_out)

    def jacobians(self, x: np.ndarray, u: float) -> Tuple[np.ndarray, np.ndarray]:
        """Analytic Jacobians of the Euler map; the input enters affinely."""
        ts, mu_vdp = self.params.ts, self.params.mu_vdp
        x1, x2 = array(x)
        a = np.array([[1.0, ts],
                      [-ts - 2.0 * ts * mu_vdp * x1 * x2, 1.0 + ts * mu_vdp * (1.0 - x1 * x1)]])
        b = np.array([[0.0], [ts]])
        return a, b

    def output_matrix(self) -> np.ndarray:
        """The output reads the first state."""
        return np.array([[1.0, 0.0]])

    def equilibrium(self, u: float) -> np.ndarray:
        """A constant input `u` holds the oscillator at `(u, 0)`."""
        return np.array([u, 0.0], dtype=np.float64)

    def steady_input(self, y: float) -> float:
        """The equilibrium output equals the input that holds it."""
        return float(y)


def simulate(x0: PlantState, inputs: Sequence[float], dist: Optional[DisturbanceSchedule] = None,
             p: Optional[VdpParams] = None) -> Trajectory:
    """Simulate the oscillator open-loop from `x0`, the output of step `k` responding to `inputs[k]`."""
    return VanDerPolPlant(p, dist).simulate(x0.as_array(), inputs)
