"""Interface for arbitrary discrete-time single-input single-output plants."""

from abc import ABC, abstractmethod
from typing import Any, Dict, Optional, Sequence, Tuple

import numpy as np  # type: ignore
from gymnasium import Env  # type: ignore
from gymnasium.spaces import Box  # type: ignore

from kdpc.plants.disturbances import Channel, DisturbanceSchedule
from kdpc.structs import Trajectory, array
from kdpc.utils.checks import SimulationDivergedError, check_finite, check_input


class Plant(Env, ABC):
    """Generic abstract discrete-time plant with injectable disturbances.

    This abstraction provides two views on the same dynamics:
        1. a pure model view (`transition`, `observe`, `jacobians`, ...) used by data collection and model-based
           controllers, and
        2. a stateful `gymnasium.Env` view (`reset`, `step`) used to close the loop in experiments.
    Both views advance through `advance`, so a simulated trajectory and a closed-loop run with the same inputs produce
    bit-identical outputs.

    Step `k` applies the input with the input disturbance active at `t_k = k * ts` and returns the output at `t_{k+1}`
    with the output disturbance active at that time.
    """

    metadata = {"render_modes": []}

    ts: float
    schedule: DisturbanceSchedule

    _x: Optional[np.ndarray]
    _k: int

    def __init__(self, ts: float, schedule: Optional[DisturbanceSchedule] = None) -> None:
        """Initialize a generic plant with a sampling time and an optional disturbance schedule."""
        super().__init__()
        self.ts = ts
        self.schedule = schedule if schedule is not None else DisturbanceSchedule()
        self.action_space = Box(low=-np.inf, high=np.inf, shape=(1,), dtype=np.float64)
        self.observation_space = Box(low=-np.inf, high=np.inf, shape=(1,), dtype=np.float64)

        self._x = None
        self._k = 0

    @property
    @abstractmethod
    def state_size(self) -> int:
        """Dimension of the plant state."""
        ...

    @abstractmethod
    def transition(self, x: np.ndarray, u: float, d_in: float = 0.0) -> np.ndarray:
        """Compute the successor state under an input and an input disturbance."""
        ...

    @abstractmethod
    def observe(self, x: np.ndarray, d_out: float = 0.0) -> float:
        """Compute the measured output of a state under an output disturbance."""
        ...

    @abstractmethod
    def jacobians(self, x: np.ndarray, u: float) -> Tuple[np.ndarray, np.ndarray]:
        """Compute the state and input Jacobians of `transition` at a state and input (no disturbance)."""
        ...

    @abstractmethod
    def output_matrix(self) -> np.ndarray:
        """Row matrix mapping the state to the undisturbed output."""
        ...

    @abstractmethod
    def equilibrium(self, u: float) -> np.ndarray:
        """Equilibrium state held by a constant input."""
        ...

    @abstractmethod
    def steady_input(self, y: float) -> float:
        """Constant input whose equilibrium produces the given output."""
        ...

    @property
    def time(self) -> float:
        """Time of the most recent output of the environment view."""
        return self._k * self.ts

    @property
    def state(self) -> np.ndarray:
        """Current state of the environment view."""
        if self._x is None:
            raise ValueError("plant must be reset before its state can be read")
        return self._x.copy()

    def advance(self, x: np.ndarray, u: float, k: int) -> Tuple[np.ndarray, float]:
        """Apply input `u` at step `k` from state `x`, returning the successor state and the output it produces."""
        try:
            x_next = self.transition(x, u, self.schedule.value_at(k * self.ts, Channel.INPUT))
        except SimulationDivergedError as error:
            raise SimulationDivergedError(f"plant state diverged at step {k}", step=k) from error
        y_next = self.observe(x_next, self.schedule.value_at((k + 1) * self.ts, Channel.OUTPUT))
        if not (np.all(np.isfinite(x_next)) and np.isfinite(y_next)):
            raise SimulationDivergedError(f"plant state diverged at step {k}", step=k)
        return x_next, y_next

    def simulate(self, x0: Sequence[float], inputs: Sequence[float]) -> Trajectory:
        """Simulate the plant open-loop from `x0` under a sequence of inputs."""
        inputs = array(inputs).reshape(-1)
        check_finite("inputs", inputs)
        x = array(x0).copy()
        states = np.empty((inputs.size, self.state_size))
        outputs = np.empty(inputs.size)
        for k, u in enumerate(inputs):
            x, outputs[k] = self.advance(x, float(u), k)
            states[k] = x
        return Trajectory(u=inputs, y=outputs, x=states)

    def reset(self, *, seed: Optional[int] = None,
              options: Optional[Dict[str, Any]] = None) -> Tuple[np.ndarray, Dict[str, Any]]:
        """Reset the environment view to `options["state"]` (the origin by default) and return the first output."""
        super().reset(seed=seed)
        options = options or {}
        x0 = options.get("state")
        self._x = np.zeros(self.state_size) if x0 is None else array(x0).copy()
        self._k = 0
        y = self.observe(self._x, self.schedule.value_at(0.0, Channel.OUTPUT))
        return np.array([y]), {"state": self._x.copy(), "time": 0.0}

    def step(self, action: np.ndarray) -> Tuple[np.ndarray, float, bool, bool, Dict[str, Any]]:
        """Apply one input and return the next output.

        The reward is unused by this library and always zero; episodes never terminate on their own.
        """
        if self._x is None:
            raise ValueError("plant must be reset before it can be stepped")
        action = np.atleast_1d(array(action))
        check_input(self.action_space, action)
        self._x, y = self.advance(self._x, float(action[0]), self._k)
        self._k += 1
        return np.array([y]), 0.0, False, False, {"state": self._x.copy(), "time": self.time}
