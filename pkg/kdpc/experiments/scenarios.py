"""Closed-loop scenarios: reference schedules, disturbances and the controllers to compare on them."""

from bisect import bisect_right
from dataclasses import dataclass, field
from typing import Sequence, Tuple

import numpy as np  # type: ignore

from kdpc.plants import Channel, DisturbancePulse, DisturbanceSchedule
from kdpc.utils.checks import ContractViolationError

CONTROLLERS = ("kdpc", "nmpc")

_TIME_EPS = 1e-9


@dataclass(frozen=True)
class PiecewiseConstant:
    """Signal equal to `values[i]` between `breakpoints[i - 1]` (inclusive) and `breakpoints[i]` (exclusive)."""

    breakpoints: Tuple[float, ...] = ()
    values: Tuple[float, ...] = (0.0,)

    def __post_init__(self) -> None:
        """Validate the schedule."""
        object.__setattr__(self, "breakpoints", tuple(float(t) for t in self.breakpoints))
        object.__setattr__(self, "values", tuple(float(v) for v in self.values))
        if len(self.values) != len(self.breakpoints) + 1:
            raise ContractViolationError("a piecewise-constant signal needs one more value than breakpoints")
        if any(later <= earlier for earlier, later in zip(self.breakpoints, self.breakpoints[1:])):
            raise ContractViolationError("breakpoints must be strictly increasing")
        if not np.all(np.isfinite(self.values)):
            raise ContractViolationError("values must be finite")

    @staticmethod
    def step(time: float, before: float, after: float) -> "PiecewiseConstant":
        """Single step from `before` to `after` at `time`."""
        return PiecewiseConstant(breakpoints=(time,), values=(before, after))

    def value_at(self, time: float) -> float:
        """Value at a given time."""
        return self.values[bisect_right(self.breakpoints, time + _TIME_EPS)]

    def sample(self, times: Sequence[float]) -> np.ndarray:
        """Values at each of the given times."""
        return np.array([self.value_at(time) for time in times], dtype=np.float64)

    def preview(self, k: int, n_horizon: int, ts: float) -> np.ndarray:
        """Values at steps `k + 1, ..., k + n_horizon`; the last value holds beyond the final breakpoint."""
        return self.sample([(k + i) * ts for i in range(1, n_horizon + 1)])


def _default_reference() -> PiecewiseConstant:
    return PiecewiseConstant.step(5.0, 0.0, 1.0)


@dataclass(frozen=True)
class Scenario:
    """One closed-loop experiment, run once per requested controller from the same initial state."""

    name: str
    duration: float = 30.0
    reference: PiecewiseConstant = field(default_factory=_default_reference)
    disturbance: DisturbanceSchedule = field(default_factory=DisturbanceSchedule)
    controllers: Tuple[str, ...] = CONTROLLERS
    x0: Tuple[float, ...] = (0.0, 0.0)
    u0: float = 0.0

    def __post_init__(self) -> None:
        """Validate the scenario."""
        object.__setattr__(self, "controllers", tuple(self.controllers))
        object.__setattr__(self, "x0", tuple(float(x) for x in self.x0))
        if not self.duration > 0:
            raise ContractViolationError(f"scenario `{self.name}` must have a positive duration")
        unknown = set(self.controllers) - set(CONTROLLERS)
        if unknown:
            raise ContractViolationError(f"scenario `{self.name}` requests unknown controllers {sorted(unknown)}")
        times = self.reference.breakpoints + self.disturbance.breakpoints()
        if any(time < 0 or time > self.duration for time in times):
            raise ContractViolationError(f"scenario `{self.name}` has schedules reaching outside [0, {self.duration}]")

    def steps(self, ts: float) -> int:
        """Number of control steps in the scenario."""
        return int(round(self.duration / ts))

    def breakpoints(self) -> Tuple[float, ...]:
        """Sorted times at which the reference or a disturbance switches."""
        return tuple(sorted(set(self.reference.breakpoints) | set(self.disturbance.breakpoints())))


def default_scenarios(disturbance: float = 0.2, start: float = 10.0, end: float = 20.0) -> Tuple[Scenario, ...]:
    """The reference step with a disturbance pulse entering through the input and through the output."""
    return tuple(
        Scenario(name=f"{channel.value}_disturbance",
                 disturbance=DisturbanceSchedule((DisturbancePulse(start, end, disturbance, channel),)))
        for channel in (Channel.INPUT, Channel.OUTPUT)
    )
