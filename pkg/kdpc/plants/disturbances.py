"""Piecewise-constant disturbance schedules injected on the input or output channel of a plant."""

from dataclasses import dataclass
from enum import Enum
from typing import Tuple

import numpy as np  # type: ignore

# Schedule boundaries are compared against `k * ts`, which is only accurate to round-off.
_TIME_EPS = 1e-9


class Channel(Enum):
    """Plant channel a disturbance enters through."""

    INPUT = "input"
    OUTPUT = "output"


@dataclass(frozen=True)
class DisturbancePulse:
    """Constant disturbance `value` active on the half-open interval `[t_start, t_end)` of one channel."""

    t_start: float
    t_end: float
    value: float
    channel: Channel = Channel.INPUT

    def __post_init__(self) -> None:
        """Validate the interval and coerce the channel from its string name."""
        object.__setattr__(self, "channel", Channel(self.channel))
        if not self.t_start < self.t_end:
            raise ValueError(f"disturbance must start before it ends, instead got [{self.t_start}, {self.t_end})")
        if not np.isfinite(self.value):
            raise ValueError("disturbance value must be finite")

    def active(self, time: float) -> bool:
        """Whether this pulse is active at the given time."""
        return self.t_start - _TIME_EPS <= time < self.t_end - _TIME_EPS


@dataclass(frozen=True)
class DisturbanceSchedule:
    """Collection of non-overlapping (per channel) disturbance pulses."""

    pulses: Tuple[DisturbancePulse, ...] = ()

    def __post_init__(self) -> None:
        """Check that pulses on the same channel never overlap."""
        object.__setattr__(self, "pulses", tuple(self.pulses))
        for channel in Channel:
            pulses = sorted((p for p in self.pulses if p.channel is channel), key=lambda p: p.t_start)
            for first, second in zip(pulses, pulses[1:]):
                if second.t_start < first.t_end:
                    raise ValueError(f"{channel.value} disturbances overlap at t = {second.t_start}")

    def value_at(self, time: float, channel: Channel) -> float:
        """Disturbance value on a channel at the given time, zero outside every pulse."""
        for pulse in self.pulses:
            if pulse.channel is channel and pulse.active(time):
                return pulse.value
        return 0.0

    def breakpoints(self) -> Tuple[float, ...]:
        """Sorted times at which any disturbance switches on or off."""
        return tuple(sorted({t for pulse in self.pulses for t in (pulse.t_start, pulse.t_end)}))
