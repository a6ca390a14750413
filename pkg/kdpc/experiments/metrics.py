"""Summary metrics of closed-loop runs."""

from dataclasses import asdict, dataclass
from typing import Dict, List, Tuple

import numpy as np  # type: ignore

from kdpc.experiments.runner import ControllerSeries, ExperimentResult
from kdpc.experiments.scenarios import Scenario
from kdpc.utils.checks import ContractViolationError

# Fraction of every constant segment, counted from its end, over which the steady-state error is averaged.
STEADY_STATE_WINDOW = 0.2
SETTLE_BAND = 0.02
SETTLE_BAND_FLOOR = 1e-3

_TIME_EPS = 1e-9


@dataclass(frozen=True)
class Metrics:
    """Tracking quality of one controller on one scenario.

    `segment_errors[i]` is the mean absolute error over the last 20% of the `i`-th segment on which both the
    reference and the disturbances are constant; `steady_state_error` is the largest of them. `max_overshoot` and
    `settle_time` are measured from the first reference change to the next switch of any schedule.
    """

    rms_error: float
    steady_state_error: float
    max_overshoot: float
    settle_time: float
    feasible_fraction: float
    segment_errors: Tuple[float, ...] = ()

    def as_dict(self) -> dict:
        """Plain representation for YAML reports."""
        data = asdict(self)
        data["segment_errors"] = list(self.segment_errors)
        return data


def _index(time: float, ts: float) -> int:
    return int(np.ceil(time / ts - _TIME_EPS))


def segments(scenario: Scenario, ts: float, steps: int) -> List[Tuple[int, int]]:
    """Step ranges `[start, end)` over which the reference and the disturbances are constant."""
    cuts = sorted({0, steps} | {min(_index(time, ts), steps) for time in scenario.breakpoints()})
    return [(start, end) for start, end in zip(cuts, cuts[1:]) if end > start]


def _step_window(scenario: Scenario, ts: float, steps: int) -> Tuple[int, int, float, float]:
    """Steps from the first reference change to the next breakpoint, with the reference step size and new level."""
    change = scenario.reference.breakpoints[0]
    start = min(_index(change, ts), steps)
    later = [time for time in scenario.breakpoints() if time > change + _TIME_EPS]
    end = min(_index(later[0], ts), steps) if later else steps
    before, after = scenario.reference.values[0], scenario.reference.values[1]
    return start, end, after - before, after


def series_metrics(series: ControllerSeries, scenario: Scenario, ts: float) -> Metrics:
    """Metrics of one recorded series."""
    steps = len(series)
    if not steps:
        raise ContractViolationError(f"{series.controller} on `{scenario.name}` recorded no steps")
    error = series.error
    y = series.array("y")

    segment_errors = []
    for start, end in segments(scenario, ts, steps):
        tail = max(1, int(round(STEADY_STATE_WINDOW * (end - start))))
        segment_errors.append(float(np.mean(np.abs(error[end - tail:end]))))

    overshoot, settle_time = 0.0, 0.0
    if scenario.reference.breakpoints:
        start, end, step, level = _step_window(scenario, ts, steps)
        if end > start:
            direction = np.sign(step) if step else 1.0
            overshoot = float(max(0.0, np.max(direction * (y[start:end] - level))))
            band = max(SETTLE_BAND * abs(step), SETTLE_BAND_FLOOR)
            outside = np.flatnonzero(np.abs(error[start:end]) > band)
            settle_time = 0.0 if not outside.size else float((outside[-1] + 1) * ts)

    statuses = [status for status in series.status if status != "warmup"]
    feasible = sum(status == "optimal" for status in statuses) / len(statuses) if statuses else 1.0

    return Metrics(rms_error=float(np.sqrt(np.mean(error ** 2))), steady_state_error=max(segment_errors),
                   max_overshoot=overshoot, settle_time=settle_time, feasible_fraction=float(feasible),
                   segment_errors=tuple(segment_errors))


def compute_metrics(r: ExperimentResult) -> Dict[str, Metrics]:
    """Metrics of every controller of a result."""
    if not r.series:
        raise ContractViolationError(f"result of `{r.scenario.name}` holds no series")
    return {name: series_metrics(series, r.scenario, r.ts) for name, series in r.series.items()}
