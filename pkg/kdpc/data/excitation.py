"""Persistently exciting input signals and the data-collection runs built from them.

The experiment is made of short runs, each long enough for the windows it is harvested into:

* excitation runs start at the equilibrium of an operating level, random-walk through an optional lead-in and the past
  window, and then apply random future increments. Every run has an antithetic partner that shares its past (up to one
  small input pulse) and applies the negated future increments, so the future increments of the data are independent
  of the pasts they follow and their effect can be separated from the free response;
* rest runs hold an operating level, optionally with one small input pulse inside the past window, so that the data
  contains equilibrium windows and their immediate neighbourhood;
* with `mirror`, every run is repeated from the negated initial state under the negated inputs. For plants whose
  dynamics are odd (as the Van der Pol oscillator) this makes the dataset symmetric about the origin.
"""

import logging
from dataclasses import dataclass, replace
from typing import Iterator, List, Optional, Tuple

import numpy as np  # type: ignore

from kdpc.plants import Plant
from kdpc.structs import Trajectory
from kdpc.utils.checks import ContractViolationError

log = logging.getLogger(__name__)
log.addHandler(logging.NullHandler())

DEFAULT_LEVELS = (0.0, 0.25, 0.5, 0.75, 1.0, 1.25)

# initial state, absolute inputs and the number of leading samples that are simulated but not recorded
Run = Tuple[np.ndarray, np.ndarray, int]


@dataclass(frozen=True)
class ExcitationConfig:
    """Settings of the excitation experiment.

    Each recorded run has `length` samples; the increments of excitation runs are drawn by `generate_excitation`.
    `bursts` antithetic pairs of excitation runs are made per operating level, each preceded by a lead-in of up to
    `lead_in` unrecorded samples. `pulse` is the height of the input pulse that tells an antithetic partner and the
    pulsed rest runs apart from their unpulsed counterparts.
    """

    length: int = 26
    amplitude: float = 0.5
    hold_steps: int = 1
    seed: int = 0
    levels: Tuple[float, ...] = DEFAULT_LEVELS
    bursts: int = 12
    lead_in: int = 10
    pulse: float = 0.05
    mirror: bool = True
    rest_windows: bool = True
    stride: int = 1

    def __post_init__(self) -> None:
        """Validate the excitation settings."""
        object.__setattr__(self, "levels", tuple(float(level) for level in self.levels))
        if self.length < 0:
            raise ContractViolationError(f"excitation length must be non-negative, instead got {self.length}")
        if not self.amplitude >= 0:
            raise ContractViolationError(f"excitation amplitude must be non-negative, instead got {self.amplitude}")
        if self.hold_steps < 1:
            raise ContractViolationError(f"excitation hold must be at least one step, instead got {self.hold_steps}")
        if self.stride < 1:
            raise ContractViolationError(f"window stride must be at least one, instead got {self.stride}")
        if not self.levels:
            raise ContractViolationError("at least one operating level is required")
        if self.bursts < 0 or self.lead_in < 0:
            raise ContractViolationError(f"bursts and lead-in must be non-negative, instead got {self.bursts} "
                                         f"and {self.lead_in}")
        if not self.pulse >= 0:
            raise ContractViolationError(f"pulse height must be non-negative, instead got {self.pulse}")


def generate_excitation(cfg: ExcitationConfig, rng: Optional[np.random.Generator] = None) -> np.ndarray:
    """Generate a piecewise-constant uniform random signal of `cfg.length` samples.

    The generator is seeded from `cfg.seed` unless an explicit one is given.
    """
    rng = rng if rng is not None else np.random.default_rng(cfg.seed)
    holds = -(-cfg.length // cfg.hold_steps)
    values = rng.uniform(-cfg.amplitude, cfg.amplitude, size=holds)
    return np.repeat(values, cfg.hold_steps)[:cfg.length]


def _increments(cfg: ExcitationConfig, length: int, rng: np.random.Generator) -> np.ndarray:
    # random hold phase, so that no window position always falls on a hold boundary
    phase = int(rng.integers(cfg.hold_steps))
    return generate_excitation(replace(cfg, length=length + phase), rng)[phase:]


def _antithetic_runs(plant: Plant, cfg: ExcitationConfig, level: float, n_horizon: int,
                     rng: np.random.Generator) -> Iterator[Run]:
    lead = int(rng.integers(cfg.lead_in + 1))
    prefix = level + np.cumsum(_increments(cfg, lead + cfg.length - n_horizon, rng))
    future = np.cumsum(_increments(cfg, n_horizon, rng))
    x0 = plant.equilibrium(level)

    yield x0, np.concatenate([prefix, prefix[-1] + future]), lead
    partner = prefix.copy()
    # the pulse sits on the second recorded sample, inside the past of the first window
    partner[lead + 1] += cfg.pulse
    yield x0, np.concatenate([partner, partner[-1] - future]), lead


def _rest_runs(plant: Plant, cfg: ExcitationConfig, level: float, t_ini: int) -> Iterator[Run]:
    x0 = plant.equilibrium(level)
    yield x0, np.full(cfg.length, level), 0
    if cfg.pulse > 0:
        for position in range(1, t_ini):
            inputs = np.full(cfg.length, level)
            inputs[position] += cfg.pulse
            yield x0, inputs, 0


def _record(plant: Plant, run: Run) -> Trajectory:
    x0, inputs, lead = run
    trajectory = plant.simulate(x0, inputs)
    return Trajectory(u=trajectory.u[lead:], y=trajectory.y[lead:], x=trajectory.x[lead:])


def collect_trajectories(plant: Plant, cfg: ExcitationConfig, t_ini: int, n_horizon: int) -> List[Trajectory]:
    """Run the excitation experiment on an undisturbed plant.

    Runs are ordered by level with the excitation runs first, then the rest runs, then the mirrored copies of all of
    them in the same order. A run that is its own mirror (resting at the origin) is recorded once.
    """
    minimum = t_ini + n_horizon + 1
    if cfg.length < minimum:
        raise ContractViolationError(f"excitation length {cfg.length} is shorter than the {minimum} samples "
                                     "a single window needs")

    runs: List[Run] = []
    seeds = np.random.SeedSequence(cfg.seed).spawn(len(cfg.levels))
    for level, seed in zip(cfg.levels, seeds):
        rng = np.random.default_rng(seed)
        for _ in range(cfg.bursts):
            runs.extend(_antithetic_runs(plant, cfg, level, n_horizon, rng))
    if cfg.rest_windows:
        for level in cfg.levels:
            runs.extend(_rest_runs(plant, cfg, level, t_ini))
    if cfg.mirror:
        runs.extend((-x0, -inputs, lead) for x0, inputs, lead in list(runs) if np.any(x0) or np.any(inputs))

    trajectories = [_record(plant, run) for run in runs]
    log.info("collected %d trajectories (%d samples)", len(trajectories), sum(map(len, trajectories)))
    return trajectories
