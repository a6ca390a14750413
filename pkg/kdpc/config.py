"""Run configuration: one YAML file mapped onto the settings dataclasses of every stage.

Every section is optional and falls back to its defaults; unknown keys anywhere are rejected. The top-level `seed`
drives the excitation experiment. See `config/default.yaml` for the full schema.
"""

import hashlib
from dataclasses import asdict, dataclass, field, fields, replace
from enum import Enum
from pathlib import Path
from typing import Any, Dict, Mapping, Optional, Tuple, Type, TypeVar

import yaml

from kdpc.controllers import ControllerConfig
from kdpc.data import ExcitationConfig
from kdpc.experiments import PiecewiseConstant, Scenario, default_scenarios
from kdpc.plants import DisturbancePulse, DisturbanceSchedule, VdpParams
from kdpc.predictors import PredictorSettings
from kdpc.solvers import AdmmSolverSettings
from kdpc.utils.checks import ConfigError, KdpcError
from kdpc.utils.io import PathLike

T = TypeVar("T")


@dataclass(frozen=True)
class PeSettings:
    """Persistence-of-excitation gate: `lambda_min(K_pp)` below `threshold` warns, or fails if `strict`."""

    threshold: float = 1e-8
    strict: bool = False


@dataclass(frozen=True)
class RunConfig:
    """Complete configuration of a collect/fit/run pipeline."""

    seed: int = 0
    output: str = "out"
    plant: VdpParams = field(default_factory=VdpParams)
    excitation: ExcitationConfig = field(default_factory=ExcitationConfig)
    predictor: PredictorSettings = field(default_factory=PredictorSettings)
    controller: ControllerConfig = field(default_factory=ControllerConfig)
    solver: AdmmSolverSettings = field(default_factory=AdmmSolverSettings)
    pe: PeSettings = field(default_factory=PeSettings)
    scenarios: Tuple[Scenario, ...] = field(default_factory=default_scenarios)

    def with_seed(self, seed: int) -> "RunConfig":
        """Copy of this configuration with another master seed."""
        return replace(self, seed=seed, excitation=replace(self.excitation, seed=seed))


def default_config() -> RunConfig:
    """Configuration with every default."""
    return RunConfig()


def _section(cls: Type[T], data: Any, section: str, exclude: Tuple[str, ...] = ()) -> T:
    if data is None:
        data = {}
    if not isinstance(data, Mapping):
        raise ConfigError(f"section `{section}` must be a mapping")
    allowed = {f.name for f in fields(cls)} - set(exclude)
    unknown = set(data) - allowed
    if unknown:
        raise ConfigError(f"unknown keys in `{section}`: {', '.join(sorted(map(str, unknown)))}")
    try:
        return cls(**data)  # type: ignore
    except (KdpcError, TypeError, ValueError) as error:
        raise ConfigError(f"invalid `{section}`: {error}") from error


def _scenario(data: Any, index: int) -> Scenario:
    section = f"scenarios[{index}]"
    if not isinstance(data, Mapping):
        raise ConfigError(f"`{section}` must be a mapping")
    data = dict(data)
    allowed = {"name", "duration", "reference", "disturbances", "controllers", "x0", "u0"}
    unknown = set(data) - allowed
    if unknown:
        raise ConfigError(f"unknown keys in `{section}`: {', '.join(sorted(map(str, unknown)))}")
    if "name" not in data:
        raise ConfigError(f"`{section}` needs a name")
    reference = data.pop("reference", None)
    pulses = data.pop("disturbances", None) or []
    if not isinstance(pulses, list):
        raise ConfigError(f"`{section}.disturbances` must be a list")
    try:
        if reference is not None:
            data["reference"] = _section(PiecewiseConstant, reference, f"{section}.reference")
        data["disturbance"] = DisturbanceSchedule(tuple(
            _section(DisturbancePulse, pulse, f"{section}.disturbances[{i}]") for i, pulse in enumerate(pulses)))
        return Scenario(**data)
    except (KdpcError, TypeError, ValueError) as error:
        if isinstance(error, ConfigError):
            raise
        raise ConfigError(f"invalid `{section}`: {error}") from error


def parse_config(data: Optional[Mapping[str, Any]]) -> RunConfig:
    """Build a configuration from a parsed YAML mapping."""
    data = dict(data or {})
    allowed = {f.name for f in fields(RunConfig)}
    unknown = set(data) - allowed
    if unknown:
        raise ConfigError(f"unknown top-level keys: {', '.join(sorted(map(str, unknown)))}")
    seed = data.get("seed", 0)
    if not isinstance(seed, int) or isinstance(seed, bool):
        raise ConfigError(f"`seed` must be an integer, instead got `{seed}`")

    scenarios = data.get("scenarios")
    if scenarios is None:
        scenarios = default_scenarios()
    elif isinstance(scenarios, list):
        scenarios = tuple(_scenario(scenario, i) for i, scenario in enumerate(scenarios))
    else:
        raise ConfigError("`scenarios` must be a list")

    return RunConfig(
        seed=seed,
        output=str(data.get("output", "out")),
        plant=_section(VdpParams, data.get("plant"), "plant"),
        excitation=replace(_section(ExcitationConfig, data.get("excitation"), "excitation", exclude=("seed",)),
                           seed=seed),
        predictor=_section(PredictorSettings, data.get("predictor"), "predictor"),
        controller=_section(ControllerConfig, data.get("controller"), "controller"),
        solver=_section(AdmmSolverSettings, data.get("solver"), "solver"),
        pe=_section(PeSettings, data.get("pe"), "pe"),
        scenarios=scenarios,
    )


def load_config(path: PathLike) -> RunConfig:
    """Read and validate a YAML configuration file."""
    path = Path(path)
    if not path.is_file():
        raise ConfigError(f"configuration file `{path}` does not exist")
    try:
        with open(path) as stream:
            data = yaml.safe_load(stream)
    except yaml.YAMLError as error:
        raise ConfigError(f"`{path}` is not valid YAML: {error}") from error
    if data is not None and not isinstance(data, Mapping):
        raise ConfigError(f"`{path}` must contain a mapping")
    return parse_config(data)


def _plain(value: Any) -> Any:
    if isinstance(value, Enum):
        return value.value
    if isinstance(value, Mapping):
        return {str(key): _plain(item) for key, item in value.items()}
    if isinstance(value, (list, tuple)):
        return [_plain(item) for item in value]
    if hasattr(value, "item"):
        return value.item()
    return value


def config_to_dict(cfg: RunConfig) -> Dict[str, Any]:
    """Canonical plain representation of a configuration, loadable again by `parse_config`."""
    data = _plain(asdict(cfg))
    del data["excitation"]["seed"]
    for scenario in data["scenarios"]:
        scenario["disturbances"] = scenario.pop("disturbance")["pulses"]
    return data


def config_digest(cfg: RunConfig) -> str:
    """SHA-256 of the canonical YAML dump of a configuration, leaving out where artifacts are written."""
    data = config_to_dict(cfg)
    del data["output"]
    dump = yaml.safe_dump(data, sort_keys=True, default_flow_style=False)
    return hashlib.sha256(dump.encode()).hexdigest()
