"""Command-line entry point: `kdpc collect | fit | run | all`.

Artifacts are laid out under the output directory as `dataset/`, `predictors/` and `results/<scenario>/`, each with a
`manifest.yaml` recording the package and artifact format versions and the digests of everything it was built from.
"""

import argparse
import logging
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path
from typing import Optional, Sequence

from kdpc import __version__
from kdpc.config import RunConfig, config_digest, default_config, load_config
from kdpc.data import assemble_dataset, check_pe, collect_trajectories, load_dataset, save_dataset
from kdpc.experiments import ExperimentResult, Scenario, compute_metrics, plot_result, run_scenario, write_metrics, \
    write_results
from kdpc.kernels import KernelSpec, make_kernel
from kdpc.plants import VanDerPolPlant
from kdpc.predictors import Predictors, fit_predictors, load_predictors, open_loop_validate, resolve_bandwidth, \
    save_predictors
from kdpc.utils.checks import ArtifactError, ConfigError, ExcitationError, FitError, KdpcError, UsageError
from kdpc.utils.io import read_manifest, write_manifest, write_yaml

log = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_USAGE = 2
EXIT_CONFIG = 3
EXIT_PE = 4
EXIT_FIT = 5
EXIT_DIVERGED = 6
EXIT_ARTIFACT = 7

_EXIT_CODES = (
    (UsageError, EXIT_USAGE),
    (ConfigError, EXIT_CONFIG),
    (ExcitationError, EXIT_PE),
    (FitError, EXIT_FIT),
    (ArtifactError, EXIT_ARTIFACT),
)


def _check_scenarios(cfg: RunConfig) -> None:
    if not cfg.scenarios:
        raise UsageError("the configuration lists no scenarios")
    for scenario in cfg.scenarios:
        if not scenario.controllers:
            raise UsageError(f"scenario `{scenario.name}` requests no controllers")
    names = [scenario.name for scenario in cfg.scenarios]
    if len(set(names)) != len(names):
        raise UsageError("scenario names must be unique")


def cmd_collect(cfg: RunConfig, out: Path) -> Path:
    """Run the excitation experiment and write the assembled dataset to `<out>/dataset`."""
    t_ini, n_horizon = cfg.controller.t_ini, cfg.controller.n_horizon
    trajectories = collect_trajectories(VanDerPolPlant(cfg.plant), cfg.excitation, t_ini, n_horizon)
    dataset = assemble_dataset(trajectories, t_ini, n_horizon, cfg.excitation.stride)

    bandwidth = resolve_bandwidth(cfg.predictor.bandwidth_past, dataset.d_ini)
    lambda_min = check_pe(make_kernel(KernelSpec(bandwidth=bandwidth)).gram(dataset.d_ini))
    print(f"T = {dataset.size}")
    print(f"lambda_min(K_pp) = {lambda_min:.6e}")
    if lambda_min < cfg.pe.threshold:
        log.warning("lambda_min(K_pp) = %.3e is below %.1e: the data is not persistently exciting; "
                    "try raising excitation.amplitude to %g", lambda_min, cfg.pe.threshold,
                    2 * cfg.excitation.amplitude)
        if cfg.pe.strict:
            raise ExcitationError(f"lambda_min(K_pp) = {lambda_min:.3e} is below {cfg.pe.threshold:.1e}")

    directory = save_dataset(dataset, out / "dataset", bandwidth_past=bandwidth, lambda_min_pp=lambda_min)
    write_manifest(directory, config_digest=config_digest(cfg), dataset_digest=dataset.digest(), seed=cfg.seed)
    return directory


def cmd_fit(cfg: RunConfig, out: Path) -> Path:
    """Fit both predictors to `<out>/dataset`, validate them open loop and write them to `<out>/predictors`."""
    dataset_dir = out / "dataset"
    read_manifest(dataset_dir)
    dataset = load_dataset(dataset_dir)
    expected = (cfg.controller.t_ini, cfg.controller.n_horizon)
    if (dataset.t_ini, dataset.n_horizon) != expected:
        raise ArtifactError(f"dataset horizons {(dataset.t_ini, dataset.n_horizon)} do not match the configured "
                            f"{expected}; collect again")

    predictors = fit_predictors(dataset, cfg.predictor)
    directory = save_predictors(predictors, out / "predictors")
    report = open_loop_validate(predictors, VanDerPolPlant(cfg.plant), cfg.excitation)
    write_yaml(directory / "validation.yaml", report.as_dict())
    print(f"lambda_min(K_pp) = {predictors.lambda_min_pp:.6e}")
    print(f"open-loop validation RMSE = {report.rmse:.6e} over {report.windows} windows")

    write_manifest(directory, config_digest=config_digest(cfg), dataset_digest=dataset.digest())
    return directory


def _run_one(scenario: Scenario, predictors: Optional[Predictors], cfg: RunConfig) -> ExperimentResult:
    return run_scenario(scenario, predictors, cfg.controller, cfg.plant, cfg.solver)


def _load_run_predictors(cfg: RunConfig, out: Path) -> Optional[Predictors]:
    if not any("kdpc" in scenario.controllers for scenario in cfg.scenarios):
        return None
    directory = out / "predictors"
    manifest = read_manifest(directory)
    predictors = load_predictors(directory)
    if manifest.get("dataset_digest") != predictors.dataset_digest:
        raise ArtifactError(f"predictors in `{directory}` do not match the dataset recorded in their manifest")
    expected = (cfg.controller.t_ini, cfg.controller.n_horizon)
    if (predictors.t_ini, predictors.n_horizon) != expected:
        raise ArtifactError(f"predictor horizons {(predictors.t_ini, predictors.n_horizon)} do not match the "
                            f"configured {expected}; fit again")
    return predictors


def cmd_run(cfg: RunConfig, out: Path, parallel: bool = False) -> int:
    """Run every scenario and write series, metrics, plots and a manifest to `<out>/results/<scenario>`.

    Returns `EXIT_DIVERGED` if any controller drove the plant to divergence, after all results are written.
    """
    predictors = _load_run_predictors(cfg, out)
    provenance = {"config_digest": config_digest(cfg)}
    if predictors is not None:
        provenance["dataset_digest"] = predictors.dataset_digest
        provenance["predictors_digest"] = read_manifest(out / "predictors")["content_digest"]

    if parallel and len(cfg.scenarios) > 1:
        with ProcessPoolExecutor() as pool:
            futures = [pool.submit(_run_one, scenario, predictors, cfg) for scenario in cfg.scenarios]
            results = [future.result() for future in futures]
    else:
        results = [_run_one(scenario, predictors, cfg) for scenario in cfg.scenarios]

    diverged = False
    for result in results:
        directory = out / "results" / result.scenario.name
        write_results(result, directory)
        metrics = compute_metrics(result)
        write_metrics(metrics, result, directory / "metrics.yaml")
        plot_result(result, directory / "plot.svg")
        write_manifest(directory, scenario=result.scenario.name, **provenance)
        for name, value in metrics.items():
            print(f"{result.scenario.name} {name}: steady-state error {value.steady_state_error:.4e}, "
                  f"feasible {value.feasible_fraction:.1%}")
        if result.diverged:
            log.error("scenario `%s` diverged", result.scenario.name)
            diverged = True
    return EXIT_DIVERGED if diverged else EXIT_OK


def cmd_all(cfg: RunConfig, out: Path, parallel: bool = False) -> int:
    """Collect, fit and run in sequence."""
    cmd_collect(cfg, out)
    cmd_fit(cfg, out)
    return cmd_run(cfg, out, parallel)


def build_parser() -> argparse.ArgumentParser:
    """Argument parser with one sub-command per pipeline stage."""
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", type=Path, help="YAML run configuration (defaults apply if omitted)")
    common.add_argument("--out", type=Path, help="output directory, overriding `output` from the configuration")
    common.add_argument("--seed", type=int, help="master seed, overriding `seed` from the configuration")
    common.add_argument("--parallel", action="store_true", help="run scenarios in separate processes")
    common.add_argument("-v", "--verbose", action="store_true", help="log at debug level")

    parser = argparse.ArgumentParser(prog="kdpc", description="Kernelized data-driven predictive control.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    commands = parser.add_subparsers(dest="command", metavar="command")
    commands.required = True
    commands.add_parser("collect", parents=[common], help="run the excitation experiment and save the dataset")
    commands.add_parser("fit", parents=[common], help="fit the predictors to the saved dataset")
    commands.add_parser("run", parents=[common], help="run the closed-loop scenarios with the saved predictors")
    commands.add_parser("all", parents=[common], help="collect, fit and run")
    return parser


def _setup_logging(verbose: bool) -> None:
    handler = logging.StreamHandler(sys.stderr)
    handler.setFormatter(logging.Formatter("%(levelname)s %(name)s: %(message)s"))
    root = logging.getLogger("kdpc")
    root.handlers = [handler]
    root.setLevel(logging.DEBUG if verbose else logging.INFO)


def main(argv: Optional[Sequence[str]] = None) -> int:
    """Parse arguments, run the requested command and return its exit code."""
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as error:
        return int(error.code or 0)
    _setup_logging(args.verbose)

    try:
        cfg = load_config(args.config) if args.config is not None else default_config()
        if args.seed is not None:
            cfg = cfg.with_seed(args.seed)
        _check_scenarios(cfg)
        out = args.out if args.out is not None else Path(cfg.output)

        if args.command == "collect":
            cmd_collect(cfg, out)
            return EXIT_OK
        if args.command == "fit":
            cmd_fit(cfg, out)
            return EXIT_OK
        if args.command == "run":
            return cmd_run(cfg, out, args.parallel)
        return cmd_all(cfg, out, args.parallel)
    except KdpcError as error:
        log.error("%s", error)
        for kind, code in _EXIT_CODES:
            if isinstance(error, kind):
                return code
        return EXIT_ERROR
