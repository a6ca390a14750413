"""Result files: one CSV per controller and a YAML metrics summary per scenario."""

import csv
import logging
from pathlib import Path
from typing import Dict, List

from kdpc.experiments.metrics import STEADY_STATE_WINDOW, Metrics
from kdpc.experiments.runner import ControllerSeries, ExperimentResult
from kdpc.utils.checks import ArtifactError
from kdpc.utils.io import PathLike, write_yaml

log = logging.getLogger(__name__)
log.addHandler(logging.NullHandler())

COLUMNS = ("t", "y", "y_ref", "u", "delta_u", "d", "cost", "status")


def _format(value: float) -> str:
    return format(value, ".17g")


def write_series(series: ControllerSeries, path: PathLike) -> None:
    """Write one series as CSV with round-trip float precision."""
    with open(path, "w", newline="") as stream:
        writer = csv.writer(stream, lineterminator="\n")
        writer.writerow(COLUMNS)
        for *values, status in zip(series.t, series.y, series.y_ref, series.u, series.delta_u, series.d, series.cost,
                                   series.status):
            writer.writerow([_format(value) for value in values] + [status])


def write_results(result: ExperimentResult, directory: PathLike) -> List[Path]:
    """Write the series of every controller of a result to `<directory>/<controller>.csv`."""
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    paths = []
    for name, series in result.series.items():
        path = directory / f"{name}.csv"
        write_series(series, path)
        paths.append(path)
    log.info("wrote %d result files to `%s`", len(paths), directory)
    return paths


def read_series(path: PathLike) -> ControllerSeries:
    """Read a series written by `write_series`."""
    path = Path(path)
    if not path.is_file():
        raise ArtifactError(f"missing result file `{path}`")
    series = ControllerSeries(controller=path.stem)
    with open(path, newline="") as stream:
        for row in csv.DictReader(stream):
            for name in COLUMNS[:-1]:
                getattr(series, name).append(float(row[name]))
            series.status.append(row["status"])
    return series


def write_metrics(metrics: Dict[str, Metrics], result: ExperimentResult, path: PathLike) -> None:
    """Write the metrics of every controller with the conventions they were computed under."""
    write_yaml(path, {
        "scenario": result.scenario.name,
        "steady_state_window": STEADY_STATE_WINDOW,
        "controllers": {name: value.as_dict() for name, value in metrics.items()},
        "diverged_at": {name: series.diverged_at for name, series in result.series.items()},
    })
