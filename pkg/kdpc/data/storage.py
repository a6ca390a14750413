"""On-disk format of datasets: one CSV file per matrix plus a YAML metadata file."""

import logging
from pathlib import Path
from typing import Any

from kdpc.structs import Dataset
from kdpc.utils.checks import ArtifactError
from kdpc.utils.io import PathLike, read_matrix, read_yaml, write_matrix, write_yaml

log = logging.getLogger(__name__)
log.addHandler(logging.NullHandler())

_MATRICES = ("d_ini", "d_f_u", "y_f", "u_pre")


def save_dataset(dataset: Dataset, directory: PathLike, **metadata: Any) -> Path:
    """Write a dataset into a directory, with any extra metadata (e.g. kernel settings) alongside its dimensions."""
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    for name in _MATRICES:
        matrix = getattr(dataset, name)
        if matrix is not None:
            write_matrix(directory / f"{name}.csv", matrix)
    metadata.update(t_ini=dataset.t_ini, n_horizon=dataset.n_horizon, n_u=dataset.n_u, n_y=dataset.n_y,
                    size=dataset.size, digest=dataset.digest())
    write_yaml(directory / "metadata.yaml", metadata)
    log.info("saved dataset %s to `%s`", metadata["digest"][:12], directory)
    return directory


def load_dataset(directory: PathLike) -> Dataset:
    """Read a dataset written by `save_dataset`, checking that its content matches the recorded digest."""
    directory = Path(directory)
    metadata = read_yaml(directory / "metadata.yaml")
    try:
        dataset = Dataset(
            d_ini=read_matrix(directory / "d_ini.csv"),
            d_f_u=read_matrix(directory / "d_f_u.csv"),
            y_f=read_matrix(directory / "y_f.csv"),
            t_ini=int(metadata["t_ini"]),
            n_horizon=int(metadata["n_horizon"]),
            n_u=int(metadata["n_u"]),
            n_y=int(metadata["n_y"]),
            u_pre=read_matrix(directory / "u_pre.csv") if (directory / "u_pre.csv").is_file() else None,
        )
    except (KeyError, ValueError) as error:
        raise ArtifactError(f"dataset in `{directory}` is malformed: {error}") from error
    if dataset.digest() != metadata.get("digest"):
        raise ArtifactError(f"dataset in `{directory}` does not match its recorded digest")
    return dataset
