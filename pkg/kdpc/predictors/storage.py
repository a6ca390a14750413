"""On-disk format of fitted predictors, mirroring the dataset format."""

import logging
from pathlib import Path

from kdpc.kernels import KernelSpec
from kdpc.predictors._predictors import Predictors
from kdpc.utils.checks import ArtifactError
from kdpc.utils.io import PathLike, read_matrix, read_yaml, write_matrix, write_yaml

log = logging.getLogger(__name__)
log.addHandler(logging.NullHandler())


def save_predictors(predictors: Predictors, directory: PathLike) -> Path:
    """Write predictors into a directory: `p1.csv`, `p2.csv`, `d_ini.csv` and `metadata.yaml`."""
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    write_matrix(directory / "p1.csv", predictors.p1)
    write_matrix(directory / "p2.csv", predictors.p2)
    write_matrix(directory / "d_ini.csv", predictors.d_ini)
    write_yaml(directory / "metadata.yaml", {
        "lambda_reg": predictors.lambda_reg,
        "mu_reg": predictors.mu_reg,
        "kernel_past": {"family": predictors.kernel_past.family, "bandwidth": predictors.kernel_past.bandwidth},
        "kernel_future": {"family": predictors.kernel_future.family, "bandwidth": predictors.kernel_future.bandwidth},
        "dataset_digest": predictors.dataset_digest,
        "t_ini": predictors.t_ini,
        "n_horizon": predictors.n_horizon,
        "n_u": predictors.n_u,
        "n_y": predictors.n_y,
        "lambda_min_pp": predictors.lambda_min_pp,
    })
    log.info("saved predictors to `%s`", directory)
    return directory


def load_predictors(directory: PathLike) -> Predictors:
    """Read predictors written by `save_predictors`."""
    directory = Path(directory)
    metadata = read_yaml(directory / "metadata.yaml")
    try:
        return Predictors(
            p1=read_matrix(directory / "p1.csv"),
            p2=read_matrix(directory / "p2.csv"),
            lambda_reg=float(metadata["lambda_reg"]),
            mu_reg=float(metadata["mu_reg"]),
            kernel_past=KernelSpec(**metadata["kernel_past"]),
            kernel_future=KernelSpec(**metadata["kernel_future"]),
            dataset_digest=str(metadata["dataset_digest"]),
            d_ini=read_matrix(directory / "d_ini.csv"),
            t_ini=int(metadata["t_ini"]),
            n_horizon=int(metadata["n_horizon"]),
            n_u=int(metadata["n_u"]),
            n_y=int(metadata["n_y"]),
            lambda_min_pp=float(metadata.get("lambda_min_pp", float("nan"))),
        )
    except (KeyError, TypeError, ValueError) as error:
        raise ArtifactError(f"predictors in `{directory}` are malformed: {error}") from error
