"""Helpers for reading and writing the CSV/YAML artifact directories produced by the offline and online phases."""

import hashlib
import logging
from pathlib import Path
from typing import Any, Dict, Union

import numpy as np  # type: ignore
import yaml

from kdpc.utils.checks import ArtifactError

log = logging.getLogger(__name__)
log.addHandler(logging.NullHandler())

PathLike = Union[str, Path]

# Bumped whenever the on-disk layout of datasets, predictors or results changes.
ARTIFACT_FORMAT_VERSION = 1

MANIFEST_NAME = "manifest.yaml"


def write_matrix(path: PathLike, matrix: np.ndarray) -> None:
    """Write a matrix as CSV with enough digits to round-trip every float exactly."""
    np.savetxt(path, np.atleast_2d(matrix), fmt="%.17g", delimiter=",")


def read_matrix(path: PathLike) -> np.ndarray:
    """Read a matrix written by `write_matrix`, always returning a two-dimensional array."""
    if not Path(path).is_file():
        raise ArtifactError(f"missing matrix file `{path}`")
    return np.atleast_2d(np.loadtxt(path, delimiter=",", dtype=np.float64, ndmin=2))


def write_yaml(path: PathLike, data: Dict[str, Any]) -> None:
    """Write a mapping as YAML with sorted keys so identical inputs produce identical bytes."""
    with open(path, "w") as stream:
        yaml.safe_dump(data, stream, sort_keys=True, default_flow_style=False)


def read_yaml(path: PathLike) -> Dict[str, Any]:
    """Read a YAML mapping, raising an `ArtifactError` if the file is missing or not a mapping."""
    if not Path(path).is_file():
        raise ArtifactError(f"missing metadata file `{path}`")
    with open(path) as stream:
        data = yaml.safe_load(stream)
    if not isinstance(data, dict):
        raise ArtifactError(f"`{path}` does not contain a mapping")
    return data


def directory_digest(directory: PathLike) -> str:
    """Hash every file of an artifact directory except its manifest, in sorted order."""
    sha = hashlib.sha256()
    for path in sorted(Path(directory).rglob("*")):
        if path.is_file() and path.name != MANIFEST_NAME:
            sha.update(str(path.relative_to(directory)).encode())
            sha.update(path.read_bytes())
    return sha.hexdigest()


def write_manifest(directory: PathLike, **provenance: Any) -> Dict[str, Any]:
    """Write the provenance manifest of an artifact directory and return its content."""
    from kdpc import __version__  # pylint: disable=import-outside-toplevel

    manifest = {
        "kdpc_version": __version__,
        "format_version": ARTIFACT_FORMAT_VERSION,
        "content_digest": directory_digest(directory),
    }
    manifest.update(provenance)
    write_yaml(Path(directory) / MANIFEST_NAME, manifest)
    log.debug("wrote manifest for `%s`", directory)
    return manifest


def read_manifest(directory: PathLike) -> Dict[str, Any]:
    """Read the manifest of an artifact directory and check its format version."""
    manifest = read_yaml(Path(directory) / MANIFEST_NAME)
    if manifest.get("format_version") != ARTIFACT_FORMAT_VERSION:
        raise ArtifactError(f"`{directory}` was written with artifact format {manifest.get('format_version')}, "
                            f"expected {ARTIFACT_FORMAT_VERSION}")
    return manifest
