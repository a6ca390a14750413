"""CSV bundles of QP problems for offline debugging."""

from pathlib import Path

import numpy as np  # type: ignore

from kdpc.solvers._solver import QPProblem
from kdpc.utils.io import PathLike, read_matrix, read_yaml, write_matrix, write_yaml

_FIELDS = ("h", "g", "a_ineq", "b_ineq", "lb", "ub")


def dump_problem(problem: QPProblem, directory: PathLike) -> Path:
    """Write every array of a problem to its own CSV file; vectors are written as single rows."""
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    for name in _FIELDS:
        value = getattr(problem, name)
        if value.size:
            write_matrix(directory / f"{name}.csv", value)
    write_yaml(directory / "problem.yaml", {"n": problem.n, "m": problem.m})
    return directory


def load_problem(directory: PathLike) -> QPProblem:
    """Read a problem written by `dump_problem`."""
    directory = Path(directory)
    dims = read_yaml(directory / "problem.yaml")
    n, m = int(dims["n"]), int(dims["m"])

    def read(name: str, size: int) -> np.ndarray:
        return read_matrix(directory / f"{name}.csv").ravel() if size else np.zeros(0)

    return QPProblem(h=read("h", n * n).reshape(n, n), g=read("g", n), a_ineq=read("a_ineq", m * n).reshape(m, n),
                     b_ineq=read("b_ineq", m), lb=read("lb", n), ub=read("ub", n))
