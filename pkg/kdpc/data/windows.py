"""Slicing of trajectories into past/future windows of input increments and outputs."""

import logging
from typing import Sequence

import numpy as np  # type: ignore
from scipy.linalg import eigvalsh  # type: ignore

from kdpc.structs import Dataset, Trajectory
from kdpc.utils.checks import ContractViolationError, check_symmetric

log = logging.getLogger(__name__)
log.addHandler(logging.NullHandler())


def assemble_dataset(trajectories: Sequence[Trajectory], t_ini: int, n_horizon: int, stride: int = 1) -> Dataset:
    """Harvest every (strided) window of every trajectory as one dataset column.

    A window starting at sample `s >= 1` takes increments and outputs over `[s, s + t_ini)` as its past and over
    `[s + t_ini, s + t_ini + n_horizon)` as its future; the increment at `s` uses the input at `s - 1`, which is kept in
    `u_pre`. Columns are ordered by trajectory, then by window start.
    """
    if t_ini < 1 or n_horizon < 1:
        raise ContractViolationError(f"horizons must be positive, instead got t_ini={t_ini}, n_horizon={n_horizon}")
    if stride < 1:
        raise ContractViolationError(f"window stride must be at least one, instead got {stride}")
    if not trajectories:
        raise ContractViolationError("at least one trajectory is required")
    n_u, n_y = trajectories[0].n_u, trajectories[0].n_y

    d_ini, d_f_u, y_f, u_pre = [], [], [], []
    for index, trajectory in enumerate(trajectories):
        if (trajectory.n_u, trajectory.n_y) != (n_u, n_y):
            raise ContractViolationError(f"trajectory {index} has {trajectory.n_u} inputs and {trajectory.n_y} "
                                         f"outputs, expected {n_u} and {n_y}")
        length = len(trajectory)
        if length < t_ini + n_horizon + 1:
            raise ContractViolationError(f"trajectory {index} has {length} samples, fewer than the "
                                         f"{t_ini + n_horizon + 1} a window needs")

        # du[s - 1] = u[s] - u[s - 1]
        du = np.diff(trajectory.u, axis=0)
        y = trajectory.y
        for start in range(1, length - t_ini - n_horizon + 1, stride):
            split = start + t_ini
            d_ini.append(np.concatenate([du[start - 1:split - 1].ravel(), y[start:split].ravel()]))
            d_f_u.append(du[split - 1:split - 1 + n_horizon].ravel())
            y_f.append(y[split:split + n_horizon].ravel())
            u_pre.append(trajectory.u[start - 1])

    dataset = Dataset(d_ini=np.column_stack(d_ini), d_f_u=np.column_stack(d_f_u), y_f=np.column_stack(y_f),
                      t_ini=t_ini, n_horizon=n_horizon, n_u=n_u, n_y=n_y, u_pre=np.column_stack(u_pre))
    log.info("assembled dataset of T = %d windows from %d trajectories", dataset.size, len(trajectories))
    return dataset


def check_pe(k_pp: np.ndarray) -> float:
    """Smallest eigenvalue of a past-window Gram matrix.

    The data is persistently exciting when it is positive; comparing it to a threshold is up to the caller.
    """
    k_pp = np.asarray(k_pp, dtype=np.float64)
    check_symmetric("k_pp", k_pp)
    return float(eigvalsh(k_pp, subset_by_index=[0, 0])[0])
