"""Collection of common structures shared between the offline and online phases.

These structures are plain value types; everything that computes with them lives in the respective sub-packages.
"""

import hashlib
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np  # type: ignore

Vector = np.ndarray
Matrix = np.ndarray


def array(*args, **kwargs) -> np.ndarray:  # noqa
    kwargs.setdefault("dtype", np.float64)
    return np.asarray(*args, **kwargs)  # noqa


array.__doc__ = np.asarray.__doc__


def as_channels(values: Sequence[float]) -> Matrix:
    """Reshape a signal into a `(length, channels)` matrix; one-dimensional signals become a single channel."""
    values = array(values)
    if values.ndim == 1:
        return values.reshape(-1, 1)
    if values.ndim != 2:
        raise ValueError(f"signal must be one- or two-dimensional, instead got shape {values.shape}")
    return values


@dataclass(frozen=True, eq=False)
class Trajectory:
    """Input/output record of one plant run.

    Row `k` of `y` is the first output that responds to row `k` of `u`, i.e. `y[k] = h(x[k + 1])`. The optional `x`
    holds the plant state after each step for diagnostics.
    """

    u: Matrix
    y: Matrix
    x: Optional[Matrix] = None

    def __post_init__(self) -> None:
        """Normalize signals to `(length, channels)` matrices and check they line up."""
        object.__setattr__(self, "u", as_channels(self.u))
        object.__setattr__(self, "y", as_channels(self.y))
        if self.u.shape[0] != self.y.shape[0]:
            raise ValueError(f"input and output lengths differ: {self.u.shape[0]} != {self.y.shape[0]}")
        if not (np.all(np.isfinite(self.u)) and np.all(np.isfinite(self.y))):
            raise ValueError("trajectory contains non-finite samples")

    def __len__(self) -> int:
        """Number of samples in this trajectory."""
        return self.u.shape[0]

    @property
    def n_u(self) -> int:
        """Number of input channels."""
        return self.u.shape[1]

    @property
    def n_y(self) -> int:
        """Number of output channels."""
        return self.y.shape[1]


@dataclass(frozen=True, eq=False)
class Dataset:
    """Column-stacked windows harvested from excitation trajectories.

    Column `i` of `d_ini` is `[du_ini_i; y_ini_i]`, of `d_f_u` is `du_f_i` and of `y_f` is `y_f_i`. `u_pre` holds the
    absolute input applied just before each window so that absolute inputs can be rebuilt from the increments.
    """

    d_ini: Matrix
    d_f_u: Matrix
    y_f: Matrix
    t_ini: int
    n_horizon: int
    n_u: int = 1
    n_y: int = 1
    u_pre: Optional[Matrix] = None

    def __post_init__(self) -> None:
        """Check dimensions and column counts of the stacked matrices."""
        size = self.d_ini.shape[1]
        if size < 1:
            raise ValueError("dataset must contain at least one window")
        if self.d_f_u.shape[1] != size or self.y_f.shape[1] != size:
            raise ValueError("dataset matrices must share their column count")
        if self.d_ini.shape[0] != (self.n_u + self.n_y) * self.t_ini:
            raise ValueError(f"past windows must have {(self.n_u + self.n_y) * self.t_ini} rows")
        if self.d_f_u.shape[0] != self.n_u * self.n_horizon:
            raise ValueError(f"future input windows must have {self.n_u * self.n_horizon} rows")
        if self.y_f.shape[0] != self.n_y * self.n_horizon:
            raise ValueError(f"future output windows must have {self.n_y * self.n_horizon} rows")

    @property
    def size(self) -> int:
        """Number of windows `T` in this dataset."""
        return self.d_ini.shape[1]

    def digest(self) -> str:
        """Content hash identifying this dataset."""
        sha = hashlib.sha256()
        sha.update(f"{self.t_ini}:{self.n_horizon}:{self.n_u}:{self.n_y}".encode())
        for matrix in (self.d_ini, self.d_f_u, self.y_f):
            sha.update(np.ascontiguousarray(matrix, dtype=np.float64).tobytes())
        return sha.hexdigest()
