"""Collection of simple checks and exceptions for use around the library."""

from typing import Tuple

import numpy as np  # type: ignore
from gymnasium.spaces import Space  # type: ignore


class KdpcError(Exception):
    """General error class used to encapsulate all errors produced by the library."""


class SimulationDivergedError(KdpcError):
    """Error raised when a plant simulation produces a non-finite state."""

    step: int

    def __init__(self, message: str, step: int = -1) -> None:
        """Initialize with the index of the step that diverged, if known."""
        super().__init__(message)
        self.step = step


class DimensionMismatchError(KdpcError, ValueError):
    """Error raised when vectors or matrices do not have the dimensions an operation expects."""


class ContractViolationError(KdpcError, ValueError):
    """Error raised when an argument breaks a documented precondition."""


class MalformedInputError(KdpcError):
    """Error raised when a plant input is found to not belong to the plant input space."""


class NotWarmError(KdpcError):
    """Error raised when a controller is asked to optimize before its measurement buffer is full."""


class FitError(KdpcError):
    """Error raised when an offline predictor fit cannot factorize its regularized Gram matrix."""


class ConfigError(KdpcError):
    """Error raised when a run configuration is malformed or inconsistent."""


class ArtifactError(KdpcError):
    """Error raised when an on-disk artifact is missing or does not match what the caller expects."""


class UsageError(KdpcError):
    """Error raised when a command is asked to do nothing, e.g. run an empty scenario list."""


class ExcitationError(KdpcError):
    """Error raised when collected data fails a strict persistence-of-excitation check."""


def check_input(input_space: Space, value: np.ndarray) -> None:
    """Check that a plant input is an appropriate part of the plant input space.

    Raises a `MalformedInputError` if the input is malformed, i.e not part of the input space (non-finite values never
    are).
    """
    if value not in input_space:
        raise MalformedInputError(f"input `{value}` is not in the plant input space `{input_space}`")


def check_finite(name: str, value: np.ndarray) -> None:
    """Check that every entry of an array is finite.

    Raises a `ContractViolationError` naming the offending argument otherwise.
    """
    if not np.all(np.isfinite(value)):
        raise ContractViolationError(f"`{name}` must be finite")


def check_positive(name: str, value: float) -> None:
    """Check that a scalar parameter is strictly positive."""
    if not value > 0:
        raise ContractViolationError(f"`{name}` must be strictly positive, instead got {value}")


def check_shape(name: str, value: np.ndarray, shape: Tuple[int, ...]) -> None:
    """Check that an array has exactly the given shape.

    Raises a `DimensionMismatchError` otherwise.
    """
    if np.shape(value) != shape:
        raise DimensionMismatchError(f"`{name}` must have shape {shape}, instead got {np.shape(value)}")


def check_symmetric(name: str, matrix: np.ndarray, tol: float = 1e-10) -> None:
    """Check that a matrix is square and symmetric up to a relative tolerance.

    Raises a `ContractViolationError` otherwise.
    """
    if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1]:
        raise ContractViolationError(f"`{name}` must be square, instead got shape {matrix.shape}")
    scale = max(1.0, float(np.max(np.abs(matrix), initial=0.0)))
    if np.max(np.abs(matrix - matrix.T), initial=0.0) > tol * scale:
        raise ContractViolationError(f"`{name}` must be symmetric")
