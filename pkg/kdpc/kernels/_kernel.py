"""Interface for arbitrary positive-definite kernels that are differentiable in their second argument."""

from abc import ABC, abstractmethod
from dataclasses import dataclass

import numpy as np  # type: ignore

from kdpc.utils.checks import ContractViolationError, check_positive

KERNEL_FAMILIES = ("gaussian_rbf",)


@dataclass(frozen=True)
class KernelSpec:
    """Kernel family and its bandwidth `sigma`."""

    family: str = "gaussian_rbf"
    bandwidth: float = 1.0

    def __post_init__(self) -> None:
        """Validate the family and the bandwidth."""
        if self.family not in KERNEL_FAMILIES:
            raise ContractViolationError(f"unknown kernel family `{self.family}`, expected one of {KERNEL_FAMILIES}")
        check_positive("bandwidth", self.bandwidth)
        object.__setattr__(self, "bandwidth", float(self.bandwidth))


class Kernel(ABC):
    """Generic abstract kernel.

    Dataset points are stored column-wise: a `(d, m)` matrix holds `m` points of dimension `d`.
    """

    spec: KernelSpec

    def __init__(self, spec: KernelSpec) -> None:
        """Initialize a kernel from its specification."""
        self.spec = spec

    @abstractmethod
    def eval(self, x: np.ndarray, y: np.ndarray) -> float:
        """Evaluate the kernel on a pair of points."""
        ...

    @abstractmethod
    def gram(self, points: np.ndarray) -> np.ndarray:
        """Compute the exactly symmetric Gram matrix of a set of points."""
        ...

    @abstractmethod
    def similarity_vector(self, points: np.ndarray, query: np.ndarray) -> np.ndarray:
        """Evaluate the kernel between every point and one query."""
        ...

    @abstractmethod
    def jacobian_row_at_zero(self, d_j: np.ndarray) -> np.ndarray:
        """Gradient of `x -> k(d_j, x)` at `x = 0`."""
        ...

    def jacobian_at_zero(self, points: np.ndarray) -> np.ndarray:
        """Jacobian of `x -> similarity_vector(points, x)` at `x = 0`, one row per point."""
        points = np.asarray(points, dtype=np.float64)
        return np.array([self.jacobian_row_at_zero(points[:, j]) for j in range(points.shape[1])]).reshape(
            points.shape[1], points.shape[0])
