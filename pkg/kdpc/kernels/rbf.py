"""Gaussian radial basis function kernel `k(x, y) = exp(-|x - y|^2 / (2 sigma^2))`."""

import numpy as np  # type: ignore
from scipy.spatial.distance import cdist, pdist, squareform  # type: ignore

from kdpc.kernels._kernel import Kernel, KernelSpec
from kdpc.utils.checks import DimensionMismatchError, check_finite


class GaussianRbfKernel(Kernel):
    """Gaussian RBF kernel with a fixed bandwidth."""

    def _scale(self, squared_distance: np.ndarray) -> np.ndarray:
        return np.exp(-squared_distance / (2.0 * self.spec.bandwidth ** 2))

    def eval(self, x: np.ndarray, y: np.ndarray) -> float:
        """Evaluate the kernel on a pair of points of the same dimension."""
        x, y = np.ravel(x).astype(np.float64), np.ravel(y).astype(np.float64)
        if x.shape != y.shape:
            raise DimensionMismatchError(f"kernel arguments differ in dimension: {x.size} != {y.size}")
        diff = x - y
        return float(self._scale(diff @ diff))

    def gram(self, points: np.ndarray) -> np.ndarray:
        """Gram matrix built from condensed pairwise distances, so it is symmetric with a unit diagonal."""
        points = np.atleast_2d(np.asarray(points, dtype=np.float64))
        check_finite("points", points)
        return self._scale(squareform(pdist(points.T, "sqeuclidean"), checks=False))

    def similarity_vector(self, points: np.ndarray, query: np.ndarray) -> np.ndarray:
        """Kernel between every column of `points` and `query`."""
        points = np.atleast_2d(np.asarray(points, dtype=np.float64))
        query = np.ravel(query).astype(np.float64)
        if query.size != points.shape[0]:
            raise DimensionMismatchError(f"query has dimension {query.size}, points have {points.shape[0]}")
        return self._scale(cdist(points.T, query[np.newaxis, :], "sqeuclidean")[:, 0])

    def jacobian_row_at_zero(self, d_j: np.ndarray) -> np.ndarray:
        """Analytic gradient `k(d_j, 0) d_j / sigma^2`."""
        return rbf_jacobian_row_at_zero(self.spec, d_j)


def rbf_jacobian_row_at_zero(spec: KernelSpec, d_j: np.ndarray) -> np.ndarray:
    """Gradient of `x -> k(d_j, x)` at zero for a Gaussian RBF kernel."""
    d_j = np.ravel(d_j).astype(np.float64)
    sigma2 = spec.bandwidth ** 2
    return np.exp(-(d_j @ d_j) / (2.0 * sigma2)) / sigma2 * d_j


def median_bandwidth(points: np.ndarray) -> float:
    """Median heuristic: the median of the positive pairwise distances between columns, or 1 if there are none."""
    points = np.atleast_2d(np.asarray(points, dtype=np.float64))
    distances = pdist(points.T, "euclidean")
    distances = distances[distances > 0]
    return float(np.median(distances)) if distances.size else 1.0
