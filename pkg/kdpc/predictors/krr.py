"""Kernel ridge regression solves for the past predictor and the linearized future-input predictor.

Every `(K + reg I)` system is solved through a Cholesky factorization; no inverse is ever formed.

Cost for `T` training windows: each of the two `T x T` factorizations is `O(T^3)` and applying it to the `n_y N` rows
of `Y_f` is `O(T^2 n_y N)`, with `O(T^2)` memory for the Gram matrices. Online, each similarity vector costs
`O(T (n_u + n_y) t_ini)` and the prediction `P1 k + P2 du` costs `O(T n_y N)`.
"""

import logging
from dataclasses import dataclass
from typing import Tuple

import numpy as np  # type: ignore
from scipy.linalg import LinAlgError, cho_factor, cho_solve, eigvalsh  # type: ignore

from kdpc.kernels import KernelSpec, make_kernel
from kdpc.utils.checks import FitError, check_finite, check_positive, check_symmetric

log = logging.getLogger(__name__)
log.addHandler(logging.NullHandler())

Factor = Tuple[np.ndarray, bool]


@dataclass(frozen=True, eq=False)
class AlphaP:
    """Dual coefficients of the past-window regression for one online query."""

    coefficients: np.ndarray

    def __post_init__(self) -> None:
        """Check the coefficients are finite."""
        check_finite("coefficients", self.coefficients)


def factorize(gram: np.ndarray, reg: float, name: str = "gram") -> Factor:
    """Cholesky-factorize a regularized Gram matrix `gram + reg I`.

    Raises a `FitError` naming the smallest eigenvalue of the Gram matrix if it is not positive definite.
    """
    gram = np.asarray(gram, dtype=np.float64)
    check_positive("regularization", reg)
    check_symmetric(name, gram)
    try:
        return cho_factor(gram + reg * np.eye(gram.shape[0]), lower=True, check_finite=True)
    except (LinAlgError, ValueError) as error:
        lambda_min = float(eigvalsh(gram, subset_by_index=[0, 0])[0]) if np.all(np.isfinite(gram)) else np.nan
        raise FitError(f"cannot factorize `{name} + {reg:g} I` (lambda_min({name}) = {lambda_min:.3e})") from error


def solve_right(factor: Factor, rhs: np.ndarray) -> np.ndarray:
    """Compute `rhs (K + reg I)^-1` from a factorization of the symmetric matrix `K + reg I`."""
    return cho_solve(factor, np.atleast_2d(rhs).T).T


def fit_p1(y_f: np.ndarray, k_pp: np.ndarray, lambda_reg: float) -> np.ndarray:
    """Past predictor `Y_f (K_pp + lambda I)^-1`."""
    y_f = np.atleast_2d(np.asarray(y_f, dtype=np.float64))
    k_pp = np.asarray(k_pp, dtype=np.float64)
    p1 = solve_right(factorize(k_pp, lambda_reg, "k_pp"), y_f)
    residual = np.max(np.abs(p1 @ (k_pp + lambda_reg * np.eye(k_pp.shape[0])) - y_f), initial=0.0)
    log.debug("fitted P1 with lambda = %g, solve residual %.3e", lambda_reg, residual)
    return p1


def compute_alpha_p(k_pp: np.ndarray, lambda_reg: float, k_p_ini: np.ndarray) -> AlphaP:
    """Dual coefficients `(K_pp + lambda I)^-1 k_p_ini` of one similarity vector."""
    factor = factorize(k_pp, lambda_reg, "k_pp")
    return AlphaP(cho_solve(factor, np.ravel(k_p_ini).astype(np.float64)))


def fit_p2(d_f_u: np.ndarray, k_ff: np.ndarray, mu_reg: float, y_f: np.ndarray, k: KernelSpec) -> np.ndarray:
    """Linearized future-input predictor `Y_f (K_ff + mu I)^-1 J(0)`.

    `J(0)` is the Jacobian of the future-increment similarity vector at zero increments, so the result is the Jacobian
    of `du -> Y_f (K_ff + mu I)^-1 k_f(du)` at `du = 0`, a `(n_y N, n_u N)` matrix.
    """
    d_f_u = np.atleast_2d(np.asarray(d_f_u, dtype=np.float64))
    y_f = np.atleast_2d(np.asarray(y_f, dtype=np.float64))
    jacobian = make_kernel(k).jacobian_at_zero(d_f_u)
    weights = solve_right(factorize(k_ff, mu_reg, "k_ff"), y_f)
    p2 = weights @ jacobian
    log.debug("fitted P2 with mu = %g, |P2|_max = %.3e", mu_reg, np.max(np.abs(p2), initial=0.0))
    return p2
