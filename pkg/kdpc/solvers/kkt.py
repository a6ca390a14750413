"""Independent first-order optimality check of a QP solution."""

import numpy as np  # type: ignore

from kdpc.solvers._solver import QPProblem


def _norm(value: np.ndarray) -> float:
    return float(np.max(np.abs(value), initial=0.0))


def _complementarity(multiplier: np.ndarray, gap: np.ndarray) -> np.ndarray:
    # only rows with a nonzero multiplier are paired, so infinite gaps never meet a zero multiplier
    product = np.zeros_like(multiplier)
    mask = multiplier != 0
    product[mask] = np.abs(multiplier[mask]) * np.abs(gap[mask])
    return product


def kkt_residual(problem: QPProblem, z: np.ndarray, y_ineq: np.ndarray, y_box: np.ndarray) -> float:
    """Largest normalized violation of the KKT conditions at a primal-dual point.

    Stationarity, primal feasibility, dual sign and complementarity are each measured in the infinity norm relative to
    the magnitude of the quantities involved; a multiplier on an infinite bound counts as an infinite violation.
    """
    z, y_ineq, y_box = np.ravel(z), np.ravel(y_ineq), np.ravel(y_box)
    h_z = problem.h @ z
    a_y = problem.a_ineq.T @ y_ineq
    a_z = problem.a_ineq @ z

    stationarity = _norm(h_z + problem.g + a_y + y_box) / \
        (1.0 + max(_norm(h_z), _norm(problem.g), _norm(a_y), _norm(y_box)))

    violation = max(_norm(np.maximum(a_z - problem.b_ineq, 0.0)),
                    _norm(np.maximum(problem.lb - z, 0.0)),
                    _norm(np.maximum(z - problem.ub, 0.0)))
    primal = violation / (1.0 + max(_norm(a_z), _norm(z)))

    y_scale = 1.0 + max(_norm(y_ineq), _norm(y_box))
    dual = _norm(np.maximum(-y_ineq, 0.0)) / y_scale

    upper = np.maximum(y_box, 0.0)
    lower = np.minimum(y_box, 0.0)
    complementarity = max(_norm(_complementarity(y_ineq, problem.b_ineq - a_z)),
                          _norm(_complementarity(upper, problem.ub - z)),
                          _norm(_complementarity(lower, z - problem.lb))) / y_scale

    return float(max(stationarity, primal, dual, complementarity))
