"""Interface for dense strictly convex quadratic program solvers, with the problem and solution value types.

Problems have the form

    minimize    1/2 z' H z + g' z
    subject to  A z <= b,  lb <= z <= ub,

where bounds may be infinite.
"""

from abc import ABC, abstractmethod
from dataclasses import dataclass, field
from enum import Enum
from typing import Optional

import numpy as np  # type: ignore
from scipy.linalg import eigvalsh  # type: ignore

from kdpc.utils.checks import ContractViolationError, DimensionMismatchError, check_finite, check_symmetric


class QPStatus(Enum):
    """Outcome of a solve."""

    OPTIMAL = "optimal"
    INFEASIBLE = "infeasible"
    MAX_ITER = "max_iter"


@dataclass(frozen=True, eq=False)
class QPProblem:
    """Dense quadratic program with general linear inequalities and (possibly infinite) variable bounds."""

    h: np.ndarray
    g: np.ndarray
    a_ineq: Optional[np.ndarray] = None
    b_ineq: Optional[np.ndarray] = None
    lb: Optional[np.ndarray] = None
    ub: Optional[np.ndarray] = None

    def __post_init__(self) -> None:
        """Fill in missing constraints and validate the problem data."""
        h = np.atleast_2d(np.asarray(self.h, dtype=np.float64))
        g = np.ravel(np.asarray(self.g, dtype=np.float64))
        n = g.size
        a_ineq = np.zeros((0, n)) if self.a_ineq is None else np.asarray(self.a_ineq, dtype=np.float64).reshape(-1, n)
        b_ineq = np.zeros(0) if self.b_ineq is None else np.ravel(np.asarray(self.b_ineq, dtype=np.float64))
        lb = np.full(n, -np.inf) if self.lb is None else np.ravel(np.asarray(self.lb, dtype=np.float64))
        ub = np.full(n, np.inf) if self.ub is None else np.ravel(np.asarray(self.ub, dtype=np.float64))
        for name, value in (("h", h), ("g", g), ("a_ineq", a_ineq), ("b_ineq", b_ineq), ("lb", lb), ("ub", ub)):
            object.__setattr__(self, name, value)

        if h.shape != (n, n):
            raise DimensionMismatchError(f"Hessian must have shape {(n, n)}, instead got {h.shape}")
        if b_ineq.size != a_ineq.shape[0]:
            raise DimensionMismatchError(f"`b_ineq` must have {a_ineq.shape[0]} entries, instead got {b_ineq.size}")
        if lb.size != n or ub.size != n:
            raise DimensionMismatchError(f"bounds must have {n} entries")
        check_finite("h", h)
        check_finite("g", g)
        check_finite("a_ineq", a_ineq)
        if np.any(np.isnan(b_ineq)) or np.any(b_ineq == -np.inf):
            raise ContractViolationError("`b_ineq` must not contain NaN or -inf")
        if np.any(np.isnan(lb)) or np.any(np.isnan(ub)) or np.any(lb > ub):
            raise ContractViolationError("bounds must satisfy lb <= ub elementwise")
        check_symmetric("h", h)
        if n and eigvalsh(h, subset_by_index=[0, 0])[0] <= 0:
            raise ContractViolationError("Hessian must be positive definite")

    @property
    def n(self) -> int:
        """Number of decision variables."""
        return self.g.size

    @property
    def m(self) -> int:
        """Number of general inequality rows."""
        return self.b_ineq.size

    def objective(self, z: np.ndarray) -> float:
        """Objective `1/2 z' H z + g' z`."""
        return float(0.5 * z @ self.h @ z + self.g @ z)


@dataclass(frozen=True, eq=False)
class QPSolution:
    """Result of a solve.

    `y_ineq` are the multipliers of `A z <= b` (non-negative at optimality) and `y_box` those of the bounds, positive
    where the upper bound is active and negative where the lower bound is, so that `H z + g + A' y_ineq + y_box = 0`.
    For infeasible problems `kkt_residual` holds the residual of the infeasibility certificate instead.
    """

    z: np.ndarray
    objective: float
    status: QPStatus
    kkt_residual: float
    iterations: int
    y_ineq: np.ndarray = field(default_factory=lambda: np.zeros(0))
    y_box: np.ndarray = field(default_factory=lambda: np.zeros(0))

    @property
    def optimal(self) -> bool:
        """Whether the solve certified an optimum."""
        return self.status is QPStatus.OPTIMAL


class QPSolver(ABC):
    """Generic abstract QP solver.

    Solver instances may hold mutable workspace, so one instance should not be shared between threads.
    """

    @abstractmethod
    def solve(self, problem: QPProblem, warm_start: Optional[QPSolution] = None) -> QPSolution:
        """Solve a problem, optionally starting from a previous solution of a problem of the same dimensions."""
        ...
