"""Dense operator-splitting (ADMM) QP solver with solution polishing.

The problem is rewritten as `l <= C z <= u` with `C = [A; I]`, `l = [-inf; lb]` and `u = [b; ub]` and solved with
relaxed ADMM iterations on a cached Cholesky factorization of `H + sigma I + C' diag(rho) C`. Periodically the
iterate is checked for convergence and infeasibility and a polishing step solves the equality-constrained problem on
the guessed active set, which yields solutions accurate to round-off.
"""

import logging
import warnings
from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np  # type: ignore
from scipy.linalg import LinAlgError, LinAlgWarning, cho_factor, cho_solve, lstsq, solve  # type: ignore

from kdpc.solvers._solver import QPProblem, QPSolution, QPSolver, QPStatus
from kdpc.solvers.kkt import kkt_residual
from kdpc.utils.checks import ContractViolationError

log = logging.getLogger(__name__)
log.addHandler(logging.NullHandler())

_RHO_MIN = 1e-6
_RHO_MAX = 1e6
_EQUALITY_RHO_SCALE = 1e3
_RHO_ADAPT_RATIO = 5.0


def _norm(value: np.ndarray) -> float:
    return float(np.max(np.abs(value), initial=0.0))


@dataclass(frozen=True)
class AdmmSolverSettings:
    """Tunable parameters of the ADMM solver."""

    rho: float = 0.1
    sigma: float = 1e-6
    alpha: float = 1.6
    tol: float = 1e-8
    max_iter: int = 20000
    check_every: int = 25
    adaptive_rho: bool = True
    polish: bool = True
    polish_passes: int = 10
    eps_infeasible: float = 1e-5

    def __post_init__(self) -> None:
        """Validate the settings."""
        if not (self.rho > 0 and self.sigma > 0 and self.tol > 0 and self.eps_infeasible > 0):
            raise ContractViolationError("rho, sigma and the tolerances must be strictly positive")
        if not 0 < self.alpha < 2:
            raise ContractViolationError(f"relaxation must lie in (0, 2), instead got {self.alpha}")
        if self.max_iter < 1 or self.check_every < 1 or self.polish_passes < 1:
            raise ContractViolationError("iteration counts must be at least one")


@dataclass
class _Workspace:
    problem: QPProblem
    c: np.ndarray
    l: np.ndarray
    u: np.ndarray
    rho_base: float
    rho: np.ndarray
    factor: Tuple[np.ndarray, bool]


class AdmmSolver(QPSolver):
    """OSQP-style ADMM solver for small dense problems."""

    settings: AdmmSolverSettings

    def __init__(self, settings: Optional[AdmmSolverSettings] = None) -> None:
        """Initialize the solver with its settings."""
        self.settings = settings if settings is not None else AdmmSolverSettings()

    def solve(self, problem: QPProblem, warm_start: Optional[QPSolution] = None) -> QPSolution:
        """Solve a problem, warm-starting from a previous solution of the same dimensions if one is given."""
        settings = self.settings
        n, m = problem.n, problem.m
        work = self._setup(problem)

        if warm_start is not None and warm_start.z.size == n and warm_start.y_ineq.size == m \
                and warm_start.y_box.size == n:
            x = np.array(warm_start.z, dtype=np.float64)
            y = np.concatenate([warm_start.y_ineq, warm_start.y_box]).astype(np.float64)
            z = np.clip(work.c @ x, work.l, work.u)
            polished = self._polish(work, z, y)
            if polished is not None:
                return polished
        else:
            x, y = np.zeros(n), np.zeros(m + n)
            z = np.clip(work.c @ x, work.l, work.u)

        best: Optional[Tuple[float, np.ndarray, np.ndarray]] = None
        for k in range(1, settings.max_iter + 1):
            y_prev = y
            rhs = settings.sigma * x - problem.g + work.c.T @ (work.rho * z - y)
            x_tilde = cho_solve(work.factor, rhs)
            z_tilde = work.c @ x_tilde
            x = settings.alpha * x_tilde + (1.0 - settings.alpha) * x
            z_hat = settings.alpha * z_tilde + (1.0 - settings.alpha) * z
            z = np.clip(z_hat + y / work.rho, work.l, work.u)
            y = y + work.rho * (z_hat - z)

            if k % settings.check_every and k != settings.max_iter:
                continue

            certificate = self._infeasibility(work, y - y_prev)
            if certificate is not None:
                log.debug("QP primal infeasible after %d iterations", k)
                return QPSolution(z=x, objective=problem.objective(x), status=QPStatus.INFEASIBLE,
                                  kkt_residual=certificate, iterations=k, y_ineq=y[:m], y_box=y[m:])

            if settings.polish:
                polished = self._polish(work, z, y, iterations=k)
                if polished is not None:
                    return polished

            c_x, h_x, c_y = work.c @ x, problem.h @ x, work.c.T @ y
            primal = _norm(c_x - z) / (1.0 + max(_norm(c_x), _norm(z)))
            dual = _norm(h_x + problem.g + c_y) / (1.0 + max(_norm(h_x), _norm(c_y), _norm(problem.g)))
            if primal <= settings.tol and dual <= settings.tol:
                residual = kkt_residual(problem, x, y[:m], y[m:])
                if residual <= settings.tol:
                    return QPSolution(z=x, objective=problem.objective(x), status=QPStatus.OPTIMAL,
                                      kkt_residual=residual, iterations=k, y_ineq=y[:m], y_box=y[m:])

            score = max(primal, dual)
            if best is None or score < best[0]:
                best = (score, x.copy(), y.copy())
            if settings.adaptive_rho and primal > 0 and dual > 0:
                self._adapt_rho(work, np.sqrt(primal / dual))

        _, x, y = best if best is not None else (np.inf, x, y)
        log.debug("QP hit the iteration cap of %d", settings.max_iter)
        return QPSolution(z=x, objective=problem.objective(x), status=QPStatus.MAX_ITER,
                          kkt_residual=kkt_residual(problem, x, y[:m], y[m:]), iterations=settings.max_iter,
                          y_ineq=y[:m], y_box=y[m:])

    def _setup(self, problem: QPProblem) -> _Workspace:
        n = problem.n
        c = np.vstack([problem.a_ineq, np.eye(n)])
        l = np.concatenate([np.full(problem.m, -np.inf), problem.lb])
        u = np.concatenate([problem.b_ineq, problem.ub])
        rho = self._rho_vector(l, u, self.settings.rho)
        work = _Workspace(problem=problem, c=c, l=l, u=u, rho_base=self.settings.rho, rho=rho,
                          factor=self._factorize(problem, c, rho))
        return work

    @staticmethod
    def _rho_vector(l: np.ndarray, u: np.ndarray, rho_base: float) -> np.ndarray:
        rho = np.full(l.size, rho_base)
        rho[l == u] = rho_base * _EQUALITY_RHO_SCALE
        rho[np.isinf(l) & np.isinf(u)] = _RHO_MIN
        return np.clip(rho, _RHO_MIN, _RHO_MAX)

    def _factorize(self, problem: QPProblem, c: np.ndarray, rho: np.ndarray) -> Tuple[np.ndarray, bool]:
        matrix = problem.h + self.settings.sigma * np.eye(problem.n) + c.T @ (rho[:, np.newaxis] * c)
        return cho_factor(matrix, lower=True, check_finite=False)

    def _adapt_rho(self, work: _Workspace, ratio: float) -> None:
        if 1.0 / _RHO_ADAPT_RATIO <= ratio <= _RHO_ADAPT_RATIO:
            return
        rho_base = float(np.clip(work.rho_base * ratio, _RHO_MIN, _RHO_MAX))
        if rho_base == work.rho_base:
            return
        work.rho_base = rho_base
        work.rho = self._rho_vector(work.l, work.u, rho_base)
        work.factor = self._factorize(work.problem, work.c, work.rho)

    def _infeasibility(self, work: _Workspace, delta_y: np.ndarray) -> Optional[float]:
        """Residual of a primal infeasibility certificate built from the last dual step, if it certifies one."""
        eps = self.settings.eps_infeasible
        scale = _norm(delta_y)
        if scale <= eps:
            return None
        direction = delta_y / scale
        positive, negative = np.maximum(direction, 0.0), np.minimum(direction, 0.0)
        # a certificate may not put weight on an infinite bound
        upper_finite, lower_finite = np.isfinite(work.u), np.isfinite(work.l)
        if np.any(positive[~upper_finite] > eps) or np.any(negative[~lower_finite] < -eps):
            return None
        support = work.u[upper_finite] @ positive[upper_finite] + work.l[lower_finite] @ negative[lower_finite]
        if support >= -eps:
            return None
        residual = _norm(work.c.T @ direction)
        return residual if residual < eps else None

    def _polish(self, work: _Workspace, z: np.ndarray, y: np.ndarray, iterations: int = 0) -> Optional[QPSolution]:
        """Refine an iterate by solving the KKT system on its guessed active set.

        Wrong-signed multipliers are released and violated constraints added until the active set is consistent; the
        result is only accepted if it passes the independent KKT check.
        """
        problem, c, l, u = work.problem, work.c, work.l, work.u
        equality = l == u
        lower = (z - l < -y) & ~equality
        upper = (u - z < y) & ~equality
        for _ in range(self.settings.polish_passes):
            active = lower | upper | equality
            rows = np.flatnonzero(active)
            x, multipliers = self._solve_kkt(problem, c[rows], np.where(lower[rows], l[rows], u[rows]))
            y_full = np.zeros(l.size)
            y_full[rows] = multipliers

            c_x = c @ x
            tol = self.settings.tol * (1.0 + _norm(c_x))
            wrong = (lower & (y_full > 0)) | (upper & (y_full < 0))
            low_violated = ~active & (c_x < l - tol)
            up_violated = ~active & (c_x > u + tol)
            if not (wrong.any() or low_violated.any() or up_violated.any()):
                break
            lower = (lower & ~wrong) | low_violated
            upper = (upper & ~wrong) | up_violated
        else:
            return None

        m = problem.m
        residual = kkt_residual(problem, x, y_full[:m], y_full[m:])
        if residual > self.settings.tol:
            return None
        log.debug("QP polished after %d iterations with %d active constraints", iterations, rows.size)
        return QPSolution(z=x, objective=problem.objective(x), status=QPStatus.OPTIMAL, kkt_residual=residual,
                          iterations=iterations, y_ineq=y_full[:m], y_box=y_full[m:])

    @staticmethod
    def _solve_kkt(problem: QPProblem, c_active: np.ndarray, target: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
        n, k = problem.n, c_active.shape[0]
        kkt = np.block([[problem.h, c_active.T], [c_active, np.zeros((k, k))]])
        rhs = np.concatenate([-problem.g, target])
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", LinAlgWarning)
            try:
                solution = solve(kkt, rhs, assume_a="sym", check_finite=False)
            except LinAlgError:
                solution = lstsq(kkt, rhs, check_finite=False)[0]
        return solution[:n], solution[n:]


def solve_qp(problem: QPProblem, tol: float = 1e-8, max_iter: int = 20000,
             warm_start: Optional[QPSolution] = None) -> QPSolution:
    """Solve a QP with a fresh ADMM solver of the given tolerance and iteration cap."""
    return AdmmSolver(AdmmSolverSettings(tol=tol, max_iter=max_iter)).solve(problem, warm_start)
