"""Dense quadratic program solvers and their independent optimality checks."""

from kdpc.solvers._solver import QPProblem, QPSolution, QPSolver, QPStatus
from kdpc.solvers.admm import AdmmSolver, AdmmSolverSettings, solve_qp
from kdpc.solvers.dump import dump_problem, load_problem
from kdpc.solvers.kkt import kkt_residual

__all__ = [
    "QPProblem", "QPSolution", "QPSolver", "QPStatus",
    "AdmmSolver", "AdmmSolverSettings", "solve_qp",
    "dump_problem", "load_problem",
    "kkt_residual",
]
