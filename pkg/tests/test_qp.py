from itertools import product

import numpy as np  # type: ignore
import pytest

from kdpc.solvers import AdmmSolver, AdmmSolverSettings, QPProblem, QPStatus, dump_problem, kkt_residual, \
    load_problem, solve_qp
from kdpc.utils.checks import ContractViolationError, DimensionMismatchError


def _random_box_qp(rng: np.random.Generator) -> QPProblem:
    n = int(rng.integers(1, 5))
    m = rng.normal(size=(n, n))
    h = m @ m.T + 0.1 * np.eye(n)
    return QPProblem(h=0.5 * (h + h.T), g=3.0 * rng.normal(size=n), lb=-rng.uniform(0.1, 2.0, size=n),
                     ub=rng.uniform(0.1, 2.0, size=n))


def _brute_force(problem: QPProblem) -> np.ndarray:
    """Best feasible minimizer over every assignment of free/lower/upper to the variables."""
    best, best_value = None, np.inf
    for assignment in product((0, -1, 1), repeat=problem.n):
        assignment = np.array(assignment)
        z = np.where(assignment < 0, problem.lb, np.where(assignment > 0, problem.ub, 0.0))
        free = assignment == 0
        if free.any():
            rhs = problem.g[free] + problem.h[np.ix_(free, ~free)] @ z[~free]
            z[free] = np.linalg.solve(problem.h[np.ix_(free, free)], -rhs)
        if np.any(z < problem.lb - 1e-12) or np.any(z > problem.ub + 1e-12):
            continue
        value = problem.objective(z)
        if value < best_value:
            best, best_value = z, value
    return best


def test_random_box_qps_match_active_set_enumeration(rng):
    for _ in range(200):
        problem = _random_box_qp(rng)
        solution = solve_qp(problem)
        assert solution.status is QPStatus.OPTIMAL
        np.testing.assert_allclose(solution.z, _brute_force(problem), atol=1e-7)
        assert solution.kkt_residual <= 1e-8
        assert kkt_residual(problem, solution.z, solution.y_ineq, solution.y_box) <= 1e-8


def test_unconstrained_minimizer(rng):
    h = np.array([[4.0, 1.0], [1.0, 3.0]])
    g = np.array([1.0, -2.0])
    solution = solve_qp(QPProblem(h=h, g=g))
    assert solution.optimal
    np.testing.assert_allclose(solution.z, np.linalg.solve(h, -g), atol=1e-9)


def test_general_inequalities():
    # minimize |z - (1, 1)|^2 subject to z1 + z2 <= 1
    problem = QPProblem(h=2.0 * np.eye(2), g=np.array([-2.0, -2.0]), a_ineq=np.array([[1.0, 1.0]]),
                        b_ineq=np.array([1.0]))
    solution = solve_qp(problem)
    assert solution.optimal
    np.testing.assert_allclose(solution.z, [0.5, 0.5], atol=1e-8)
    np.testing.assert_allclose(solution.y_ineq, [1.0], atol=1e-8)


def test_solution_is_invariant_to_cost_scaling(rng):
    for _ in range(20):
        problem = _random_box_qp(rng)
        scaled = QPProblem(h=1e3 * problem.h, g=1e3 * problem.g, lb=problem.lb, ub=problem.ub)
        np.testing.assert_allclose(solve_qp(scaled).z, solve_qp(problem).z, atol=1e-7)


def test_warm_start_polishes_immediately(rng):
    problem = _random_box_qp(rng)
    solver = AdmmSolver()
    cold = solver.solve(problem)
    warm = solver.solve(problem, cold)
    assert warm.optimal
    assert warm.iterations == 0
    np.testing.assert_allclose(warm.z, cold.z, atol=1e-10)


def test_infeasible_problem():
    # z <= 0 and z >= 1
    problem = QPProblem(h=np.eye(1), g=np.zeros(1), a_ineq=np.array([[1.0]]), b_ineq=np.array([0.0]),
                        lb=np.array([1.0]))
    solution = solve_qp(problem)
    assert solution.status is QPStatus.INFEASIBLE
    assert not solution.optimal


def test_iteration_cap():
    problem = QPProblem(h=np.eye(2), g=np.array([-5.0, 5.0]), lb=-np.ones(2), ub=np.ones(2))
    solution = AdmmSolver(AdmmSolverSettings(max_iter=1, polish=False)).solve(problem)
    assert solution.status is QPStatus.MAX_ITER
    assert solution.iterations == 1


def test_kkt_residual_detects_wrong_point():
    problem = QPProblem(h=np.eye(2), g=np.array([-1.0, 0.0]), lb=-np.ones(2), ub=np.ones(2))
    assert kkt_residual(problem, np.array([1.0, 0.0]), np.zeros(0), np.zeros(2)) <= 1e-15
    assert kkt_residual(problem, np.array([0.5, 0.0]), np.zeros(0), np.zeros(2)) > 0.1


def test_problem_validation():
    with pytest.raises(ContractViolationError):
        QPProblem(h=np.array([[1.0, 0.0], [0.0, -1.0]]), g=np.zeros(2))
    with pytest.raises(ContractViolationError):
        QPProblem(h=np.eye(1), g=np.zeros(1), lb=np.ones(1), ub=np.zeros(1))
    with pytest.raises(DimensionMismatchError):
        QPProblem(h=np.eye(2), g=np.zeros(3))
    with pytest.raises(ContractViolationError):
        AdmmSolverSettings(alpha=2.0)


def test_dumped_problem_reloads(tmp_path, rng):
    problem = QPProblem(h=2.0 * np.eye(3), g=rng.normal(size=3), a_ineq=rng.normal(size=(2, 3)),
                        b_ineq=np.ones(2), lb=-np.ones(3))
    loaded = load_problem(dump_problem(problem, tmp_path))
    for name in ("h", "g", "a_ineq", "b_ineq", "lb", "ub"):
        np.testing.assert_array_equal(getattr(loaded, name), getattr(problem, name))
