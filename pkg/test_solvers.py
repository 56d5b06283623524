"""
软阈值、ISTA/FISTA、约束稀疏编码器与 ML-FISTA 的测试
"""
import itertools

import numpy as np
import pytest
from numpy.testing import assert_allclose, assert_array_equal

from core.errors import DimensionError, InfeasibleCodeError, ParameterError
from core.linalg import column_normalize, spectral_norm
from genmodel.spec import DeepModelSpec
from genmodel.synthesis import synthesize
from solvers.base_solver import lasso_objective
from solvers.coder_factory import (SparseCoderFactory, sparse_code_columns,
                                   sparse_code_constrained)
from solvers.fista_solver import FistaSolver, fista
from solvers.ista_solver import IstaSolver, ista
from solvers.ml_fista import ml_fista
from solvers.solver_factory import LassoSolverFactory
from solvers.sparse_coder import SparseCoderConfig
from solvers.thresholding import (nonneg_soft_threshold, relu, soft_threshold,
                                  soft_threshold_relu)


def coordinate_descent_lasso(A, y, lam, sweeps=20000, tol=1e-12):
    """独立的坐标下降 LASSO 求解，作为对照"""
    r = A.shape[1]
    x = np.zeros(r)
    col_sq = np.sum(A * A, axis=0)
    resid = y.copy()
    for _ in range(sweeps):
        biggest = 0.0
        for j in range(r):
            old = x[j]
            rho = A[:, j] @ resid + col_sq[j] * old
            new = np.sign(rho) * max(abs(rho) - lam, 0.0) / col_sq[j]
            if new != old:
                resid -= A[:, j] * (new - old)
                x[j] = new
                biggest = max(biggest, abs(new - old))
        if biggest < tol:
            break
    return x


def exhaustive_support(A, y, eps, max_size=2):
    """枚举所有不超过 max_size 的支撑集，返回能把残差压到 eps 以下的最小支撑集"""
    for size in range(1, max_size + 1):
        for support in itertools.combinations(range(A.shape[1]), size):
            As = A[:, support]
            coef, *_ = np.linalg.lstsq(As, y, rcond=None)
            if np.linalg.norm(y - As @ coef) <= eps:
                return set(support)
    return None


def test_soft_threshold_examples():
    assert soft_threshold(2.0, 0.5) == 1.5
    assert soft_threshold(-2.0, 0.5) == -1.5
    assert soft_threshold(0.3, 0.5) == 0.0
    assert nonneg_soft_threshold(-2.0, 0.5) == 0.0
    assert nonneg_soft_threshold(2.0, 0.5) == 1.5
    with pytest.raises(ParameterError):
        soft_threshold(1.0, -0.1)


def test_soft_threshold_equals_two_sided_relu():
    rng = np.random.default_rng(0)
    y = rng.normal(scale=3.0, size=10000)
    lam = rng.uniform(0.0, 3.0, size=10000)
    assert_array_equal(soft_threshold(y, lam), soft_threshold_relu(y, lam))
    piecewise = np.where(y > lam, y - lam, np.where(y < -lam, y + lam, 0.0))
    assert_array_equal(soft_threshold(y, lam), piecewise)
    assert_array_equal(nonneg_soft_threshold(y, lam), relu(y - lam))


def test_solver_factory():
    assert isinstance(LassoSolverFactory.get_solver('ISTA'), IstaSolver)
    assert isinstance(LassoSolverFactory.get_solver('fista'), FistaSolver)
    with pytest.raises(ValueError):
        LassoSolverFactory.get_solver('admm')


def test_fista_matches_coordinate_descent_oracle():
    rng = np.random.default_rng(1)
    for _ in range(25):
        A = rng.standard_normal((20, 50))
        y = rng.standard_normal(20)
        lam = 0.1 * float(np.max(np.abs(A.T @ y)))
        x, report = fista(A, y, lam, 20000)
        oracle = coordinate_descent_lasso(A, y, lam)
        f_fista = lasso_objective(A, y, x, lam)
        f_oracle = lasso_objective(A, y, oracle, lam)
        assert abs(f_fista - f_oracle) <= 1e-6 * f_oracle
        assert report.final_objective == pytest.approx(f_fista)


def test_ista_objective_is_monotone():
    rng = np.random.default_rng(2)
    A = rng.standard_normal((15, 30))
    y = rng.standard_normal(15)
    _, report = ista(A, y, 0.2, 300, record_objective=True)
    trace = np.asarray(report.objective_trace)
    assert len(trace) == 300
    assert np.all(np.diff(trace) <= 1e-12 * np.abs(trace[:-1]))


def test_batched_solve_matches_column_solves():
    rng = np.random.default_rng(3)
    A = rng.standard_normal((10, 25))
    Y = rng.standard_normal((10, 4))
    lams = np.array([0.05, 0.2, 0.5, 1.0])
    X, _ = fista(A, Y, lams, 500)
    for j in range(4):
        x_j, _ = fista(A, Y[:, j], lams[j], 500)
        assert_allclose(X[:, j], x_j, atol=1e-9)


def test_solver_input_validation_and_early_stop():
    A = np.eye(3)
    x, report = fista(A, np.array([2.0, -0.1, 0.0]), 0.5, 100, tol=1e-12)
    assert_allclose(x, [1.5, 0.0, 0.0], atol=1e-10)
    assert report.converged and report.iterations_used < 100
    with pytest.raises(ParameterError):
        ista(A, np.ones(3), 0.1, 0)
    with pytest.raises(DimensionError):
        ista(A, np.ones(4), 0.1, 10)
    with pytest.raises(DimensionError):
        fista(A, np.ones((3, 2)), np.array([0.1, 0.2, 0.3]), 10)
    x, report = ista(np.zeros((2, 3)), np.ones(2), 0.1, 10)
    assert_array_equal(x, np.zeros(3))
    assert report.iterations_used == 0


def test_constrained_coder_recovers_exhaustive_support():
    rng = np.random.default_rng(4)
    eps = 1e-6
    matches = 0
    for _ in range(25):
        A = column_normalize(rng.standard_normal((10, 20)))
        x = np.zeros(20)
        support = rng.choice(20, size=2, replace=False)
        x[support] = rng.choice([-1.0, 1.0], size=2) * rng.uniform(1.0, 2.0, size=2)
        y = A @ x
        x_hat, report = sparse_code_constrained(A, y, eps)
        assert report.final_residual_norm <= eps * (1 + 1e-3) + 1e-7
        found = set(np.flatnonzero(np.abs(x_hat) > 1e-4 * np.abs(x_hat).max()))
        if found == exhaustive_support(A, y, 1e-9):
            matches += 1
    assert matches >= 24


def test_constrained_coder_edge_cases():
    rng = np.random.default_rng(5)
    A = column_normalize(rng.standard_normal((8, 16)))
    y = rng.standard_normal(8)
    x, report = sparse_code_constrained(A, y, float(np.linalg.norm(y)) + 1.0)
    assert_array_equal(x, np.zeros(16))
    assert report.converged

    tall = rng.standard_normal((6, 3))
    with pytest.raises(InfeasibleCodeError) as info:
        sparse_code_columns(tall, rng.standard_normal((6, 2)), 1e-3)
    assert info.value.column == 0 and info.value.floor > 1e-3

    with pytest.raises(ParameterError):
        sparse_code_constrained(A, y, -1.0)


def test_lars_coder_agrees_with_bisection():
    rng = np.random.default_rng(6)
    A = column_normalize(rng.standard_normal((12, 30)))
    Y = rng.standard_normal((12, 5))
    eps = 0.3
    X_bis, reports_bis = sparse_code_columns(A, Y, eps, SparseCoderConfig(coder="bisection"))
    X_lars, reports_lars = sparse_code_columns(A, Y, eps, SparseCoderConfig(coder="lars"))
    for j in range(5):
        assert reports_lars[j].final_residual_norm <= eps * (1 + 1e-3) + 1e-7
        assert np.abs(X_lars[:, j]).sum() == pytest.approx(np.abs(X_bis[:, j]).sum(), rel=5e-3)
    with pytest.raises(ValueError):
        SparseCoderFactory.get_coder("omp")


def test_parallel_blocks_are_deterministic():
    rng = np.random.default_rng(7)
    A = column_normalize(rng.standard_normal((10, 20)))
    Y = rng.standard_normal((10, 9))
    cfg = SparseCoderConfig(block_size=2)
    X1, _ = sparse_code_columns(A, Y, 0.5, cfg, n_jobs=1)
    X4, _ = sparse_code_columns(A, Y, 0.5, cfg, n_jobs=4)
    assert_array_equal(X1, X4)


def test_ml_fista_reduces_to_fista_on_product():
    rng = np.random.default_rng(8)
    A1 = rng.standard_normal((15, 25)) / np.sqrt(15)
    A2 = rng.standard_normal((10, 15)) / np.sqrt(10)
    y = rng.standard_normal(10)
    M1, M2 = spectral_norm(A1) ** 2, spectral_norm(A2) ** 2
    x_ml = ml_fista([A1, A2], y, [0.05, 0.0], 150, lipschitz=[M1, M2])
    x_ref, _ = fista(A2 @ A1, y, 0.05, 150, lipschitz=M1 * M2)
    assert_allclose(x_ml, x_ref, rtol=1e-8, atol=1e-10)


def test_ml_fista_single_layer_is_fista():
    rng = np.random.default_rng(9)
    A = rng.standard_normal((12, 20))
    y = rng.standard_normal(12)
    x_ml = ml_fista([A], y, [0.3], 120)
    x_ref, _ = fista(A, y, 0.3, 120)
    assert_allclose(x_ml, x_ref, rtol=1e-8, atol=1e-10)


def test_ml_fista_validation():
    A1 = np.ones((4, 6))
    A2 = np.ones((3, 5))
    with pytest.raises(DimensionError):
        ml_fista([A1, A2], np.ones(3), [0.1, 0.1], 10)
    with pytest.raises(ParameterError):
        ml_fista([A1], np.ones(4), [0.1, 0.1], 10)
    with pytest.raises(ParameterError):
        ml_fista([A1], np.ones(4), [-0.1], 10)


def _seed9_problem():
    rng = np.random.default_rng(9)
    A = rng.standard_normal((20, 50))
    y = rng.standard_normal(20)
    return A, y


def test_ista_identity_single_step_is_soft_threshold():
    y = np.array([2.0, -0.3, -2.0, 0.7, 0.0])
    x, report = ista(np.eye(5), y, 0.5, 1)
    assert_allclose(x, soft_threshold(y, 0.5), atol=1e-12)
    assert report.iterations_used == 1


def test_ista_matches_coordinate_descent_oracle():
    A, y = _seed9_problem()
    lam = 0.2 * float(np.max(np.abs(A.T @ y)))
    x, _ = ista(A, y, lam, 5000)
    oracle = coordinate_descent_lasso(A, y, lam)
    f_ista = lasso_objective(A, y, x, lam)
    f_oracle = lasso_objective(A, y, oracle, lam)
    assert abs(f_ista - f_oracle) <= 1e-6 * f_oracle
    x_fast, _ = fista(A, y, lam, 5000)
    assert abs(lasso_objective(A, y, x_fast, lam) - f_oracle) <= 1e-6 * f_oracle


def test_oracle_solution_is_a_proximal_fixed_point():
    A, y = _seed9_problem()
    lam = 0.2 * float(np.max(np.abs(A.T @ y)))
    x = coordinate_descent_lasso(A, y, lam)
    M = spectral_norm(A) ** 2
    step = soft_threshold(x + A.T @ (y - A @ x) / M, lam / M)
    assert np.abs(step - x).max() < 1e-8


def test_ista_without_penalty_inverts_square_system():
    rng = np.random.default_rng(10)
    A = np.eye(8) + 0.2 * rng.standard_normal((8, 8)) / np.sqrt(8)
    y = rng.standard_normal(8)
    x, report = ista(A, y, 0.0, 2000)
    assert_allclose(x, np.linalg.solve(A, y), atol=1e-6)
    assert report.final_residual_norm < 1e-6


def test_fista_beats_ista_on_least_squares_at_equal_budget():
    A, y = _seed9_problem()
    _, slow = ista(A, y, 0.0, 100)
    _, fast = fista(A, y, 0.0, 100)
    assert fast.final_residual_norm <= slow.final_residual_norm


def test_bisection_residuals_shrink_with_lambda():
    rng = np.random.default_rng(11)
    A = column_normalize(rng.standard_normal((10, 20)))
    y = rng.standard_normal(10)
    _, report = sparse_code_constrained(A, y, 0.2 * float(np.linalg.norm(y)))
    trace = sorted(report.bisection_trace, key=lambda pair: -pair[0])
    assert len(trace) > 2
    residuals = [res for _, res in trace]
    for before, after in zip(residuals, residuals[1:]):
        assert after <= before + 1e-7


def test_identity_with_zero_tolerance_returns_observation():
    y = np.array([1.5, -0.2, 0.0, 3.0])
    x, report = sparse_code_constrained(np.eye(4), y, 0.0)
    assert_allclose(x, y, atol=1e-8)
    assert report.final_residual_norm <= 1e-8


def test_ml_fista_keeps_deep_codes_on_true_support():
    spec = DeepModelSpec(dims=((20, 30), (16, 20)), code_sparsity=1, column_sparsities=(2,))
    instance = synthesize(spec, 3, seed=4)
    A1, A2 = instance.dictionary(1), instance.dictionary(2)
    for j in range(instance.n):
        truth = instance.codes[:, j]
        x = ml_fista([A1, A2], instance.observations[:, j], [0.01, 0.01], 1000)
        off = np.abs(x[truth == 0])
        assert off.max() < 0.1
        assert truth[np.argmax(np.abs(x))] != 0
