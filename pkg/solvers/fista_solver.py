"""
FISTA：在 ISTA 的近端步上加 Nesterov 动量
"""
import math
from typing import Optional, Tuple

import numpy as np

from core.types import Matrix
from solvers.base_solver import (DEFAULT_CONVERGENCE_TOL, BaseLassoSolver,
                                 SolverReport, finish_report, lasso_objective)
from solvers.thresholding import soft_threshold


def momentum_step(t: float) -> Tuple[float, float]:
    """返回 (t_{k+1}, 外推系数 (t_k − 1)/t_{k+1})"""
    t_next = (1.0 + math.sqrt(1.0 + 4.0 * t * t)) / 2.0
    return t_next, (t - 1.0) / t_next


class FistaSolver(BaseLassoSolver):
    """
    快速迭代软阈值算法

    x_k = s_{λ/M}(z_k − (1/M)∇f(z_k))
    t_{k+1} = (1 + √(1 + 4t_k²))/2
    z_{k+1} = x_k + ((t_k − 1)/t_{k+1})(x_k − x_{k−1})
    """

    name = "fista"

    def _iterate(self, A: Matrix, Y: np.ndarray, lam: np.ndarray, K: int, X0: np.ndarray,
                 M: float, tol: Optional[float],
                 record_objective: bool) -> Tuple[np.ndarray, SolverReport]:
        grad = self._gradient_operator(A, Y)
        threshold = lam / M
        trace = [] if record_objective else None
        X_prev = X0
        Z = X0
        t = 1.0
        converged = False
        k = 0
        for k in range(1, K + 1):
            X = soft_threshold(Z - grad(Z) / M, threshold)
            t, beta = momentum_step(t)
            Z = X + beta * (X - X_prev)
            converged = self._step_converged(X, X_prev, tol or DEFAULT_CONVERGENCE_TOL)
            X_prev = X
            if trace is not None:
                trace.append(lasso_objective(A, Y, X, lam))
            if tol is not None and converged:
                break
        return X_prev, finish_report(A, Y, X_prev, lam, k, converged, trace)


def fista(A, y, lam, K, x0=None, lipschitz=None, tol=None, record_objective=False):
    """FistaSolver().solve 的函数形式"""
    return FistaSolver().solve(A, y, lam, K, x0=x0, lipschitz=lipschitz, tol=tol,
                               record_objective=record_objective)
