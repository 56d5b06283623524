"""
ISTA：x_k = s_{λ/M}(x_{k−1} − (1/M)·Aᵀ(Ax_{k−1} − y))
"""
from typing import Optional, Tuple

import numpy as np

from core.types import Matrix
from solvers.base_solver import (DEFAULT_CONVERGENCE_TOL, BaseLassoSolver,
                                 SolverReport, finish_report, lasso_objective)
from solvers.thresholding import soft_threshold


class IstaSolver(BaseLassoSolver):
    """迭代软阈值算法"""

    name = "ista"

    def _iterate(self, A: Matrix, Y: np.ndarray, lam: np.ndarray, K: int, X0: np.ndarray,
                 M: float, tol: Optional[float],
                 record_objective: bool) -> Tuple[np.ndarray, SolverReport]:
        grad = self._gradient_operator(A, Y)
        threshold = lam / M
        trace = [] if record_objective else None
        X = X0
        converged = False
        k = 0
        for k in range(1, K + 1):
            X_new = soft_threshold(X - grad(X) / M, threshold)
            converged = self._step_converged(X_new, X, tol or DEFAULT_CONVERGENCE_TOL)
            X = X_new
            if trace is not None:
                trace.append(lasso_objective(A, Y, X, lam))
            if tol is not None and converged:
                break
        return X, finish_report(A, Y, X, lam, k, converged, trace)


def ista(A, y, lam, K, x0=None, lipschitz=None, tol=None, record_objective=False):
    """IstaSolver().solve 的函数形式"""
    return IstaSolver().solve(A, y, lam, K, x0=x0, lipschitz=lipschitz, tol=tol,
                              record_objective=record_objective)
