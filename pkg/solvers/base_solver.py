"""
LASSO 近端梯度求解器的抽象基类

min_x ½‖y − Ax‖₂² + λ‖x‖₁，y 可以是单列向量，也可以是按列批量求解的矩阵，
λ 可以是标量或每列一个值。子类只需实现迭代本身。
"""
from abc import ABC, abstractmethod
from dataclasses import dataclass, field
from typing import List, Optional, Tuple

import numpy as np

from core.errors import DimensionError, ParameterError
from core.linalg import spectral_norm
from core.types import Matrix, as_matrix

# 未指定 tol 时用该阈值判定 converged 标志，但不提前停止
DEFAULT_CONVERGENCE_TOL = 1e-9


@dataclass
class SolverReport:
    """
    单次求解的报告

    Attributes:
        iterations_used: 实际迭代次数
        final_objective: 最终目标函数值（批量时为各列之和）
        final_residual_norm: ‖y − Ax‖（批量时为 Frobenius 范数）
        converged: 相邻迭代的相对变化是否低于容差
        objective_trace: record_objective 为真时每步的目标值
    """
    iterations_used: int
    final_objective: float
    final_residual_norm: float
    converged: bool
    objective_trace: Optional[List[float]] = field(default=None)


def lasso_objective(A: Matrix, y: np.ndarray, x: np.ndarray, lam) -> float:
    """½‖y − Ax‖² + Σ_j λ_j‖x_j‖₁"""
    resid = y - A @ x
    l1 = np.abs(x).sum(axis=0)
    return float(0.5 * np.sum(resid * resid) + np.sum(np.asarray(lam) * l1))


class BaseLassoSolver(ABC):
    """ISTA/FISTA 等近端梯度法的抽象基类"""

    name = "base"

    def solve(self, A: Matrix, y, lam, K: int, x0=None,
              lipschitz: Optional[float] = None, tol: Optional[float] = None,
              record_objective: bool = False) -> Tuple[np.ndarray, SolverReport]:
        """
        求解 LASSO

        Args:
            A: d×r 字典
            y: 长度 d 的向量，或 d×m 矩阵（逐列独立求解）
            lam: 非负正则系数，标量或长度 m 的数组
            K: 最大迭代次数，必须为正
            x0: 初始点，缺省为零
            lipschitz: 梯度 Lipschitz 常数 M 的覆盖值，缺省为 ‖A‖₂²
            tol: 提前停止的相对步长容差；None 时跑满 K 步
            record_objective: 是否记录每步目标值

        Returns:
            (x, SolverReport)，x 与 y 同为向量或矩阵

        Raises:
            ParameterError: 参数不合法
            DimensionError: 维度不一致
        """
        A = as_matrix(A, "A")
        y_arr = np.asarray(y, dtype=np.float64)
        vector_input = y_arr.ndim == 1
        Y = y_arr.reshape(-1, 1) if vector_input else y_arr
        if Y.shape[0] != A.shape[0]:
            raise DimensionError(f"y 的长度 {Y.shape[0]} 与 A 的行数 {A.shape[0]} 不一致")
        if K < 1:
            raise ParameterError(f"迭代次数 K 必须为正，实际为 {K}")

        lam_arr = np.asarray(lam, dtype=np.float64)
        if np.any(lam_arr < 0):
            raise ParameterError(f"lambda 必须非负，实际为 {lam}")
        if lam_arr.ndim == 1 and lam_arr.shape[0] != Y.shape[1]:
            raise DimensionError(f"lambda 的个数 {lam_arr.shape[0]} 与列数 {Y.shape[1]} 不一致")

        r = A.shape[1]
        if x0 is None:
            X0 = np.zeros((r, Y.shape[1]))
        else:
            X0 = np.array(x0, dtype=np.float64).reshape(r, -1)
            if X0.shape[1] != Y.shape[1]:
                raise DimensionError(f"x0 的形状 {X0.shape} 与 y 不一致")

        if lipschitz is not None:
            M = float(lipschitz)
        else:
            M = spectral_norm(A) ** 2 if np.any(A) else 0.0
        if M <= 0:
            # A = 0：目标只剩 λ‖x‖₁，零解最优
            X = np.zeros_like(X0)
            report = SolverReport(0, lasso_objective(A, Y, X, lam_arr), float(np.linalg.norm(Y)), True,
                                  [] if record_objective else None)
            return (X[:, 0] if vector_input else X), report

        X, report = self._iterate(A, Y, lam_arr, K, X0, M, tol, record_objective)
        return (X[:, 0] if vector_input else X), report

    @staticmethod
    def _gradient_operator(A: Matrix, Y: np.ndarray):
        """返回 x ↦ Aᵀ(Ax − y)；字典明显过完备时预先构造 Gram 矩阵更省"""
        d, r = A.shape
        AtY = A.T @ Y
        if r <= 2 * d:
            G = A.T @ A
            return lambda X: G @ X - AtY
        return lambda X: A.T @ (A @ X) - AtY

    @staticmethod
    def _step_converged(X_new: np.ndarray, X_old: np.ndarray, tol: float) -> bool:
        return bool(np.linalg.norm(X_new - X_old) <= tol * max(1.0, float(np.linalg.norm(X_new))))

    @abstractmethod
    def _iterate(self, A: Matrix, Y: np.ndarray, lam: np.ndarray, K: int, X0: np.ndarray,
                 M: float, tol: Optional[float],
                 record_objective: bool) -> Tuple[np.ndarray, SolverReport]:
        """
        在已校验的批量输入上执行迭代

        Args:
            A: d×r 字典
            Y: d×m 观测
            lam: 标量或长度 m 的正则系数
            K: 最大迭代次数
            X0: r×m 初始点
            M: 步长倒数
            tol: 提前停止容差
            record_objective: 是否记录目标值

        Returns:
            (X, SolverReport)
        """
        pass


def finish_report(A: Matrix, Y: np.ndarray, X: np.ndarray, lam, iterations: int,
                  converged: bool, trace: Optional[List[float]]) -> SolverReport:
    """由最终迭代点生成报告"""
    return SolverReport(
        iterations_used=iterations,
        final_objective=lasso_objective(A, Y, X, lam),
        final_residual_norm=float(np.linalg.norm(Y - A @ X)),
        converged=converged,
        objective_trace=trace,
    )
