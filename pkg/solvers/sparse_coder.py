"""
约束稀疏编码器的抽象基类

对每一列求解 min ‖x‖₁ s.t. ‖y − Ax‖₂ ≤ ε。子类实现单个列块的编码，
基类负责参数校验、可行性下界检查、分块以及 joblib 线程并行。
"""
import logging
from abc import ABC, abstractmethod
from dataclasses import dataclass, field
from typing import List, Optional, Tuple

import numpy as np
from joblib import Parallel, delayed
from scipy import linalg as sp_linalg

from core.errors import DimensionError, InfeasibleCodeError, ParameterError
from core.linalg import spectral_norm
from core.types import Matrix, as_matrix
from solvers.base_solver import SolverReport

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class SparseCoderConfig:
    """
    约束稀疏编码的参数

    Attributes:
        coder: 编码器名称，'bisection' 或 'lars'
        feas_tol: 残差允许超出 ε 的相对量
        max_bisections: λ 二分的最大步数
        lambda_lo_ratio: λ 下界与 ‖Aᵀy‖_∞ 之比
        inner_max_iter: 每个 λ 上 FISTA 的迭代上限
        inner_tol: FISTA 提前停止容差
        polish_every: 每隔多少步 FISTA 尝试一次支撑集精修
        block_size: 并行时每块的列数
        n_jobs: joblib 线程数
    """
    coder: str = "bisection"
    feas_tol: float = 1e-3
    max_bisections: int = 60
    lambda_lo_ratio: float = 1e-10
    inner_max_iter: int = 2000
    inner_tol: float = 1e-9
    polish_every: int = 50
    block_size: int = 256
    n_jobs: int = 1

    def __post_init__(self):
        if self.feas_tol <= 0:
            raise ParameterError(f"feas_tol 必须为正，实际为 {self.feas_tol}")
        if not 0 < self.lambda_lo_ratio < 1:
            raise ParameterError(f"lambda_lo_ratio 必须位于 (0, 1)，实际为 {self.lambda_lo_ratio}")
        if min(self.max_bisections, self.inner_max_iter, self.polish_every, self.block_size) < 1:
            raise ParameterError("迭代上限、精修间隔和块大小必须为正")
        if self.n_jobs == 0:
            raise ParameterError("n_jobs 不能为 0")


@dataclass
class ConstrainedReport(SolverReport):
    """
    约束稀疏编码单列的报告；final_objective 为 ‖x‖₁

    Attributes:
        lam: 最终采用的 λ（iterations_used 计的是尝试过的 λ 个数）
        bisection_trace: 依次尝试的 (λ, 残差) 对
        polished: 最终解是否通过了支撑集 KKT 精修
    """
    lam: float = 0.0
    bisection_trace: List[Tuple[float, float]] = field(default_factory=list)
    polished: bool = False


def residual_slack(y_norms: np.ndarray) -> np.ndarray:
    """可行性判定里的绝对容差，吸收浮点误差"""
    return 1e-8 * np.maximum(y_norms, 1.0)


def residual_floor(A: Matrix, Y: np.ndarray) -> np.ndarray:
    """
    每列到 A 列空间的最小二乘距离 ‖(I − AA⁺)y‖，即 λ→0 时残差的下界
    """
    U, sv, _ = sp_linalg.svd(A, full_matrices=False, lapack_driver="gesdd")
    if sv.size == 0 or sv[0] == 0.0:
        return np.linalg.norm(Y, axis=0)
    rank = int(np.count_nonzero(sv > max(A.shape) * np.finfo(float).eps * sv[0]))
    if rank == A.shape[0]:
        return np.zeros(Y.shape[1])
    Ur = U[:, :rank]
    return np.linalg.norm(Y - Ur @ (Ur.T @ Y), axis=0)


def zero_report(y_norm: float) -> ConstrainedReport:
    """ε ≥ ‖y‖ 时零解即最优"""
    return ConstrainedReport(0, 0.0, float(y_norm), True, None, lam=float("inf"),
                             bisection_trace=[], polished=True)


class BaseSparseCoder(ABC):
    """约束稀疏编码器的抽象基类"""

    name = "base"

    def __init__(self, config: Optional[SparseCoderConfig] = None):
        self.config = config or SparseCoderConfig()

    def encode(self, A: Matrix, Y, eps: float,
               n_jobs: Optional[int] = None) -> Tuple[np.ndarray, List[ConstrainedReport]]:
        """
        对 Y 的每一列做约束稀疏编码

        Args:
            A: d×r 字典
            Y: d×n 观测（或长度 d 的向量）
            eps: 残差上界 ε ≥ 0
            n_jobs: 覆盖配置中的线程数

        Returns:
            (r×n 编码矩阵, 每列一个 ConstrainedReport)，顺序与列序一致

        Raises:
            InfeasibleCodeError: 某列的残差下界超过 ε，异常携带列号和下界
        """
        A = as_matrix(A, "A")
        Y = as_matrix(Y, "Y")
        if Y.shape[0] != A.shape[0]:
            raise DimensionError(f"Y 的行数 {Y.shape[0]} 与 A 的行数 {A.shape[0]} 不一致")
        if eps < 0:
            raise ParameterError(f"eps 必须非负，实际为 {eps}")

        y_norms = np.linalg.norm(Y, axis=0)
        floors = residual_floor(A, Y)
        limit = eps * (1 + self.config.feas_tol) + residual_slack(y_norms)
        bad = np.flatnonzero((floors > limit) & (y_norms > eps))
        if bad.size:
            j = int(bad[0])
            raise InfeasibleCodeError(
                f"第 {j} 列不可行：残差下界 {floors[j]:.6e} 超过 eps={eps:.6e}", float(floors[j]), j)

        # A = 0 时各列只能取零解
        M = spectral_norm(A) ** 2 if np.any(A) else 0.0
        n = Y.shape[1]
        size = self.config.block_size
        blocks = [slice(start, min(start + size, n)) for start in range(0, n, size)]
        jobs = self.config.n_jobs if n_jobs is None else n_jobs
        results = Parallel(n_jobs=jobs, prefer="threads")(
            delayed(self.encode_block)(A, Y[:, sl], eps, M) for sl in blocks)

        X = np.zeros((A.shape[1], n))
        reports: List[ConstrainedReport] = []
        for sl, (X_block, block_reports) in zip(blocks, results):
            X[:, sl] = X_block
            reports.extend(block_reports)
        unconverged = sum(1 for rep in reports if not rep.converged)
        if unconverged:
            logger.debug(f"{self.name}: {unconverged}/{n} 列未达到残差目标")
        return X, reports

    @abstractmethod
    def encode_block(self, A: Matrix, Y: np.ndarray, eps: float,
                     M: float) -> Tuple[np.ndarray, List[ConstrainedReport]]:
        """
        编码一个列块，可行性已由 encode 检查

        Args:
            A: d×r 字典
            Y: d×m 列块
            eps: 残差上界
            M: ‖A‖₂²，同一字典只计算一次

        Returns:
            (r×m 编码, m 个报告)
        """
        pass
