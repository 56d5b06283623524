"""
约束稀疏编码器工厂，以及逐列编码的便捷入口
"""
from typing import List, Optional, Tuple

import numpy as np

from core.types import Matrix
from solvers.bisection_coder import BisectionSparseCoder
from solvers.lars_coder import LarsSparseCoder
from solvers.sparse_coder import (BaseSparseCoder, ConstrainedReport,
                                  SparseCoderConfig)


class SparseCoderFactory:
    """约束稀疏编码器工厂类"""

    @staticmethod
    def get_coder(coder_type: str, config: Optional[SparseCoderConfig] = None) -> BaseSparseCoder:
        """
        根据类型获取编码器实例

        Args:
            coder_type: 'bisection' 或 'lars'
            config: 编码参数

        Returns:
            编码器实例

        Raises:
            ValueError: 不支持的编码器类型
        """
        kind = coder_type.lower()
        if kind == 'bisection':
            return BisectionSparseCoder(config)
        if kind == 'lars':
            return LarsSparseCoder(config)
        raise ValueError(f"不支持的稀疏编码器类型: {coder_type}，目前仅支持'bisection'和'lars'")


def sparse_code_constrained(A: Matrix, y, eps: float,
                            cfg: Optional[SparseCoderConfig] = None) -> Tuple[np.ndarray, ConstrainedReport]:
    """
    单列约束稀疏编码 min ‖x‖₁ s.t. ‖y − Ax‖₂ ≤ ε

    Raises:
        InfeasibleCodeError: ‖(I − AA⁺)y‖ > ε
    """
    cfg = cfg or SparseCoderConfig()
    X, reports = SparseCoderFactory.get_coder(cfg.coder, cfg).encode(A, y, eps, n_jobs=1)
    return X[:, 0], reports[0]


def sparse_code_columns(A: Matrix, Y, eps: float, cfg: Optional[SparseCoderConfig] = None,
                        n_jobs: Optional[int] = None) -> Tuple[np.ndarray, List[ConstrainedReport]]:
    """对 Y 的所有列并行做约束稀疏编码，结果按列序组装"""
    cfg = cfg or SparseCoderConfig()
    return SparseCoderFactory.get_coder(cfg.coder, cfg).encode(A, Y, eps, n_jobs=n_jobs)
