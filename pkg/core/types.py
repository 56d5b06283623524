"""
共享类型：稠密矩阵约定与支撑集
"""
from dataclasses import dataclass
from typing import Iterable, Tuple

import numpy as np

from core.errors import DimensionError, ParameterError

# 稠密实矩阵统一用二维 float64 的 numpy 数组承载
Matrix = np.ndarray

# 稀疏计数时判定“非零”的阈值
NONZERO_TOL = 1e-12


def as_matrix(value, name: str = "matrix") -> Matrix:
    """
    把输入转换为二维 float64 矩阵并校验有限性

    Args:
        value: 任意可转换为数组的对象
        name: 出错时用于提示的名称

    Returns:
        二维 float64 数组
    """
    arr = np.asarray(value, dtype=np.float64)
    if arr.ndim == 1:
        arr = arr.reshape(-1, 1)
    if arr.ndim != 2:
        raise DimensionError(f"{name} 必须是二维矩阵，实际维数为 {arr.ndim}")
    if arr.shape[0] < 1 or arr.shape[1] < 1:
        raise DimensionError(f"{name} 的行数和列数必须为正，实际为 {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ParameterError(f"{name} 含有 NaN 或 Inf")
    return arr


def as_vector(value, name: str = "vector") -> np.ndarray:
    """把输入转换为一维 float64 向量"""
    arr = np.asarray(value, dtype=np.float64).reshape(-1)
    if not np.all(np.isfinite(arr)):
        raise ParameterError(f"{name} 含有 NaN 或 Inf")
    return arr


def column_nonzero_counts(M: Matrix, tol: float = NONZERO_TOL) -> np.ndarray:
    """统计每一列中 |entry| >= tol 的元素个数"""
    return np.count_nonzero(np.abs(M) >= tol, axis=0)


@dataclass(frozen=True)
class SupportSet:
    """
    稀疏向量的支撑集 Supp(x)，索引严格递增且位于 [0, r)
    """
    indices: Tuple[int, ...]
    size: int

    def __post_init__(self):
        idx = self.indices
        if any(b <= a for a, b in zip(idx, idx[1:])):
            raise ParameterError(f"支撑集索引必须严格递增: {idx}")
        if idx and (idx[0] < 0 or idx[-1] >= self.size):
            raise ParameterError(f"支撑集索引越界 [0, {self.size}): {idx}")

    @classmethod
    def from_indices(cls, indices: Iterable[int], size: int) -> "SupportSet":
        """从任意顺序的索引构造，重复索引视为错误"""
        raw = [int(i) for i in indices]
        if len(set(raw)) != len(raw):
            raise ParameterError(f"支撑集含有重复索引: {raw}")
        return cls(tuple(sorted(raw)), int(size))

    @property
    def sparsity(self) -> int:
        return len(self.indices)

    def as_array(self) -> np.ndarray:
        return np.asarray(self.indices, dtype=np.intp)

    def __len__(self) -> int:
        return len(self.indices)
