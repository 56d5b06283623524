"""
列对齐诊断：用匈牙利算法按 |cos| 匹配恢复字典与真值的列
"""
from typing import NamedTuple

import numpy as np
from scipy.optimize import linear_sum_assignment

from core.errors import DimensionError
from core.linalg import column_normalize
from core.types import Matrix, as_matrix


class ColumnAlignment(NamedTuple):
    """
    Attributes:
        permutation: permutation[i] 为与真值第 i 列匹配的恢复列号
        signs: 使匹配列内积为正的符号
        error: 对齐后的 dict_error
        identity: 最优匹配是否就是恒等排列
    """
    permutation: np.ndarray
    signs: np.ndarray
    error: float
    identity: bool


def align_columns(A_hat: Matrix, A: Matrix) -> ColumnAlignment:
    """
    在列的置换和符号下对齐 A_hat 与 A，仅用于探索性诊断；恢复误差本身按固定列号计算
    """
    A_hat = column_normalize(as_matrix(A_hat, "A_hat"))
    A = column_normalize(as_matrix(A, "A"))
    if A_hat.shape != A.shape:
        raise DimensionError(f"A_hat 形状 {A_hat.shape} 与 A 形状 {A.shape} 不一致")
    cos = A.T @ A_hat
    rows, cols = linear_sum_assignment(-np.abs(cos))
    perm = cols[np.argsort(rows)]
    matched = cos[np.arange(A.shape[1]), perm]
    signs = np.where(matched < 0, -1.0, 1.0)
    error = float(np.sqrt(np.clip(1.0 - matched * matched, 0.0, 1.0)).max())
    return ColumnAlignment(perm, signs, error, bool(np.array_equal(perm, np.arange(A.shape[1]))))
