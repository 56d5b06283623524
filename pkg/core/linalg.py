"""
稠密线性代数原语：谱范数、最小奇异值、最小范数最小二乘和列归一化
所有函数都是输入不可变的纯函数，可在多线程中并发调用
"""
import logging
from typing import NamedTuple

import numpy as np
from scipy import linalg as sp_linalg

from core.errors import (ConvergenceError, DegenerateAtomError,
                         DegenerateCodeError, DimensionError, ParameterError)
from core.types import Matrix, as_matrix

logger = logging.getLogger(__name__)

# 列范数低于该值视为退化原子
ATOM_NORM_FLOOR = 1e-12

# 小矩阵直接用完整 SVD 求最小奇异值
_FULL_SVD_LIMIT = 512


class MinSingularValue(NamedTuple):
    """最小奇异值及秩亏标志"""
    value: float
    rank_deficient: bool


def _power_iteration(gram: np.ndarray, start: np.ndarray, tol: float,
                     max_iter: int) -> float:
    """对对称半正定矩阵做幂迭代，返回最大特征值"""
    v = start / np.linalg.norm(start)
    eig = float(v @ gram @ v)
    for _ in range(max_iter):
        w = gram @ v
        nrm = np.linalg.norm(w)
        if nrm == 0.0:
            return 0.0
        v = w / nrm
        new_eig = float(v @ gram @ v)
        if abs(new_eig - eig) <= tol * max(abs(new_eig), 1e-300):
            return new_eig
        eig = new_eig
    raise ConvergenceError(f"幂迭代在 {max_iter} 步内未收敛", last_iterate=v)


def spectral_norm(A: Matrix, tol: float = 1e-10, max_iter: int = 10000) -> float:
    """
    用 AᵀA 上的幂迭代计算谱范数 σ_max(A)

    Args:
        A: 输入矩阵
        tol: 特征值的相对收敛容差
        max_iter: 最大迭代次数

    Returns:
        σ_max(A)

    Raises:
        ParameterError: A 为零矩阵或 tol 非正
        ConvergenceError: 迭代未收敛，异常中携带最后一次迭代向量
    """
    A = as_matrix(A, "A")
    if tol <= 0:
        raise ParameterError(f"tol 必须为正，实际为 {tol}")
    if not np.any(A):
        raise ParameterError(f"谱范数要求非零矩阵，实际为 {A.shape[0]}x{A.shape[1]} 零矩阵")
    # 在较小的一侧构造 Gram 矩阵，谱半径相同
    gram = A.T @ A if A.shape[1] <= A.shape[0] else A @ A.T
    k = gram.shape[0]
    # 固定的确定性起点：全 1 向量；再用一个交错斜坡起点防止起点恰好与主方向正交
    ones = np.ones(k)
    ramp = np.cos(np.arange(k) * 2.3999632297286535) + 0.5
    eig = max(_power_iteration(gram, ones, tol, max_iter),
              _power_iteration(gram, ramp, tol, max_iter))
    return float(np.sqrt(max(eig, 0.0)))


def min_singular_value(A: Matrix, tol: float = 1e-10,
                       max_iter: int = 10000) -> MinSingularValue:
    """
    计算 σ_min(A)，即 min(rows, cols) 个奇异值中的最小者

    小矩阵直接做完整 SVD；大矩阵在较小一侧的 Gram 矩阵上做逆幂迭代。
    Gram 矩阵奇异或接近奇异时返回 0 并置秩亏标志，而不是抛出异常。

    Args:
        A: 输入矩阵
        tol: 相对容差，同时作为秩亏判定阈值
        max_iter: 逆幂迭代的最大步数

    Returns:
        MinSingularValue(value, rank_deficient)
    """
    A = as_matrix(A, "A")
    if min(A.shape) <= _FULL_SVD_LIMIT:
        sv = sp_linalg.svdvals(A)
        smax, smin = float(sv[0]), float(sv[-1])
        if smax == 0.0 or smin <= tol * smax:
            return MinSingularValue(0.0, True)
        return MinSingularValue(smin, False)

    gram = A.T @ A if A.shape[1] <= A.shape[0] else A @ A.T
    try:
        factor = sp_linalg.cho_factor(gram, check_finite=False)
    except np.linalg.LinAlgError:
        return MinSingularValue(0.0, True)
    v = np.ones(gram.shape[0]) / np.sqrt(gram.shape[0])
    inv_eig = 0.0
    for _ in range(max_iter):
        w = sp_linalg.cho_solve(factor, v, check_finite=False)
        nrm = np.linalg.norm(w)
        v = w / nrm
        new_inv = float(v @ sp_linalg.cho_solve(factor, v, check_finite=False))
        if abs(new_inv - inv_eig) <= tol * abs(new_inv):
            inv_eig = new_inv
            break
        inv_eig = new_inv
    else:
        raise ConvergenceError(f"逆幂迭代在 {max_iter} 步内未收敛", last_iterate=v)
    smin = float(np.sqrt(1.0 / inv_eig))
    if smin <= tol * spectral_norm(A):
        return MinSingularValue(0.0, True)
    return MinSingularValue(smin, False)


def least_squares_min_norm(B: Matrix, X: Matrix, rcond: float = 1e-12) -> Matrix:
    """
    求 A = B X⁺：使 ‖B − AX‖_F 最小且自身 Frobenius 范数最小的解

    一般情况用列主元 QR 求解 Xᵀ Aᵀ = Bᵀ；X 行秩亏时退回 SVD 型最小范数最小二乘。

    Args:
        B: d×n 观测矩阵
        X: r×n 编码矩阵
        rcond: 判定 QR 对角元是否为零的相对阈值

    Returns:
        d×r 矩阵 A

    Raises:
        DegenerateCodeError: X 全为零
    """
    B = as_matrix(B, "B")
    X = as_matrix(X, "X")
    if B.shape[1] != X.shape[1]:
        raise DimensionError(f"B 的列数 {B.shape[1]} 与 X 的列数 {X.shape[1]} 不一致")
    if not np.any(X):
        raise DegenerateCodeError("编码矩阵全为零，稀疏编码阶段失败")

    r = X.shape[0]
    Xt, Bt = X.T, B.T
    if Xt.shape[0] >= r:
        Q, R, perm = sp_linalg.qr(Xt, mode="economic", pivoting=True)
        diag = np.abs(np.diag(R))
        rank = int(np.count_nonzero(diag > rcond * diag[0]))
        if rank == r:
            Z = np.empty((r, Bt.shape[1]))
            Z[perm] = sp_linalg.solve_triangular(R, Q.T @ Bt)
            return Z.T
        logger.debug(f"编码矩阵行秩亏 (rank={rank} < {r})，改用 SVD 最小范数解")
    Z, _, _, _ = sp_linalg.lstsq(Xt, Bt, cond=rcond, lapack_driver="gelsd")
    return Z.T


def column_normalize(A: Matrix) -> Matrix:
    """
    把每一列缩放到单位 ℓ₂ 范数，方向保持不变

    Raises:
        DegenerateAtomError: 某列范数小于 1e-12，异常中携带列号
    """
    A = as_matrix(A, "A")
    norms = np.linalg.norm(A, axis=0)
    bad = np.flatnonzero(norms < ATOM_NORM_FLOOR)
    if bad.size:
        raise DegenerateAtomError(f"第 {int(bad[0])} 列范数过小，无法归一化", int(bad[0]))
    return A / norms
