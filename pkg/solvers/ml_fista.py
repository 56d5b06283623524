"""
多层 LASSO 的 ML-FISTA

min_x ½‖y − A_L···A_1 x‖² + Σ_ℓ λ_ℓ‖γ_{ℓ−1}‖₁，其中 γ_0 = x，γ_ℓ = A_ℓ γ_{ℓ−1}。
λ_ℓ 惩罚 A_ℓ 的输入。每次迭代先由外推点 Z 自下而上解码出各层 γ，
再从最靠近信号的一层开始逐层做近端梯度步，最后更新最深层编码 x。
"""
import logging
from typing import Optional, Sequence

import numpy as np

from core.errors import DimensionError, ParameterError
from core.linalg import spectral_norm
from core.types import Matrix, as_matrix
from solvers.fista_solver import momentum_step
from solvers.thresholding import soft_threshold

logger = logging.getLogger(__name__)


def ml_fista(dicts: Sequence[Matrix], y, lambdas: Sequence[float], K: int,
             lipschitz: Optional[Sequence[float]] = None, restart_every: int = 200,
             x0=None) -> np.ndarray:
    """
    用 ML-FISTA 求最深层编码

    Args:
        dicts: [A_1, ..., A_L]，A_ℓ 的列数等于 A_{ℓ−1} 的行数
        y: 观测向量（或按列批量的矩阵）
        lambdas: [λ_1, ..., λ_L]，λ_ℓ 作用于 A_ℓ 的输入
        K: 迭代次数
        lipschitz: 每层 M_ℓ 的覆盖值，缺省为 ‖A_ℓ‖₂²
        restart_every: 动量重启周期
        x0: 初始编码，缺省为零

    Returns:
        最深层编码 x̂
    """
    mats = [as_matrix(A, f"A{ell}") for ell, A in enumerate(dicts, start=1)]
    L = len(mats)
    if L == 0:
        raise ParameterError("至少需要一层字典")
    if len(lambdas) != L:
        raise ParameterError(f"需要 {L} 个 lambda，实际为 {len(lambdas)}")
    if any(lam < 0 for lam in lambdas):
        raise ParameterError(f"lambda 必须非负: {list(lambdas)}")
    if K < 1 or restart_every < 1:
        raise ParameterError(f"K 与 restart_every 必须为正，实际为 {K}, {restart_every}")
    for ell in range(1, L):
        if mats[ell].shape[1] != mats[ell - 1].shape[0]:
            raise DimensionError(
                f"A{ell + 1} 的列数 {mats[ell].shape[1]} 与 A{ell} 的行数 {mats[ell - 1].shape[0]} 不一致")
    y = np.asarray(y, dtype=np.float64)
    if y.shape[0] != mats[-1].shape[0]:
        raise DimensionError(f"y 的长度 {y.shape[0]} 与 A{L} 的行数 {mats[-1].shape[0]} 不一致")

    if lipschitz is None:
        M = [spectral_norm(A) ** 2 for A in mats]
    else:
        M = [float(m) for m in lipschitz]
        if len(M) != L or min(M) <= 0:
            raise ParameterError(f"需要 {L} 个正的 Lipschitz 常数，实际为 {list(lipschitz)}")
    # τ_ℓ = ∏_{k≥ℓ} 1/M_k：第 ℓ 层阈值的缩放
    tau = [float(np.prod([1.0 / m for m in M[ell:]])) for ell in range(L)]

    r1 = mats[0].shape[1]
    shape = (r1,) if y.ndim == 1 else (r1, y.shape[1])
    x = np.zeros(shape) if x0 is None else np.array(x0, dtype=np.float64).reshape(shape)
    x_prev = x
    Z = x
    t = 1.0
    for k in range(1, K + 1):
        # 解码：gammas[ℓ] = A_ℓ···A_1 Z，ℓ = 1..L−1
        gammas = [Z]
        for A in mats[:-1]:
            gammas.append(A @ gammas[-1])

        target = y
        for ell in range(L - 1, 0, -1):
            A = mats[ell]
            g = gammas[ell]
            gammas[ell] = soft_threshold(g - A.T @ (A @ g - target) / M[ell], lambdas[ell] * tau[ell])
            target = gammas[ell]
        A1 = mats[0]
        x = soft_threshold(Z - A1.T @ (A1 @ Z - target) / M[0], lambdas[0] * tau[0])

        if k % restart_every == 0:
            t = 1.0
        t, beta = momentum_step(t)
        Z = x + beta * (x - x_prev)
        x_prev = x
    logger.debug(f"ML-FISTA 完成 {K} 次迭代，L={L}")
    return x
