"""
交替最小化字典学习 AltMinDict

每次迭代依次执行：
1. 以精度 ε_t 对每列做约束稀疏编码
2. 以 c·s·ε_t 做硬阈值（按绝对值）；仅当 debias 打开时再在支撑集上做最小二乘去偏
3. 最小范数最小二乘更新字典
4. 列归一化
直到 T 次迭代或相邻字典的变化量低于 stop_err。
"""
import logging
import time
from typing import NamedTuple, Optional

import numpy as np
from scipy import linalg as sp_linalg

from altmin.config import AltMinConfig
from altmin.metrics import dict_error, hard_threshold
from altmin.trace import AltMinTrace
from core.errors import (AltMinAbort, DegenerateCodeError, DimensionError,
                         InfeasibleCodeError, ParameterError)
from core.linalg import ATOM_NORM_FLOOR, column_normalize, least_squares_min_norm
from core.types import Matrix, as_matrix
from solvers.coder_factory import sparse_code_columns

logger = logging.getLogger(__name__)


class AltMinResult(NamedTuple):
    dictionary: Matrix
    codes: Matrix
    trace: AltMinTrace


def debias_codes(A: Matrix, Y: Matrix, X: Matrix) -> Matrix:
    """在每列的非零支撑上用最小二乘重新拟合系数，支撑不变"""
    out = np.zeros_like(X)
    for j in range(X.shape[1]):
        S = np.flatnonzero(X[:, j])
        if S.size == 0:
            continue
        coef, _, _, _ = sp_linalg.lstsq(A[:, S], Y[:, j], lapack_driver="gelsd")
        out[S, j] = coef
    return out


def _reinit_collapsed(A_new: Matrix, A_old: Matrix) -> list:
    """把范数塌缩的列回退为上一轮的对应列，返回回退的列号"""
    norms = np.linalg.norm(A_new, axis=0)
    bad = [int(j) for j in np.flatnonzero(norms < ATOM_NORM_FLOOR)]
    for j in bad:
        A_new[:, j] = A_old[:, j]
    return bad


def altmin_dict(Y: Matrix, A0: Matrix, cfg: AltMinConfig, s: int,
                truth: Optional[Matrix] = None) -> AltMinResult:
    """
    交替最小化恢复 Y ≈ AX 中的字典与稀疏编码

    Args:
        Y: d×n 观测
        A0: d×r 初始字典（不要求归一化）
        cfg: 迭代参数
        s: 编码稀疏度，用于阈值 c·s·ε_t
        truth: 可选的真实字典，提供时逐次记录 err

    Returns:
        AltMinResult(字典, 编码, 迭代轨迹)

    Raises:
        AltMinAbort: 某列稀疏编码不可行或编码矩阵全零，异常携带迭代号、列号和已有轨迹
    """
    Y = as_matrix(Y, "Y")
    A = as_matrix(A0, "A0").copy()
    if Y.shape[0] != A.shape[0]:
        raise DimensionError(f"Y 的行数 {Y.shape[0]} 与 A0 的行数 {A.shape[0]} 不一致")
    if s < 1:
        raise ParameterError(f"编码稀疏度 s 必须为正，实际为 {s}")
    if truth is not None and np.shape(truth) != A.shape:
        raise DimensionError(f"真实字典形状 {np.shape(truth)} 与 A0 形状 {A.shape} 不一致")

    eps0 = cfg.resolve_eps0(s)
    trace = AltMinTrace()
    X = np.zeros((A.shape[1], Y.shape[1]))
    for t in range(cfg.T):
        started = time.perf_counter()
        eps_t = eps0 * cfg.rho ** t
        try:
            X, reports = sparse_code_columns(A, Y, eps_t, cfg.coder)
        except InfeasibleCodeError as e:
            raise AltMinAbort(f"第 {t} 次迭代第 {e.column} 列稀疏编码不可行 (下界 {e.floor:.3e})",
                              t, trace, column=e.column, cause=e) from e
        unconverged = sum(1 for rep in reports if not rep.converged)

        X = hard_threshold(X, cfg.threshold_const * s * eps_t)
        if cfg.debias:
            X = debias_codes(A, Y, X)

        try:
            A_new = least_squares_min_norm(Y, X)
        except DegenerateCodeError as e:
            raise AltMinAbort(f"第 {t} 次迭代编码矩阵全零", t, trace, cause=e) from e
        collapsed = _reinit_collapsed(A_new, A)
        if collapsed:
            logger.warning(f"第 {t} 次迭代有 {len(collapsed)} 列范数塌缩，已回退为上一轮的列: {collapsed[:10]}")
        A_new = column_normalize(A_new)

        change = dict_error(A_new, column_normalize(A))
        err = dict_error(A_new, truth) if truth is not None else None
        elapsed = time.perf_counter() - started
        trace.record(eps_t, change, err, elapsed, collapsed)
        logger.info(
            f"AltMin 迭代 {t}: eps={eps_t:.3e}, 变化量={change:.3e}"
            + (f", err={err:.3e}" if err is not None else "")
            + (f", 未达残差目标的列={unconverged}" if unconverged else "")
            + f", 耗时 {elapsed:.2f}s")
        A = A_new
        if change < cfg.stop_err:
            break
    return AltMinResult(A, X, trace)
