"""
λ 二分约束稀疏编码器

残差 ‖y − Ax_λ‖ 随 λ 单调不减：λ ≥ ‖Aᵀy‖_∞ 时解为零，λ→0 时残差趋于下界。
在对数尺度上二分 λ，使残差落到 [ε(1−feas_tol), ε(1+feas_tol)]。
每个 λ 上的 LASSO 用热启动的 FISTA 求解，并周期性地在检测到的支撑集上
解 KKT 方程把近似解精修为精确解。
"""
import logging
from typing import List, Optional, Tuple

import numpy as np
from scipy import linalg as sp_linalg

from core.types import Matrix
from solvers.fista_solver import FistaSolver
from solvers.sparse_coder import (BaseSparseCoder, ConstrainedReport,
                                  residual_slack, zero_report)

logger = logging.getLogger(__name__)

# 二分区间的相对宽度低于该值时停止
_BRACKET_TOL = 1e-9


def polish_lasso(A: Matrix, y: np.ndarray, lam: float,
                 x: np.ndarray) -> Tuple[np.ndarray, bool]:
    """
    在 x 的支撑集 S 和符号 σ 上求 LASSO 的精确解

    x_S = (A_SᵀA_S)⁻¹(A_Sᵀy − λσ)，当符号保持且 ‖A_{Sᶜ}ᵀ(y − A_S x_S)‖_∞ ≤ λ 时
    满足最优性条件。

    Args:
        A: d×r 字典
        y: 观测列
        lam: 正则系数
        x: 近似解

    Returns:
        (解, 是否通过 KKT 检查)；未通过时原样返回 x
    """
    S = np.flatnonzero(x)
    kkt_tol = lam * 1e-9 + 1e-12
    if S.size == 0:
        ok = float(np.max(np.abs(A.T @ y))) <= lam + kkt_tol
        return (np.zeros_like(x), True) if ok else (x, False)
    if S.size > A.shape[0]:
        return x, False
    As = A[:, S]
    sigma = np.sign(x[S])
    try:
        xs = sp_linalg.solve(As.T @ As, As.T @ y - lam * sigma, assume_a="pos")
    except np.linalg.LinAlgError:
        return x, False
    if np.any(np.sign(xs) != sigma):
        return x, False
    corr = A.T @ (y - As @ xs)
    corr[S] = 0.0
    if float(np.max(np.abs(corr))) > lam + kkt_tol:
        return x, False
    out = np.zeros_like(x)
    out[S] = xs
    return out, True


class BisectionSparseCoder(BaseSparseCoder):
    """对 λ 做对数二分、内层 FISTA 的约束稀疏编码器"""

    name = "bisection"

    def __init__(self, config=None):
        super().__init__(config)
        self._fista = FistaSolver()

    def _lasso(self, A: Matrix, Y: np.ndarray, lams: np.ndarray, X0: np.ndarray,
               M: float) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
        """
        按列求解带各自 λ 的 LASSO

        Returns:
            (X, 每列残差, 每列是否精修成功)
        """
        cfg = self.config
        X = X0.copy()
        m = Y.shape[1]
        polished = np.zeros(m, dtype=bool)
        finished = np.zeros(m, dtype=bool)
        used = 0
        while used < cfg.inner_max_iter and not finished.all():
            idx = np.flatnonzero(~finished)
            steps = min(cfg.polish_every, cfg.inner_max_iter - used)
            X_idx, report = self._fista.solve(A, Y[:, idx], lams[idx], steps, x0=X[:, idx],
                                              lipschitz=M, tol=cfg.inner_tol)
            X[:, idx] = X_idx
            used += report.iterations_used
            for pos, j in enumerate(idx):
                x_j, ok = polish_lasso(A, Y[:, j], float(lams[j]), X_idx[:, pos])
                if ok:
                    X[:, j] = x_j
                    polished[j] = finished[j] = True
            if report.converged:
                finished[idx] = True
        residuals = np.linalg.norm(Y - A @ X, axis=0)
        return X, residuals, polished

    def encode_block(self, A: Matrix, Y: np.ndarray, eps: float,
                     M: float) -> Tuple[np.ndarray, List[ConstrainedReport]]:
        cfg = self.config
        r = A.shape[1]
        m = Y.shape[1]
        X = np.zeros((r, m))
        reports: List[Optional[ConstrainedReport]] = [None] * m

        y_norms = np.linalg.norm(Y, axis=0)
        for j in np.flatnonzero(y_norms <= eps):
            reports[j] = zero_report(y_norms[j])
        act = np.flatnonzero(y_norms > eps)
        if act.size == 0:
            return X, reports

        Ya = Y[:, act]
        k_all = act.size
        upper = eps * (1 + cfg.feas_tol) + residual_slack(y_norms[act])
        lower = eps * (1 - cfg.feas_tol)

        lam_hi = np.max(np.abs(A.T @ Ya), axis=0)
        lam_lo = cfg.lambda_lo_ratio * lam_hi
        traces = [[(float(lam_hi[k]), float(y_norms[act[k]]))] for k in range(k_all)]

        # 区间 (lam_feas, lam_infeas]：lam_infeas 处已知不可行，lam_feas 处假定可行
        lam_feas = lam_lo.copy()
        lam_infeas = lam_hi.copy()
        X_feas = np.zeros((r, k_all))
        res_feas = y_norms[act].copy()
        pol_feas = np.zeros(k_all, dtype=bool)
        found = np.zeros(k_all, dtype=bool)
        X_warm = np.zeros((r, k_all))
        steps = np.zeros(k_all, dtype=int)

        def evaluate(idx: np.ndarray, lams: np.ndarray) -> np.ndarray:
            X_new, res, pol = self._lasso(A, Ya[:, idx], lams, X_warm[:, idx], M)
            X_warm[:, idx] = X_new
            steps[idx] += 1
            ok = res <= upper[idx]
            for pos, k in enumerate(idx):
                traces[k].append((float(lams[pos]), float(res[pos])))
                if ok[pos]:
                    lam_feas[k] = lams[pos]
                    X_feas[:, k] = X_new[:, pos]
                    res_feas[k] = res[pos]
                    pol_feas[k] = pol[pos]
                    found[k] = True
                else:
                    lam_infeas[k] = lams[pos]
            return res

        # eps = 0 时目标就是残差下界，直接取 λ 下界
        done = np.full(k_all, eps == 0.0)
        for _ in range(cfg.max_bisections):
            idx = np.flatnonzero(~done)
            if idx.size == 0:
                break
            res = evaluate(idx, np.sqrt(lam_feas[idx] * lam_infeas[idx]))
            done[idx] |= found[idx] & (res >= lower) & (res <= upper[idx])
            done[idx] |= lam_infeas[idx] <= lam_feas[idx] * (1 + _BRACKET_TOL)

        # 从未遇到可行点的列回到 λ 下界求解
        rest = np.flatnonzero(~found)
        if rest.size:
            evaluate(rest, lam_lo[rest])

        for k, j in enumerate(act):
            if not found[k]:
                # λ 下界处仍不可行，返回该处的解
                X_feas[:, k] = X_warm[:, k]
                res_feas[k] = traces[k][-1][1]
                lam_feas[k] = lam_lo[k]
                logger.debug(f"列 {j}: λ 下界处残差 {res_feas[k]:.3e} 仍超过 eps={eps:.3e}")
            X[:, j] = X_feas[:, k]
            reports[j] = ConstrainedReport(
                iterations_used=int(steps[k]),
                final_objective=float(np.abs(X_feas[:, k]).sum()),
                final_residual_norm=float(res_feas[k]),
                converged=bool(found[k]),
                lam=float(lam_feas[k]),
                bisection_trace=traces[k],
                polished=bool(pol_feas[k]),
            )
        return X, reports
