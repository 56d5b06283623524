"""
基于 LARS-lasso 同伦路径的约束稀疏编码器

scikit-learn 的 lars_path 给出 LASSO 解关于 λ 的分段线性路径，残差沿路径单调下降。
找到残差穿过 ε 的那一段，在段内对 ‖y − Ax(θ)‖² = ε² 解二次方程得到精确解。
"""
import logging
import math
from typing import List, Tuple

import numpy as np
from sklearn.linear_model import lars_path

from core.types import Matrix
from solvers.sparse_coder import (BaseSparseCoder, ConstrainedReport,
                                  residual_slack, zero_report)

logger = logging.getLogger(__name__)


def _crossing(r0: np.ndarray, delta: np.ndarray, eps: float) -> float:
    """‖r0 − θΔ‖ = ε 在 [0, 1] 内的最小根"""
    a = float(delta @ delta)
    if a == 0.0:
        return 1.0
    b = float(r0 @ delta)
    c = float(r0 @ r0) - eps * eps
    disc = max(b * b - a * c, 0.0)
    return min(max((b - math.sqrt(disc)) / a, 0.0), 1.0)


class LarsSparseCoder(BaseSparseCoder):
    """沿 LASSO 同伦路径插值到残差目标"""

    name = "lars"

    def encode_column(self, A: Matrix, y: np.ndarray, eps: float) -> Tuple[np.ndarray, ConstrainedReport]:
        y_norm = float(np.linalg.norm(y))
        if y_norm <= eps:
            return np.zeros(A.shape[1]), zero_report(y_norm)

        # sklearn 的 alpha 是 λ 除以样本数（这里是 A 的行数）
        alphas, _, coefs = lars_path(A, y, method="lasso", alpha_min=0.0, return_path=True,
                                     max_iter=max(500, 4 * A.shape[1]))
        lams = alphas * A.shape[0]
        residuals = np.linalg.norm(y[:, None] - A @ coefs, axis=0)
        trace = [(float(lam), float(res)) for lam, res in zip(lams, residuals)]
        upper = eps * (1 + self.config.feas_tol) + float(residual_slack(np.array([y_norm]))[0])

        hits = np.flatnonzero(residuals <= eps)
        if hits.size == 0:
            k = coefs.shape[1] - 1
            x = coefs[:, k].copy()
            converged = bool(residuals[k] <= upper)
            if not converged:
                logger.debug(f"LARS 路径终点残差 {residuals[k]:.3e} 仍超过 eps={eps:.3e}")
            return x, ConstrainedReport(coefs.shape[1], float(np.abs(x).sum()), float(residuals[k]),
                                        converged, None, lam=float(lams[k]),
                                        bisection_trace=trace, polished=True)

        k = int(hits[0])
        if k == 0:
            x = coefs[:, 0].copy()
            lam = float(lams[0])
        else:
            r0 = y - A @ coefs[:, k - 1]
            delta = A @ (coefs[:, k] - coefs[:, k - 1])
            theta = _crossing(r0, delta, eps)
            x = (1 - theta) * coefs[:, k - 1] + theta * coefs[:, k]
            lam = float((1 - theta) * lams[k - 1] + theta * lams[k])
        residual = float(np.linalg.norm(y - A @ x))
        return x, ConstrainedReport(k + 1, float(np.abs(x).sum()), residual, residual <= upper,
                                    None, lam=lam, bisection_trace=trace, polished=True)

    def encode_block(self, A: Matrix, Y: np.ndarray, eps: float,
                     M: float) -> Tuple[np.ndarray, List[ConstrainedReport]]:
        X = np.zeros((A.shape[1], Y.shape[1]))
        reports = []
        for j in range(Y.shape[1]):
            X[:, j], rep = self.encode_column(A, Y[:, j], eps)
            reports.append(rep)
        return X, reports
