"""
软阈值与非负软阈值算子（ℓ₁ 范数的近端算子）
标量和数组输入均可，数组按元素计算
"""
import numpy as np

from core.errors import ParameterError


def _check_lambda(lam) -> None:
    if np.any(np.asarray(lam) < 0):
        raise ParameterError(f"阈值 lambda 必须非负，实际为 {lam}")


def relu(y):
    return np.maximum(y, 0.0)


def soft_threshold(y, lam):
    """
    s_λ(y) = sgn(y)·max(|y| − λ, 0)

    Args:
        y: 标量或数组
        lam: 非负阈值，可与 y 广播

    Returns:
        与 y 同形的结果；标量输入返回 float
    """
    _check_lambda(lam)
    out = np.sign(y) * np.maximum(np.abs(y) - lam, 0.0)
    return float(out) if np.ndim(out) == 0 else out


def soft_threshold_relu(y, lam):
    """双侧 ReLU 形式 ReLU(y − λ) − ReLU(−y − λ)，与 soft_threshold 数值相同"""
    _check_lambda(lam)
    out = relu(np.subtract(y, lam)) - relu(np.subtract(np.negative(y), lam))
    return float(out) if np.ndim(out) == 0 else out


def nonneg_soft_threshold(y, lam):
    """非负约束下的近端算子 max(y − λ, 0)"""
    _check_lambda(lam)
    out = relu(np.subtract(y, lam))
    return float(out) if np.ndim(out) == 0 else out
