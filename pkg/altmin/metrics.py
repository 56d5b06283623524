"""
字典误差度量、硬阈值和初始化距离
"""
import numpy as np

from core.errors import DegenerateAtomError, DimensionError, ParameterError
from core.linalg import ATOM_NORM_FLOOR
from core.types import Matrix, as_matrix


def _check_columns(A: Matrix, name: str) -> np.ndarray:
    norms = np.linalg.norm(A, axis=0)
    bad = np.flatnonzero(norms < ATOM_NORM_FLOOR)
    if bad.size:
        raise DegenerateAtomError(f"{name} 的第 {int(bad[0])} 列为零列", int(bad[0]))
    return norms


def dict_error(A_hat: Matrix, A: Matrix) -> float:
    """
    err = max_i √(1 − ⟨a_i, â_i⟩²/(‖a_i‖²‖â_i‖²))

    对列的符号翻转不变，取值 [0, 1]。

    Raises:
        DimensionError: 形状不同
        DegenerateAtomError: 任一矩阵含零列，异常携带列号
    """
    A_hat = as_matrix(A_hat, "A_hat")
    A = as_matrix(A, "A")
    if A_hat.shape != A.shape:
        raise DimensionError(f"A_hat 形状 {A_hat.shape} 与 A 形状 {A.shape} 不一致")
    n_hat = _check_columns(A_hat, "A_hat")
    n_true = _check_columns(A, "A")
    U = A_hat / n_hat
    V = A / n_true
    cos = np.sum(U * V, axis=0)
    # 用正交分量的范数求 sin，列几乎共线时比 √(1 − cos²) 精确
    sin = np.linalg.norm(U - cos * V, axis=0)
    return float(np.clip(sin, 0.0, 1.0).max())


def hard_threshold(X: Matrix, tau: float) -> Matrix:
    """把 |X_ij| ≤ tau 的元素置零，其余不变"""
    if tau < 0:
        raise ParameterError(f"阈值 tau 必须非负，实际为 {tau}")
    X = np.asarray(X, dtype=np.float64)
    return np.where(np.abs(X) > tau, X, 0.0)


def init_distance(A0: Matrix, A: Matrix) -> float:
    """初始化半径 max_i min_{z∈{±1}} ‖z·a0_i − a_i‖₂"""
    A0 = as_matrix(A0, "A0")
    A = as_matrix(A, "A")
    if A0.shape != A.shape:
        raise DimensionError(f"A0 形状 {A0.shape} 与 A 形状 {A.shape} 不一致")
    plus = np.linalg.norm(A0 - A, axis=0)
    minus = np.linalg.norm(A0 + A, axis=0)
    return float(np.minimum(plus, minus).max())


def code_error(X_hat: Matrix, X: Matrix) -> float:
    """相对编码误差 ‖X̂ − X‖_F/‖X‖_F"""
    X_hat = np.asarray(X_hat, dtype=np.float64)
    X = np.asarray(X, dtype=np.float64)
    if X_hat.shape != X.shape:
        raise DimensionError(f"X_hat 形状 {X_hat.shape} 与 X 形状 {X.shape} 不一致")
    norm = float(np.linalg.norm(X))
    if norm == 0.0:
        raise ParameterError("真实编码全为零，相对误差无定义")
    return float(np.linalg.norm(X_hat - X)) / norm
