"""
精度序列 ε_t 以及理论参数选择下的 ε₀ 与递推比
"""
import math
from typing import List, NamedTuple

from core.errors import ParameterError


class PaperAccuracy(NamedTuple):
    """理论上的 ε₀ = 1/(2592 s²) 与递推比 25050·μ·s³/√d"""
    eps0: float
    ratio: float
    decreasing: bool


def accuracy_schedule(eps0: float, rho: float, T: int) -> List[float]:
    """
    几何精度序列 ε_t = eps0·ρᵗ，t = 0..T−1

    Raises:
        ParameterError: eps0 ≤ 0、rho ∉ (0, 1) 或 T < 1
    """
    if eps0 <= 0:
        raise ParameterError(f"eps0 必须为正，实际为 {eps0}")
    if not 0 < rho < 1:
        raise ParameterError(f"rho 必须位于 (0, 1)，实际为 {rho}")
    if T < 1:
        raise ParameterError(f"T 必须至少为 1，实际为 {T}")
    return [eps0 * rho ** t for t in range(T)]


def paper_accuracy_parameters(s: int, mu: float, d: int) -> PaperAccuracy:
    """
    理论参数选择给出的 ε₀ 与 ε_{t+1}/ε_t

    递推比不小于 1 时序列不递减，decreasing 为 False，表示该规模下假设不成立。
    """
    if s < 1 or d < 1 or mu <= 0:
        raise ParameterError(f"需要 s ≥ 1、d ≥ 1、mu > 0，实际为 s={s}, d={d}, mu={mu}")
    eps0 = 1.0 / (2592.0 * s * s)
    ratio = 25050.0 * mu * s ** 3 / math.sqrt(d)
    return PaperAccuracy(eps0, ratio, ratio < 1.0)
