"""
AltMinDict 的参数
"""
from dataclasses import dataclass, field, replace
from typing import Optional

from core.errors import ParameterError
from solvers.sparse_coder import SparseCoderConfig


@dataclass(frozen=True)
class AltMinConfig:
    """
    交替最小化参数

    Attributes:
        eps0: 初始精度 ε₀；None 时取 first_threshold/(threshold_const·s)，
            使第一次硬阈值恰为 first_threshold
        rho: 精度衰减率，ε_t = ε₀·ρᵗ
        T: 迭代上限
        threshold_const: 硬阈值常数 c，阈值为 c·s·ε_t
        stop_err: 相邻两次字典的 dict_error 低于该值时停止
        first_threshold: eps0 缺省时第一次硬阈值的取值
        debias: 硬阈值后是否在检测到的支撑集上做最小二乘去偏；缺省关闭，
            此时每次迭代只有编码、硬阈值、伪逆更新和列归一化四步
        coder: 约束稀疏编码参数（编码器种类、线程数等）
    """
    eps0: Optional[float] = None
    rho: float = 0.5
    T: int = 30
    threshold_const: float = 9.0
    stop_err: float = 1e-5
    first_threshold: float = 0.1
    debias: bool = False
    coder: SparseCoderConfig = field(default_factory=SparseCoderConfig)

    def __post_init__(self):
        if self.eps0 is not None and self.eps0 <= 0:
            raise ParameterError(f"eps0 必须为正，实际为 {self.eps0}")
        if not 0 < self.rho < 1:
            raise ParameterError(f"rho 必须位于 (0, 1)，实际为 {self.rho}")
        if self.T < 1:
            raise ParameterError(f"T 必须至少为 1，实际为 {self.T}")
        if self.threshold_const <= 0 or self.first_threshold <= 0:
            raise ParameterError("threshold_const 与 first_threshold 必须为正")
        if self.stop_err < 0:
            raise ParameterError(f"stop_err 必须非负，实际为 {self.stop_err}")

    def resolve_eps0(self, s: int) -> float:
        """给定编码稀疏度 s 下实际使用的 ε₀"""
        if self.eps0 is not None:
            return self.eps0
        return self.first_threshold / (self.threshold_const * s)

    def with_threads(self, n_jobs: int) -> "AltMinConfig":
        return replace(self, coder=replace(self.coder, n_jobs=n_jobs))
