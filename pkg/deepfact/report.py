"""
分解结果报告
"""
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional

from altmin.trace import AltMinTrace
from core.types import Matrix

FORWARD = "forward"
BACKWARD = "backward"


@dataclass
class StageResult:
    """
    一个阶段的输出

    Attributes:
        index: 阶段对应的层号 ℓ
        name: 本阶段学到的字典名，如 'A(1->2)' 或 'A(2)'
        dictionary: 学到的字典（列归一化）
        codes: AltMinDict 返回的编码（未去缩放）
        trace: 迭代轨迹
        sparsity: 传给 AltMinDict 的稀疏度
        scale: 输入观测的缩放系数
        error: 相对真值的 dict_error
        derived_name: 由编码去缩放得到的字典名（前向分解 ℓ ≥ 2）
        derived: 去缩放并归一化后的字典
        derived_error: derived 相对真值的 dict_error
    """
    index: int
    name: str
    dictionary: Matrix
    codes: Matrix
    trace: AltMinTrace
    sparsity: int
    scale: float
    error: Optional[float] = None
    derived_name: Optional[str] = None
    derived: Optional[Matrix] = None
    derived_error: Optional[float] = None

    def to_dict(self) -> Dict[str, Any]:
        return {
            "index": self.index,
            "name": self.name,
            "shape": list(self.dictionary.shape),
            "sparsity": self.sparsity,
            "scale": self.scale,
            "error": self.error,
            "derived_name": self.derived_name,
            "derived_error": self.derived_error,
            "trace": self.trace.to_dict(),
        }


@dataclass
class FactorizationReport:
    """
    Attributes:
        mode: 'forward' 或 'backward'
        L: 层数
        stages: 按执行顺序排列的阶段结果
        codes: 最深层编码 X̂
        seed: 生成实例的种子
        config: 参数快照
    """
    mode: str
    L: int
    stages: List[StageResult] = field(default_factory=list)
    codes: Optional[Matrix] = None
    seed: Optional[int] = None
    config: Dict[str, Any] = field(default_factory=dict)

    def recovered(self) -> Dict[str, Matrix]:
        """所有恢复出的字典，按名称索引"""
        out: Dict[str, Matrix] = {}
        for stage in self.stages:
            out[stage.name] = stage.dictionary
            if stage.derived_name is not None:
                out[stage.derived_name] = stage.derived
        return out

    def errors(self) -> Dict[str, float]:
        """有真值时各字典的最终误差"""
        out: Dict[str, float] = {}
        for stage in self.stages:
            if stage.error is not None:
                out[stage.name] = stage.error
            if stage.derived_name is not None and stage.derived_error is not None:
                out[stage.derived_name] = stage.derived_error
        return out

    def to_dict(self) -> Dict[str, Any]:
        return {
            "mode": self.mode,
            "L": self.L,
            "seed": self.seed,
            "config": self.config,
            "errors": self.errors(),
            "stages": [stage.to_dict() for stage in self.stages],
        }
