"""
异常体系，所有库代码抛出的错误都继承自 DeepDictError
命令行层负责把异常映射为退出码
"""
from typing import Any, Optional

import numpy as np


class DeepDictError(Exception):
    """工具包所有异常的基类"""


class ParameterError(DeepDictError, ValueError):
    """参数不满足前置条件"""


class DimensionError(ParameterError):
    """矩阵维度不一致"""


class ConfigError(DeepDictError):
    """实验配置无效（未知键、无法解析的值等）"""


class MatrixFormatError(DeepDictError):
    """DS2PMAT1 矩阵文件格式错误"""


class ConvergenceError(DeepDictError):
    """迭代算法在最大迭代次数内未收敛"""

    def __init__(self, message: str, last_iterate: Optional[np.ndarray] = None):
        super().__init__(message)
        self.last_iterate = last_iterate


class DegenerateCodeError(DeepDictError):
    """稀疏编码矩阵全为零，说明稀疏编码阶段失败"""


class DegenerateAtomError(DeepDictError):
    """字典某一列范数过小，无法归一化"""

    def __init__(self, message: str, column: int):
        super().__init__(message)
        self.column = column


class InfeasibleCodeError(DeepDictError):
    """约束稀疏编码不可行：残差下界超过给定精度"""

    def __init__(self, message: str, floor: float, column: Optional[int] = None):
        super().__init__(message)
        self.floor = floor
        self.column = column


class AltMinAbort(DeepDictError):
    """交替最小化中途终止，附带已记录的迭代轨迹"""

    def __init__(self, message: str, iteration: int, trace: Any,
                 column: Optional[int] = None, cause: Optional[Exception] = None):
        super().__init__(message)
        self.iteration = iteration
        self.trace = trace
        self.column = column
        self.cause = cause


class FactorizationAbort(DeepDictError):
    """深度分解某一阶段失败，附带部分报告"""

    def __init__(self, message: str, partial_report: Any):
        super().__init__(message)
        self.partial_report = partial_report
