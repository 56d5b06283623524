"""
稀疏度记账与缩放序列
"""
import math
from dataclasses import dataclass
from typing import Any, Dict, List, Tuple

from core.errors import ParameterError
from genmodel.spec import DeepModelSpec

# σ 的两种约定：
# unit: σ_(0→0) = 1，σ_(0→ℓ) = ∏_{ℓ'=1..ℓ} √s_(ℓ')
# with_code: ℓ ≥ 1 时再乘 √s，对应把 s_(0) = s 也计入乘积
SIGMA_UNIT = "unit"
SIGMA_WITH_CODE = "with_code"


@dataclass(frozen=True)
class SparsityLedger:
    """
    Attributes:
        code_sparsity: s
        column_sparsities: s_(1..L−1)
        s_Y: s_{Y⁽ℓ⁾}，ℓ = 0..L−1
        sigma: σ_(0→ℓ)，ℓ = 0..L−1
        convention: σ 的约定
    """
    code_sparsity: int
    column_sparsities: Tuple[int, ...]
    s_Y: Tuple[int, ...]
    sigma: Tuple[float, ...]
    convention: str = SIGMA_UNIT

    @property
    def L(self) -> int:
        return len(self.s_Y)

    def s_col(self, ell: int) -> int:
        """s_(ℓ)，s_(0) = s"""
        return self.code_sparsity if ell == 0 else self.column_sparsities[ell - 1]

    def to_dict(self) -> Dict[str, Any]:
        return {
            "s_Y": list(self.s_Y),
            "sigma": list(self.sigma),
            "column_sparsities": list(self.column_sparsities),
            "sigma_convention": self.convention,
        }


def sigma_sequence(s: int, column_sparsities: Tuple[int, ...],
                   convention: str = SIGMA_UNIT) -> List[float]:
    if convention not in (SIGMA_UNIT, SIGMA_WITH_CODE):
        raise ParameterError(f"不支持的 sigma 约定: {convention}")
    sigma = [1.0]
    for ell in range(1, len(column_sparsities) + 1):
        value = math.prod(math.sqrt(c) for c in column_sparsities[:ell])
        if convention == SIGMA_WITH_CODE:
            value *= math.sqrt(s)
        sigma.append(value)
    return sigma


def sparsity_levels(spec: DeepModelSpec, convention: str = SIGMA_UNIT) -> SparsityLedger:
    """
    s_{Y⁽⁰⁾} = s，s_{Y⁽ℓ⁾} = s·∏_{ℓ'=1..ℓ} s_(ℓ')，以及缩放序列 σ

    Args:
        spec: 模型结构
        convention: σ 的约定，'unit'（默认）或 'with_code'

    Returns:
        SparsityLedger
    """
    spec.validate()
    s = spec.code_sparsity
    cols = tuple(spec.column_sparsities)
    s_Y = [s]
    for c in cols:
        s_Y.append(s_Y[-1] * c)
    return SparsityLedger(s, cols, tuple(s_Y), tuple(sigma_sequence(s, cols, convention)), convention)
