"""
深度稀疏生成模型的结构描述 DeepModelSpec
"""
import math
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Tuple

from core.errors import DimensionError, ParameterError
from genmodel.laws import DEFAULT_CODE_LAW, DEFAULT_DICT_LAW, NonzeroLaw


@dataclass(frozen=True)
class DeepModelSpec:
    """
    Y = A⁽ᴸ⁾···A⁽¹⁾X 的结构参数

    Attributes:
        dims: 第 ℓ 层字典 A⁽ℓ⁾ 的形状 (d_ℓ, r_ℓ)，ℓ = 1..L
        code_sparsity: X 每列的非零个数 s
        column_sparsities: A⁽ℓ⁾ (ℓ < L) 每列的非零个数 s_(ℓ)
        amplitude_bounds: M_(ℓ)，ℓ = 0..L-1；缺省时由分布律推出
        dict_law: 稀疏字典非零元的分布律
        code_law: X 非零元的分布律
    """
    dims: Tuple[Tuple[int, int], ...]
    code_sparsity: int
    column_sparsities: Tuple[int, ...] = ()
    amplitude_bounds: Optional[Tuple[float, ...]] = None
    dict_law: NonzeroLaw = field(default=DEFAULT_DICT_LAW)
    code_law: NonzeroLaw = field(default=DEFAULT_CODE_LAW)

    def __post_init__(self):
        object.__setattr__(self, "dims", tuple((int(d), int(r)) for d, r in self.dims))
        object.__setattr__(self, "column_sparsities", tuple(int(s) for s in self.column_sparsities))
        if self.amplitude_bounds is not None:
            object.__setattr__(self, "amplitude_bounds", tuple(float(m) for m in self.amplitude_bounds))
        self.validate()

    @property
    def L(self) -> int:
        return len(self.dims)

    def validate(self) -> None:
        """在任何采样之前检查维度链和稀疏度范围"""
        if self.L < 1:
            raise ParameterError("层数 L 必须至少为 1")
        for ell, (d, r) in enumerate(self.dims, start=1):
            if d < 1 or r < 1:
                raise DimensionError(f"A({ell}) 的形状必须为正，实际为 {d}x{r}")
        # A⁽ℓ+1⁾ 的列数必须等于 A⁽ℓ⁾ 的行数
        for ell in range(1, self.L):
            d_ell, _ = self.dims[ell - 1]
            _, r_next = self.dims[ell]
            if r_next != d_ell:
                raise DimensionError(
                    f"A({ell + 1}) 的列数 {r_next} 与 A({ell}) 的行数 {d_ell} 不一致")
        r1 = self.dims[0][1]
        if not 1 <= self.code_sparsity <= r1:
            raise ParameterError(f"编码稀疏度 s={self.code_sparsity} 必须位于 [1, {r1}]")
        if len(self.column_sparsities) != self.L - 1:
            raise ParameterError(
                f"需要 {self.L - 1} 个列稀疏度 s_(ℓ)，实际为 {len(self.column_sparsities)}")
        for ell, s_ell in enumerate(self.column_sparsities, start=1):
            d_ell = self.dims[ell - 1][0]
            if not 1 <= s_ell <= d_ell:
                raise ParameterError(f"s_({ell})={s_ell} 必须位于 [1, {d_ell}]")
        if self.amplitude_bounds is not None and len(self.amplitude_bounds) != self.L:
            raise ParameterError(
                f"需要 {self.L} 个幅值上界 M_(0..L-1)，实际为 {len(self.amplitude_bounds)}")

    def d(self, ell: int) -> int:
        return self.dims[ell - 1][0]

    def r(self, ell: int) -> int:
        return self.dims[ell - 1][1]

    def s_col(self, ell: int) -> int:
        """s_(ℓ)，约定 s_(0) = s"""
        return self.code_sparsity if ell == 0 else self.column_sparsities[ell - 1]

    def amplitudes(self) -> List[float]:
        """
        M_(ℓ)，ℓ = 0..L-1

        M_(0) 约束 |X_ij|；M_(ℓ) 约束 |√s_(ℓ)·A⁽ℓ⁾_ij|（列归一化后的稀疏字典）。
        """
        if self.amplitude_bounds is not None:
            return list(self.amplitude_bounds)
        bounds = [self.code_law.amplitude_bound()]
        for ell in range(1, self.L):
            # 归一化后非零元为 V_i/‖v‖ 且 |V_i| ≤ ‖v‖；Rademacher 时恰为 ±1/√s_(ℓ)
            if self.dict_law.kind == "rademacher":
                bounds.append(1.0)
            else:
                bounds.append(math.sqrt(self.s_col(ell)))
        return bounds

    def to_dict(self) -> Dict[str, Any]:
        return {
            "L": self.L,
            "dims": [list(dr) for dr in self.dims],
            "code_sparsity": self.code_sparsity,
            "column_sparsities": list(self.column_sparsities),
            "amplitude_bounds": self.amplitudes(),
            "dict_law": self.dict_law.describe(),
            "code_law": self.code_law.describe(),
        }

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "DeepModelSpec":
        return cls(
            dims=tuple(tuple(dr) for dr in data["dims"]),
            code_sparsity=int(data["code_sparsity"]),
            column_sparsities=tuple(data.get("column_sparsities", ())),
            amplitude_bounds=tuple(data["amplitude_bounds"]) if data.get("amplitude_bounds") else None,
            dict_law=NonzeroLaw.parse(data.get("dict_law", "rademacher")),
            code_law=NonzeroLaw.parse(data.get("code_law", "uniform_shell:1:2")),
        )


def desk_spec() -> DeepModelSpec:
    """桌面规模的两层模型：A⁽²⁾ 40×60，A⁽¹⁾ 60×150，s = s_(1) = 3"""
    return DeepModelSpec(dims=((60, 150), (40, 60)), code_sparsity=3, column_sparsities=(3,))


def paper_spec() -> DeepModelSpec:
    """完整规模的两层模型：A⁽²⁾ 100×200，A⁽¹⁾ 200×800，s = s_(1) = 3"""
    return DeepModelSpec(dims=((200, 800), (100, 200)), code_sparsity=3, column_sparsities=(3,))


DESK_SAMPLES = 2000
PAPER_SAMPLES = 6400
