"""
样本复杂度与隐藏层规模的界

各界中的通用常数取 1 并标记 constant_free，报告的是括号内表达式的原始值。
"""
import math
from dataclasses import asdict, dataclass
from typing import Any, Dict, List, Optional, Sequence

from core.errors import ParameterError
from genmodel.spec import DeepModelSpec


@dataclass(frozen=True)
class ComplexityRow:
    """
    Attributes:
        mode: 'forward'、'backward' 或 'conjecture'
        name: 'A5a'、'A5b'、'B5' 或 'lower_bound'
        layer: 对应层号
        value: 表达式的值
        compare_to: 与之比较的量（样本数 n 或隐藏层规模 r_ℓ）
        passed: compare_to ≥ value；无比较对象时为 None
        constant_free: 是否省略了未知常数
        note: 说明
    """
    mode: str
    name: str
    layer: int
    value: float
    compare_to: Optional[float]
    passed: Optional[bool]
    constant_free: bool
    note: str = ""

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)


def _deltas(delta, count: int) -> List[float]:
    values = [float(delta)] * count if isinstance(delta, (int, float)) else [float(x) for x in delta]
    if len(values) != count or any(not 0 < x < 1 for x in values):
        raise ParameterError(f"需要 {count} 个位于 (0, 1) 的失败概率，实际为 {delta}")
    return values


def forward_sample_complexity(r1: int, M0: float, s: int, delta: float) -> float:
    """max(r₁², r₁·M₀²·s)·ln(2r₁/δ)"""
    return max(r1 * r1, r1 * M0 * M0 * s) * math.log(2 * r1 / delta)


def crude_intermediate_bounds(spec: DeepModelSpec) -> List[float]:
    """
    只依据模型结构给出的 |σ_(0→ℓ)·Y⁽ℓ⁾_ij| 上界 M_Y(ℓ)，ℓ = 0..L−1

    每个元素最多是 s_{Y⁽ℓ−1⁾} 项之和，每项不超过 M_(ℓ)·M_Y(ℓ−1)。
    """
    M = spec.amplitudes()
    bounds = [M[0]]
    s_y = spec.code_sparsity
    for ell in range(1, spec.L):
        bounds.append(s_y * M[ell] * bounds[-1])
        s_y *= spec.s_col(ell)
    return bounds


def complexity_expressions(spec: DeepModelSpec, delta=0.1, n: Optional[int] = None,
                           intermediate_bounds: Optional[Sequence[float]] = None) -> List[ComplexityRow]:
    """
    计算前向（A5a/A5b）、后向（B5）各层的界以及猜想下界 (r₁/s)·ln r₁

    Args:
        spec: 模型结构
        delta: 失败概率，标量或每层一个（按 ℓ = 1..L）
        n: 可选的样本数，提供时判定 A5a 与 B5
        intermediate_bounds: 实测的 M_Y(ℓ)，ℓ = 0..L−1；缺省用 crude_intermediate_bounds

    Returns:
        ComplexityRow 列表
    """
    L = spec.L
    deltas = _deltas(delta, L)
    M = spec.amplitudes()
    s = spec.code_sparsity
    r1 = spec.r(1)
    rows: List[ComplexityRow] = []

    a5a = forward_sample_complexity(r1, M[0], s, deltas[0])
    second = r1 * r1 * math.log(2 * r1 / deltas[0])
    first = r1 * M[0] ** 2 * s * math.log(2 * r1 / deltas[0])
    note = ""
    if n is not None and n < second:
        note = "二阶项 r₁² 未满足；仿真显示二阶项并非必要"
        if n >= first:
            note += "，一阶项 r₁M₀²s 已满足"
    rows.append(ComplexityRow("forward", "A5a", 1, a5a, n, None if n is None else n >= a5a, True, note))

    for ell in range(1, L):
        r_next = spec.r(ell + 1)
        value = forward_sample_complexity(r_next, M[ell], spec.s_col(ell), deltas[ell])
        r_ell = spec.r(ell)
        rows.append(ComplexityRow("forward", "A5b", ell, value, r_ell, r_ell >= value, True))

    s_y = [s]
    for ell in range(1, L):
        s_y.append(s_y[-1] * spec.s_col(ell))
    m_y = list(intermediate_bounds) if intermediate_bounds is not None else crude_intermediate_bounds(spec)
    if len(m_y) != L:
        raise ParameterError(f"需要 {L} 个 M_Y，实际为 {len(m_y)}")
    for ell in range(1, L + 1):
        r_ell = spec.r(ell)
        dl = deltas[ell - 1]
        value = max(r1 * r_ell * s_y[ell - 1] / s * math.log(2 * r1 / dl),
                    r_ell * m_y[ell - 1] ** 2 * s_y[ell - 1] * math.log(2 * r_ell / dl))
        rows.append(ComplexityRow("backward", "B5", ell, value, n,
                                  None if n is None else n >= value, True))

    rows.append(ComplexityRow("conjecture", "lower_bound", 1, r1 / s * math.log(r1), n,
                              None if n is None else n >= r1 / s * math.log(r1), True,
                              "集券论证给出的 (r₁/s)·ln r₁"))
    return rows
