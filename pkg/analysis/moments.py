"""
稀疏随机字典生成器的矩检验

A_ij = √(d/s_A)·U_ij·V_ij，U 的每列为均匀 s_A 元支撑的指示向量。应满足：
Pr[U_ij = 1] = s_A/d，Pr[U_ij U_kj = 1] = s_A(s_A−1)/(d(d−1))，
E[A_ij] = 0，E[A_ij²] = E[V²]，非零位置上 A_ij² 的均值为 (d/s_A)·E[V²]（Rademacher 时恰为 d/s_A），同列与同行不同元素互不相关，|V| ≤ 1 时 ‖a_j‖² ≤ d。
"""
import math
from dataclasses import asdict, dataclass
from typing import Any, Dict, List

import numpy as np

from genmodel.laws import DEFAULT_DICT_LAW, NonzeroLaw
from genmodel.rng import SeedLike, stream
from genmodel.sampling import sample_sparse_dictionary

# 经验值与理论值之差不超过该倍数的标准误即视为吻合
Z_LIMIT = 3.0


@dataclass(frozen=True)
class MomentCheck:
    name: str
    empirical: float
    expected: float
    stderr: float
    within: bool

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)


def _check(name: str, samples: np.ndarray, expected: float) -> MomentCheck:
    samples = np.asarray(samples, dtype=np.float64).ravel()
    mean = float(samples.mean())
    se = float(samples.std(ddof=1) / math.sqrt(samples.size)) if samples.size > 1 else 0.0
    within = abs(mean - expected) <= Z_LIMIT * se + 1e-12 * max(1.0, abs(expected))
    return MomentCheck(name, mean, expected, se, bool(within))


def moment_battery(d: int, r: int, s_A: int, seed: SeedLike = 0,
                   law: NonzeroLaw = DEFAULT_DICT_LAW) -> List[MomentCheck]:
    """
    采样一个 d×r 稀疏随机字典并逐项检验矩恒等式

    Returns:
        MomentCheck 列表；范数上界一项的 empirical 为 max‖a_j‖²，expected 为 d
    """
    A = sample_sparse_dictionary(d, r, s_A, law, stream(seed, "moments"))
    U = (A != 0).astype(np.float64)
    checks = [
        _check("inclusion", U[0, :], s_A / d),
        _check("pair_inclusion", U[0, :] * U[1, :], s_A * (s_A - 1) / (d * (d - 1))),
        _check("mean", A[0, :], 0.0),
        _check("second_moment", A[0, :] ** 2, law.second_moment()),
        _check("nonzero_square_mean", A[A != 0] ** 2, d / s_A * law.second_moment()),
        _check("within_column_cross", A[0, :] * A[1, :], 0.0),
        _check("within_row_cross", A[0, :-1] * A[0, 1:], 0.0),
    ]
    norms = np.sum(A * A, axis=0)
    bounded = law.amplitude_bound() <= 1.0
    checks.append(MomentCheck("column_norm_bound", float(norms.max()), float(d), 0.0,
                              bool(norms.max() <= d * (1 + 1e-12)) if bounded else True))
    return checks
