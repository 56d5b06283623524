"""
集券问题的蒙特卡洛估计：反复均匀抽取 s 元子集，直到 r 个元素全部出现

已见 k 个元素时，一次抽取带来的新元素个数服从超几何分布
Hypergeometric(ngood=r−k, nbad=k, nsample=s)，因此按试验向量化地推进该马尔可夫链。
"""
import math
from typing import NamedTuple

import numpy as np

from core.errors import ParameterError
from genmodel.rng import SeedLike, stream


class CouponEstimate(NamedTuple):
    mean_draws: float
    stderr: float


def coupon_collector_trials(r: int, s: int, trials: int, seed: SeedLike = 0) -> CouponEstimate:
    """
    Args:
        r: 元素总数
        s: 每次抽取的子集大小
        trials: 试验次数
        seed: 随机种子

    Returns:
        (平均抽取次数, 标准误)
    """
    if not 1 <= s <= r:
        raise ParameterError(f"子集大小 s={s} 必须位于 [1, {r}]")
    if trials < 1:
        raise ParameterError(f"试验次数必须为正，实际为 {trials}")
    rng = stream(seed, "coupon")
    seen = np.zeros(trials, dtype=np.int64)
    draws = np.zeros(trials, dtype=np.int64)
    active = np.ones(trials, dtype=bool)
    while active.any():
        k = seen[active]
        seen[active] = k + rng.hypergeometric(r - k, k, s)
        draws[active] += 1
        active = seen < r
    mean = float(draws.mean())
    stderr = float(draws.std(ddof=1) / math.sqrt(trials)) if trials > 1 else 0.0
    return CouponEstimate(mean, stderr)


def harmonic_expectation(r: int) -> float:
    """s = 1 时的期望 r·H_r"""
    return r * sum(1.0 / k for k in range(1, r + 1))


def conjectured_lower_bound(r: int, s: int) -> float:
    """(r/s)·ln r"""
    return r / s * math.log(r)
