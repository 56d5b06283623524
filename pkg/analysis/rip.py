"""
受限等距常数的估计与乘积界

δ_s 取所有 s 列子矩阵上 max(1 − σ_min², σ_max² − 1) 的最大值。
支撑集个数不超过阈值时穷举（结果即真实 δ_s），否则按试验随机采样，
此时结果只是真实 δ_s 的下界。
"""
import itertools
import logging
import math
from dataclasses import dataclass
from typing import Any, Dict, List, NamedTuple, Optional, Sequence, Tuple

import numpy as np
from joblib import Parallel, delayed

from core.errors import DimensionError, ParameterError
from core.types import Matrix, SupportSet, as_matrix
from genmodel.rng import SeedLike, stream
from genmodel.sampling import sample_support

logger = logging.getLogger(__name__)

EXHAUSTIVE_LIMIT = 100_000

# 每批做 SVD 的支撑集个数
_CHUNK = 2048


@dataclass(frozen=True)
class RipEstimate:
    """
    Attributes:
        order: 阶数 s
        delta_hat: 观察到的最大偏离
        trials: 检查的支撑集个数
        worst_support: 取到最大偏离的支撑集
        sigma_extremes: 该支撑集上的 (σ_min, σ_max)
        exhaustive: 是否穷举；为 False 时 delta_hat 仅是下界
    """
    order: int
    delta_hat: float
    trials: int
    worst_support: SupportSet
    sigma_extremes: Tuple[float, float]
    exhaustive: bool

    @property
    def lower_bound(self) -> bool:
        return not self.exhaustive

    def to_dict(self) -> Dict[str, Any]:
        return {
            "order": self.order,
            "delta_hat": self.delta_hat,
            "trials": self.trials,
            "worst_support": list(self.worst_support.indices),
            "sigma_min": self.sigma_extremes[0],
            "sigma_max": self.sigma_extremes[1],
            "exhaustive": self.exhaustive,
            "label": "exact" if self.exhaustive else "lower bound",
        }


def _chunk_extremes(A: Matrix, supports: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """一批支撑集上子矩阵的 (σ_min, σ_max)；s > d 时 σ_min 为 0"""
    d = A.shape[0]
    s = supports.shape[1]
    stacked = np.transpose(A[:, supports], (1, 0, 2))
    sv = np.linalg.svd(stacked, compute_uv=False)
    smax = sv[:, 0]
    smin = sv[:, -1] if s <= d else np.zeros(len(supports))
    return smin, smax


def _scan(A: Matrix, supports: np.ndarray, n_jobs: int) -> Tuple[int, float, float, float]:
    """返回 (最坏支撑在 supports 中的位置, δ, σ_min, σ_max)"""
    chunks = [supports[i:i + _CHUNK] for i in range(0, len(supports), _CHUNK)]
    results = Parallel(n_jobs=n_jobs, prefer="threads")(
        delayed(_chunk_extremes)(A, chunk) for chunk in chunks)
    smin = np.concatenate([r[0] for r in results])
    smax = np.concatenate([r[1] for r in results])
    delta = np.maximum(1.0 - smin ** 2, smax ** 2 - 1.0)
    k = int(np.argmax(delta))
    return k, float(delta[k]), float(smin[k]), float(smax[k])


def _validate(A: Matrix, s: int) -> Matrix:
    A = as_matrix(A, "A")
    if not 1 <= s <= A.shape[1]:
        raise ParameterError(f"RIP 阶数 s={s} 必须位于 [1, {A.shape[1]}]")
    return A


def exhaustive_rip_constant(A: Matrix, s: int, n_jobs: int = 1) -> RipEstimate:
    """穷举全部 C(cols, s) 个支撑集，得到真实的 δ_s"""
    A = _validate(A, s)
    cols = A.shape[1]
    supports = np.array(list(itertools.combinations(range(cols), s)), dtype=np.intp)
    k, delta, smin, smax = _scan(A, supports, n_jobs)
    worst = SupportSet(tuple(int(i) for i in supports[k]), cols)
    return RipEstimate(s, max(delta, 0.0), len(supports), worst, (smin, smax), True)


def rip_constant_estimate(A: Matrix, s: int, trials: int, seed: SeedLike = 0,
                          exhaustive_limit: int = EXHAUSTIVE_LIMIT, n_jobs: int = 1) -> RipEstimate:
    """
    估计 δ_s(A)

    Args:
        A: 输入矩阵（是否预先归一化由调用方决定）
        s: 阶数
        trials: 采样模式下的支撑集个数
        seed: 第 k 次试验使用派生流 stream(seed, 'rip', k)，不同 trials 的流是嵌套的
        exhaustive_limit: C(cols, s) 不超过该值时改为穷举
        n_jobs: joblib 线程数

    Returns:
        RipEstimate
    """
    A = _validate(A, s)
    cols = A.shape[1]
    if math.comb(cols, s) <= exhaustive_limit:
        return exhaustive_rip_constant(A, s, n_jobs)
    if trials < 1:
        raise ParameterError(f"试验次数必须为正，实际为 {trials}")
    supports = np.array([sample_support(cols, s, stream(seed, "rip", k)).indices
                         for k in range(trials)], dtype=np.intp)
    k, delta, smin, smax = _scan(A, supports, n_jobs)
    worst = SupportSet(tuple(int(i) for i in supports[k]), cols)
    logger.debug(f"RIP 采样估计: s={s}, trials={trials}, delta_hat={delta:.4f}（下界）")
    return RipEstimate(s, max(delta, 0.0), trials, worst, (smin, smax), False)


def product_rip_bound(deltas: Sequence[float]) -> float:
    """
    乘积矩阵的 RIP 常数上界 max(1 − ∏(1 − δ_ℓ), ∏(1 + δ_ℓ) − 1)

    Raises:
        ParameterError: 某个 δ 不在 [0, 1) 内
    """
    deltas = [float(x) for x in deltas]
    if any(not 0.0 <= x < 1.0 for x in deltas):
        raise ParameterError(f"每个 delta 必须位于 [0, 1)，实际为 {deltas}")
    lower = math.prod(1.0 - x for x in deltas)
    upper = math.prod(1.0 + x for x in deltas)
    return max(1.0 - lower, upper - 1.0)


class ProductRipCheck(NamedTuple):
    """随机稀疏向量上 ‖Py‖²/‖y‖² 的取值范围与理论区间"""
    min_ratio: float
    max_ratio: float
    lower: float
    upper: float
    violations: int
    trials: int


def product_rip_vector_check(dicts: Sequence[Matrix], deltas: Sequence[float], sparsity: int,
                             trials: int, seed: SeedLike = 0, tol: float = 1e-10) -> ProductRipCheck:
    """
    对随机 sparsity-稀疏向量 y 检查 ∏(1 − δ_ℓ)‖y‖² ≤ ‖A_k···A_1 y‖² ≤ ∏(1 + δ_ℓ)‖y‖²

    Args:
        dicts: 按作用顺序排列的因子 [A_1, ..., A_k]（A_1 最先作用于 y）
        deltas: 各因子在对应阶数上的 RIP 常数
        sparsity: y 的非零个数
        trials: 采样向量个数
        seed: 第 k 个向量使用 stream(seed, 'product_rip', k)
        tol: 判定违反时的相对容差

    Returns:
        ProductRipCheck
    """
    mats = [as_matrix(A, f"A{i}") for i, A in enumerate(dicts, start=1)]
    if len(deltas) != len(mats):
        raise ParameterError(f"需要 {len(mats)} 个 delta，实际为 {len(deltas)}")
    for i in range(1, len(mats)):
        if mats[i].shape[1] != mats[i - 1].shape[0]:
            raise DimensionError(f"第 {i + 1} 个因子的列数与第 {i} 个因子的行数不一致")
    product = mats[0]
    for A in mats[1:]:
        product = A @ product
    cols = product.shape[1]
    if not 1 <= sparsity <= cols:
        raise ParameterError(f"稀疏度 {sparsity} 必须位于 [1, {cols}]")

    lower = math.prod(max(0.0, 1.0 - float(x)) for x in deltas)
    upper = math.prod(1.0 + float(x) for x in deltas)
    ratios: List[float] = []
    for k in range(trials):
        rng = stream(seed, "product_rip", k)
        y = np.zeros(cols)
        support = sample_support(cols, sparsity, rng).as_array()
        y[support] = rng.standard_normal(sparsity)
        ratios.append(float(np.sum((product @ y) ** 2) / np.sum(y ** 2)))
    arr = np.asarray(ratios)
    violations = int(np.count_nonzero((arr < lower * (1 - tol)) | (arr > upper * (1 + tol))))
    return ProductRipCheck(float(arr.min()), float(arr.max()), lower, upper, violations, trials)
