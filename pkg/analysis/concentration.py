"""
稀疏随机矩阵奇异值集中性的蒙特卡洛检验

对 A_ij = √(d/s_A)·U_ij·V_ij（d×r），当 r ≫ d 时
√r(1 − δ) ≤ σ_min(Aᵀ) ≤ σ_max(Aᵀ) ≤ √r(1 + δ)，δ 约为 C√(d/r)。
"""
import logging
import math
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional

import numpy as np
from joblib import Parallel, delayed
from scipy import linalg as sp_linalg

from core.errors import ParameterError
from genmodel.laws import DEFAULT_DICT_LAW, NonzeroLaw
from genmodel.rng import SeedLike, stream
from genmodel.sampling import sample_sparse_dictionary

logger = logging.getLogger(__name__)

# r ≥ REGIME_RATIO·d 才视为处于集中性区间
REGIME_RATIO = 10
# 通过判据：δ̂ 中位数 < BOUND_CONST·√(d/r)
BOUND_CONST = 3.0


@dataclass
class ConcentrationReport:
    d: int
    r: int
    s_A: int
    trials: int
    smin_ratios: List[float] = field(default_factory=list)
    smax_ratios: List[float] = field(default_factory=list)
    deviations: List[float] = field(default_factory=list)
    in_regime: bool = True
    bound: float = 0.0
    passed: Optional[bool] = None

    def quantiles(self) -> Dict[str, float]:
        dev = np.asarray(self.deviations)
        return {
            "median": float(np.median(dev)),
            "q90": float(np.quantile(dev, 0.9)),
            "max": float(dev.max()),
        }

    def to_dict(self) -> Dict[str, Any]:
        return {
            "d": self.d, "r": self.r, "s_A": self.s_A, "trials": self.trials,
            "in_regime": self.in_regime, "bound": self.bound, "passed": self.passed,
            "deviation_quantiles": self.quantiles(),
            "smin_ratios": self.smin_ratios, "smax_ratios": self.smax_ratios,
        }


def _one_trial(d: int, r: int, s_A: int, law: NonzeroLaw, seed: SeedLike, k: int):
    A = sample_sparse_dictionary(d, r, s_A, law, stream(seed, "concentration", k))
    sv = sp_linalg.svdvals(A)
    root = math.sqrt(r)
    return float(sv[-1]) / root, float(sv[0]) / root


def singular_concentration_check(d: int, r: int, s_A: int, trials: int, seed: SeedLike = 0,
                                 law: NonzeroLaw = DEFAULT_DICT_LAW,
                                 n_jobs: int = 1) -> ConcentrationReport:
    """
    采样 trials 个稀疏随机矩阵，记录 σ_min(Aᵀ)/√r、σ_max(Aᵀ)/√r 及偏离
    δ̂ = max(|σ_max/√r − 1|, |1 − σ_min/√r|)

    r < 10d 时不在集中性区间内，只生成报告、不判定通过与否。
    """
    if trials < 1:
        raise ParameterError(f"试验次数必须为正，实际为 {trials}")
    if d > r:
        raise ParameterError(f"需要 d ≤ r，实际为 d={d}, r={r}")
    results = Parallel(n_jobs=n_jobs, prefer="threads")(
        delayed(_one_trial)(d, r, s_A, law, seed, k) for k in range(trials))
    report = ConcentrationReport(d, r, s_A, trials)
    for lo, hi in results:
        report.smin_ratios.append(lo)
        report.smax_ratios.append(hi)
        report.deviations.append(max(abs(hi - 1.0), abs(1.0 - lo)))
    report.in_regime = r >= REGIME_RATIO * d
    report.bound = BOUND_CONST * math.sqrt(d / r)
    if report.in_regime:
        report.passed = report.quantiles()["median"] < report.bound
    else:
        logger.warning(f"r={r} < {REGIME_RATIO}·d={REGIME_RATIO * d}，不在集中性区间内，只记录不判定")
    return report
