"""
非零元分布律
"""
from dataclasses import dataclass

import numpy as np
from scipy import stats

from core.errors import ParameterError

RADEMACHER = "rademacher"
UNIFORM_SHELL = "uniform_shell"
GAUSSIAN_TRUNCATED = "gaussian_truncated"


@dataclass(frozen=True)
class NonzeroLaw:
    """
    非零元的分布律

    - rademacher: ±1 等概率
    - uniform_shell(lo, hi): 幅值 U[lo, hi]，符号随机
    - gaussian_truncated(hi): 截断到 |v| ≤ hi 的标准正态，再缩放为单位方差
    """
    kind: str = RADEMACHER
    lo: float = 1.0
    hi: float = 2.0

    def __post_init__(self):
        if self.kind not in (RADEMACHER, UNIFORM_SHELL, GAUSSIAN_TRUNCATED):
            raise ParameterError(f"不支持的分布律: {self.kind}")
        if self.kind == UNIFORM_SHELL and not 0 <= self.lo <= self.hi:
            raise ParameterError(f"uniform_shell 需要 0 ≤ lo ≤ hi，实际为 ({self.lo}, {self.hi})")
        if self.kind == GAUSSIAN_TRUNCATED and self.hi <= 0:
            raise ParameterError(f"截断半径必须为正，实际为 {self.hi}")

    @classmethod
    def parse(cls, text: str) -> "NonzeroLaw":
        """解析 'rademacher'、'uniform_shell:1:2'、'gaussian_truncated:3' 形式的文本"""
        parts = text.strip().split(":")
        kind = parts[0]
        try:
            if kind == UNIFORM_SHELL:
                lo, hi = (float(parts[1]), float(parts[2])) if len(parts) == 3 else (1.0, 2.0)
                return cls(kind, lo, hi)
            if kind == GAUSSIAN_TRUNCATED:
                return cls(kind, 0.0, float(parts[1]) if len(parts) == 2 else 3.0)
        except (IndexError, ValueError) as e:
            raise ParameterError(f"无法解析分布律 '{text}': {e}") from e
        return cls(kind)

    def describe(self) -> str:
        if self.kind == UNIFORM_SHELL:
            return f"{UNIFORM_SHELL}:{self.lo:g}:{self.hi:g}"
        if self.kind == GAUSSIAN_TRUNCATED:
            return f"{GAUSSIAN_TRUNCATED}:{self.hi:g}"
        return RADEMACHER

    def _truncnorm_scale(self) -> float:
        return float(np.sqrt(stats.truncnorm.var(-self.hi, self.hi)))

    def amplitude_bound(self) -> float:
        """非零元幅值的几乎必然上界"""
        if self.kind == UNIFORM_SHELL:
            return self.hi
        if self.kind == GAUSSIAN_TRUNCATED:
            return self.hi / self._truncnorm_scale()
        return 1.0

    def second_moment(self) -> float:
        """E[V²]"""
        if self.kind == UNIFORM_SHELL:
            if self.hi == self.lo:
                return self.lo * self.lo
            return (self.hi ** 3 - self.lo ** 3) / (3.0 * (self.hi - self.lo))
        return 1.0

    def sample(self, size: int, rng: np.random.Generator) -> np.ndarray:
        """采样 size 个非零元"""
        if self.kind == RADEMACHER:
            return rng.choice(np.array([-1.0, 1.0]), size=size)
        if self.kind == UNIFORM_SHELL:
            signs = rng.choice(np.array([-1.0, 1.0]), size=size)
            return signs * rng.uniform(self.lo, self.hi, size=size)
        draws = stats.truncnorm.rvs(-self.hi, self.hi, size=size, random_state=rng)
        return np.asarray(draws, dtype=np.float64) / self._truncnorm_scale()


DEFAULT_DICT_LAW = NonzeroLaw(RADEMACHER)
DEFAULT_CODE_LAW = NonzeroLaw(UNIFORM_SHELL, 1.0, 2.0)


