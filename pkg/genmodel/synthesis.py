"""
深度稀疏生成模型 Y = A⁽ᴸ⁾···A⁽¹⁾X 的合成
"""
import logging
from dataclasses import dataclass
from functools import reduce
from typing import Any, Dict, List

import numpy as np

from core.errors import ParameterError
from core.linalg import column_normalize
from core.types import Matrix, column_nonzero_counts
from genmodel.rng import SeedLike, stream
from genmodel.sampling import (sample_codes, sample_dense_dictionary,
                               sample_sparse_dictionary)
from genmodel.spec import DeepModelSpec

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class DeepModelInstance:
    """
    生成模型的一次实现

    Attributes:
        spec: 模型结构
        dicts: A⁽¹⁾..A⁽ᴸ⁾，全部列归一化
        codes: X，r₁×n
        intermediates: Y⁽¹⁾..Y⁽ᴸ⁻¹⁾
        observations: Y = Y⁽ᴸ⁾，d_L×n
        seed: 根种子
    """
    spec: DeepModelSpec
    dicts: List[Matrix]
    codes: Matrix
    intermediates: List[Matrix]
    observations: Matrix
    seed: int

    @property
    def L(self) -> int:
        return self.spec.L

    @property
    def n(self) -> int:
        return self.codes.shape[1]

    def dictionary(self, ell: int) -> Matrix:
        """A⁽ℓ⁾，ℓ 从 1 开始"""
        return self.dicts[ell - 1]

    def layer_output(self, ell: int) -> Matrix:
        """Y⁽ℓ⁾，约定 Y⁽⁰⁾ = X、Y⁽ᴸ⁾ = Y"""
        if ell == 0:
            return self.codes
        if ell == self.L:
            return self.observations
        return self.intermediates[ell - 1]

    def product(self, ell: int) -> Matrix:
        """乘积字典 A⁽ℓ→L⁾ = A⁽ᴸ⁾···A⁽ℓ⁾"""
        if not 1 <= ell <= self.L:
            raise ParameterError(f"乘积起点 ℓ={ell} 必须位于 [1, {self.L}]")
        return reduce(lambda acc, A: A @ acc, self.dicts[ell:], self.dicts[ell - 1])

    def recompute_observations(self) -> Matrix:
        """按级联乘法重新计算 Y，用于确定性检查"""
        return reduce(lambda acc, A: A @ acc, self.dicts, self.codes)

    def manifest(self) -> Dict[str, Any]:
        return {
            "kind": "deep_model_instance",
            "seed": self.seed,
            "n": self.n,
            "spec": self.spec.to_dict(),
            "matrices": self.matrix_names(),
        }

    def matrix_names(self) -> Dict[str, List[int]]:
        names = {f"A{ell}": list(self.dictionary(ell).shape) for ell in range(1, self.L + 1)}
        names["X"] = list(self.codes.shape)
        for ell in range(1, self.L):
            names[f"Y{ell}"] = list(self.layer_output(ell).shape)
        names["Y"] = list(self.observations.shape)
        return names

    def named_matrices(self) -> Dict[str, Matrix]:
        out = {f"A{ell}": self.dictionary(ell) for ell in range(1, self.L + 1)}
        out["X"] = self.codes
        for ell in range(1, self.L):
            out[f"Y{ell}"] = self.layer_output(ell)
        out["Y"] = self.observations
        return out


def synthesize(spec: DeepModelSpec, n: int, seed: SeedLike = 0) -> DeepModelInstance:
    """
    采样一次深度模型实现

    A⁽ᴸ⁾ 为稠密高斯字典，A⁽ℓ⁾ (ℓ < L) 为列稀疏字典，全部列归一化；
    X 为列稀疏编码。所有 Y⁽ℓ⁾ 和 Y 通过精确的级联乘法得到。

    Args:
        spec: 模型结构（已在构造时校验）
        n: 样本数
        seed: 根种子，相同 (spec, n, seed) 得到逐位相同的实现

    Returns:
        DeepModelInstance
    """
    spec.validate()
    if n < 1:
        raise ParameterError(f"样本数 n={n} 必须为正")

    L = spec.L
    dicts: List[Matrix] = []
    for ell in range(1, L + 1):
        d, r = spec.dims[ell - 1]
        rng = stream(seed, f"A{ell}")
        if ell == L:
            raw = sample_dense_dictionary(d, r, rng)
        else:
            raw = sample_sparse_dictionary(d, r, spec.s_col(ell), spec.dict_law, rng)
        dicts.append(column_normalize(raw))

    X = sample_codes(spec.r(1), n, spec.code_sparsity, spec.code_law, stream(seed, "X"))

    outputs = [X]
    for A in dicts:
        outputs.append(A @ outputs[-1])
    intermediates = outputs[1:L]
    Y = outputs[L]

    # 稀疏度记账：Y⁽ℓ⁾ 每列非零个数不超过 s·∏ s_(ℓ')
    bound = spec.code_sparsity
    for ell in range(1, L):
        bound *= spec.s_col(ell)
        worst = int(column_nonzero_counts(intermediates[ell - 1]).max())
        assert worst <= bound, f"Y{ell} 列稀疏度 {worst} 超过上界 {bound}"

    logger.info(f"合成深度模型: L={L}, n={n}, Y 形状 {Y.shape}, seed={seed}")
    root_seed = int(seed) if not isinstance(seed, np.random.SeedSequence) else int(seed.entropy)
    return DeepModelInstance(spec, dicts, X, intermediates, Y, root_seed)
