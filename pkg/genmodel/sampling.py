"""
随机支撑集、稀疏/稠密字典、稀疏编码和扰动初始化的采样器
"""
import logging
import math
from typing import Optional, Tuple

import numpy as np

from core.errors import ParameterError
from core.types import Matrix, NONZERO_TOL, SupportSet, as_matrix
from genmodel.laws import DEFAULT_CODE_LAW, DEFAULT_DICT_LAW, NonzeroLaw
from genmodel.rng import stream

logger = logging.getLogger(__name__)


def sample_support(r: int, s: int, rng: np.random.Generator) -> SupportSet:
    """
    从 {0..r-1} 中均匀采样一个 s 元子集（部分 Fisher-Yates 洗牌，无放回）

    Args:
        r: 全集大小
        s: 子集大小
        rng: 随机数生成器

    Returns:
        SupportSet
    """
    if not 1 <= s <= r:
        raise ParameterError(f"支撑集大小 s={s} 必须位于 [1, {r}]")
    pool = np.arange(r)
    for i in range(s):
        j = int(rng.integers(i, r))
        pool[i], pool[j] = pool[j], pool[i]
    return SupportSet(tuple(sorted(int(k) for k in pool[:s])), r)


def _column_sparse(rows: int, cols: int, s: int, law: NonzeroLaw, scale: float,
                   rng: np.random.Generator) -> Matrix:
    """
    每列在均匀支撑上恰有 s 个非零元，非零值为 scale·V

    rng 只抽取一个根键；第 j 列的支撑和取值全部来自 (根键, j) 派生的独立流，
    因此前 k 列与总列数无关。
    """
    root = np.random.SeedSequence(int(rng.integers(0, 2 ** 63)))
    M = np.zeros((rows, cols))
    for j in range(cols):
        column_rng = stream(root, "column", j)
        support = sample_support(rows, s, column_rng).as_array()
        M[support, j] = scale * law.sample(s, column_rng)
    return M


def sample_sparse_dictionary(d: int, r: int, s_A: int,
                             law: NonzeroLaw = DEFAULT_DICT_LAW,
                             rng: Optional[np.random.Generator] = None) -> Matrix:
    """
    列稀疏随机字典 A_ij = √(d/s_A)·U_ij·V_ij，返回未归一化的原始形式

    Args:
        d: 行数
        r: 列数
        s_A: 每列非零个数
        law: V 的分布律（默认 Rademacher）
        rng: 随机数生成器

    Returns:
        d×r 矩阵
    """
    if not 1 <= s_A <= d:
        raise ParameterError(f"列稀疏度 s_A={s_A} 必须位于 [1, {d}]")
    if r < 1:
        raise ParameterError(f"列数 r={r} 必须为正")
    rng = np.random.default_rng() if rng is None else rng
    A = _column_sparse(d, r, s_A, law, math.sqrt(d / s_A), rng)
    if law.amplitude_bound() <= 1.0:
        # |V| ≤ 1 时 ‖a_j‖² ≤ s_A·d/s_A = d 几乎必然成立
        assert np.all(np.sum(A * A, axis=0) <= d * (1 + 1e-12))
    return A


def sample_dense_dictionary(d: int, r: int,
                            rng: Optional[np.random.Generator] = None) -> Matrix:
    """i.i.d. N(0, 1/d) 稠密字典，未归一化"""
    if d < 1 or r < 1:
        raise ParameterError(f"字典形状必须为正，实际为 {d}x{r}")
    rng = np.random.default_rng() if rng is None else rng
    return rng.normal(0.0, 1.0 / math.sqrt(d), size=(d, r))


def sample_codes(r: int, n: int, s: int, law: NonzeroLaw = DEFAULT_CODE_LAW,
                 rng: Optional[np.random.Generator] = None) -> Matrix:
    """
    稀疏编码矩阵 X：n 列，每列在均匀支撑上恰有 s 个非零元

    默认非零律为带随机符号的 U([1, 2])；需要单位方差时选 Rademacher。
    """
    if not 1 <= s <= r:
        raise ParameterError(f"编码稀疏度 s={s} 必须位于 [1, {r}]")
    if n < 1:
        raise ParameterError(f"样本数 n={n} 必须为正")
    rng = np.random.default_rng() if rng is None else rng
    return _column_sparse(r, n, s, law, 1.0, rng)


def snr_db(alpha: float) -> float:
    """初始化信噪比 −10·log₁₀(α²)"""
    return -10.0 * math.log10(alpha * alpha)


def alpha_for_snr(snr: float) -> float:
    """snr_db 的反函数"""
    return 10.0 ** (-snr / 20.0)


def perturb_dictionary(A: Matrix, alpha: float,
                       rng: Optional[np.random.Generator] = None) -> Tuple[Matrix, float]:
    """
    生成初始字典 A(0) = A + Z，Z_ij i.i.d. α·N(0, 1/d)，结果不归一化

    Args:
        A: 真实字典
        alpha: 扰动强度，必须为正；大于 1 时（SNR 为负）只记录警告
        rng: 随机数生成器

    Returns:
        (A(0), 以 dB 计的 SNR)
    """
    A = as_matrix(A, "A")
    if alpha <= 0:
        raise ParameterError(f"扰动强度 alpha 必须为正，实际为 {alpha}")
    if alpha > 1:
        logger.warning(f"alpha={alpha:.4f} > 1，初始化 SNR 为负 ({snr_db(alpha):.2f} dB)")
    rng = np.random.default_rng() if rng is None else rng
    d = A.shape[0]
    Z = alpha * rng.normal(0.0, 1.0 / math.sqrt(d), size=A.shape)
    return A + Z, snr_db(alpha)


def indicator_matrix(A: Matrix, tol: float = NONZERO_TOL) -> Matrix:
    """非零指示矩阵 U：|A_ij| ≥ tol 处为 1"""
    return (np.abs(as_matrix(A, "A")) >= tol).astype(np.float64)
