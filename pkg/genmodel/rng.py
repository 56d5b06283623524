"""
可拆分的计数器型随机数流

每个 (seed, 角色, 序号) 通过 SeedSequence 的 spawn_key 派生一个独立的 Philox 流，
同一组键在任何线程、任何调度顺序下都得到相同的数列。
"""
import zlib
from typing import List, Union

import numpy as np

SeedLike = Union[int, np.random.SeedSequence]


def _role_key(role: str) -> int:
    # 角色名映射为稳定的 32 位整数，不依赖 Python 的 hash 随机化
    return zlib.crc32(role.encode("utf-8"))


def seed_sequence(seed: SeedLike) -> np.random.SeedSequence:
    if isinstance(seed, np.random.SeedSequence):
        return seed
    return np.random.SeedSequence(int(seed))


def stream(seed: SeedLike, role: str, index: int = 0) -> np.random.Generator:
    """
    派生命名随机流

    Args:
        seed: 根种子或 SeedSequence
        role: 角色名，如 'A1'、'X'、'perturb'
        index: 同一角色下的序号（列号、试验号等）

    Returns:
        基于 Philox 的 numpy Generator
    """
    root = seed_sequence(seed)
    child = np.random.SeedSequence(
        entropy=root.entropy,
        spawn_key=tuple(root.spawn_key) + (_role_key(role), int(index)),
    )
    return np.random.Generator(np.random.Philox(child))


def trial_streams(seed: SeedLike, role: str, count: int) -> List[np.random.Generator]:
    """为 count 次独立试验派生随机流；前 k 个流与 count 无关，因此不同试验次数的流是嵌套的"""
    return [stream(seed, role, k) for k in range(count)]


def make_rng(seed: SeedLike) -> np.random.Generator:
    """由种子直接构造 Philox 生成器"""
    return np.random.Generator(np.random.Philox(seed_sequence(seed)))
