"""
测试公共配置
"""
import os

import pytest

from genmodel.spec import DeepModelSpec
from genmodel.synthesis import synthesize


def pytest_collection_modifyitems(config, items):
    if os.getenv("RUN_SLOW") == "1":
        return
    skip_slow = pytest.mark.skip(reason="需要设置 RUN_SLOW=1")
    for item in items:
        if "slow" in item.keywords:
            item.add_marker(skip_slow)


@pytest.fixture(scope="session")
def gentle_spec():
    """两层的小模型：隐藏层列数远多于行数，打开去偏时精确初始化下前向与后向分解都保持精确"""
    return DeepModelSpec(dims=((20, 80), (18, 20)), code_sparsity=1, column_sparsities=(2,))


@pytest.fixture(scope="session")
def gentle_instance(gentle_spec):
    return synthesize(gentle_spec, 600, seed=7)


@pytest.fixture(scope="session")
def tiny_instance():
    spec = DeepModelSpec(dims=((12, 20), (8, 12)), code_sparsity=2, column_sparsities=(2,))
    return synthesize(spec, 50, seed=3)
