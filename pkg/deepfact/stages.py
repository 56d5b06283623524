"""
前向与后向分解共用的阶段执行辅助函数
"""
import logging
from dataclasses import asdict
from typing import Optional, Sequence

import numpy as np

from altmin.altmin_dict import AltMinResult, altmin_dict
from altmin.config import AltMinConfig
from core.errors import (AltMinAbort, DegenerateAtomError, DimensionError,
                         FactorizationAbort, ParameterError)
from core.types import Matrix
from deepfact.report import FactorizationReport

logger = logging.getLogger(__name__)


def check_shape(name: str, M: Matrix, expected) -> None:
    if expected is not None and tuple(M.shape) != tuple(expected):
        raise DimensionError(f"{name} 的形状 {M.shape} 与模型要求的 {tuple(expected)} 不一致")


def check_inits(inits: Sequence[Matrix], needed: int) -> None:
    if len(inits) < needed:
        raise ParameterError(f"需要 {needed} 个初始字典，实际为 {len(inits)}")


def new_report(mode: str, L: int, cfg: AltMinConfig, seed: Optional[int],
               extra: Optional[dict] = None) -> FactorizationReport:
    config = asdict(cfg)
    config.update(extra or {})
    return FactorizationReport(mode=mode, L=L, seed=seed, config=config)


def run_stage(report: FactorizationReport, name: str, Y: Matrix, A0: Matrix,
              cfg: AltMinConfig, s: int, truth: Optional[Matrix]) -> AltMinResult:
    """执行一次 AltMinDict，失败时带着已完成的阶段抛出 FactorizationAbort"""
    logger.info(f"{report.mode} 分解阶段 {name}: 输入 {Y.shape}，稀疏度 {s}")
    try:
        return altmin_dict(Y, A0, cfg, s, truth=truth)
    except (AltMinAbort, DegenerateAtomError) as e:
        raise FactorizationAbort(f"阶段 {name} 失败: {e}", report) from e


def unscale(codes: Matrix, scale: float) -> Matrix:
    return np.asarray(codes) / scale
