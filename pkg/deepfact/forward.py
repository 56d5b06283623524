"""
前向分解：先学习乘积字典 A⁽¹→L⁾，再逐层剥离

阶段 1 在 Y 上运行 AltMinDict 得到 Â⁽¹→L⁾ 与 X̂；
阶段 ℓ ≥ 2 在 √s_(ℓ−1)·Â⁽ℓ−1→L⁾ 上运行 AltMinDict 得到 Â⁽ℓ→L⁾，
其编码除以 √s_(ℓ−1) 并列归一化后即为 Â⁽ℓ−1⁾。
"""
import logging
import math
from typing import Optional, Sequence

from altmin.config import AltMinConfig
from altmin.metrics import dict_error
from core.errors import DegenerateAtomError, FactorizationAbort, ParameterError
from core.linalg import column_normalize
from core.types import Matrix, as_matrix
from deepfact.ledger import SparsityLedger
from deepfact.report import FORWARD, FactorizationReport, StageResult
from deepfact.stages import check_inits, check_shape, new_report, run_stage, unscale
from genmodel.synthesis import DeepModelInstance

logger = logging.getLogger(__name__)


def forward_factorize(Y: Matrix, inits: Sequence[Matrix], ledger: SparsityLedger,
                      cfg: AltMinConfig, instance: Optional[DeepModelInstance] = None,
                      last_stage: Optional[int] = None) -> FactorizationReport:
    """
    前向分解

    Args:
        Y: 观测矩阵
        inits: A⁽ℓ→L⁾(0)，ℓ = 1..last_stage
        ledger: 稀疏度记账
        cfg: AltMinDict 参数
        instance: 可选的生成实例，提供真值误差与形状检查
        last_stage: 最后一个阶段 ℓ̄，缺省为 L

    Returns:
        FactorizationReport

    Raises:
        FactorizationAbort: 某阶段失败，异常携带已完成阶段的报告
    """
    Y = as_matrix(Y, "Y")
    L = ledger.L
    last = L if last_stage is None else last_stage
    if not 1 <= last <= L:
        raise ParameterError(f"last_stage={last} 必须位于 [1, {L}]")
    check_inits(inits, last)

    report = new_report(FORWARD, L, cfg, instance.seed if instance else None, ledger.to_dict())
    spec = instance.spec if instance else None

    previous = None
    for ell in range(1, last + 1):
        name = f"A({ell}->{L})"
        A0 = as_matrix(inits[ell - 1], f"A({ell}->{L})(0)")
        truth = instance.product(ell) if instance else None
        if ell == 1:
            scale = 1.0
            s_in = ledger.code_sparsity
            target = Y
        else:
            scale = math.sqrt(ledger.s_col(ell - 1))
            s_in = ledger.s_col(ell - 1)
            target = scale * previous
        result = run_stage(report, name, target, A0, cfg, s_in, truth)
        if spec is not None:
            check_shape(name, result.dictionary, (spec.d(L), spec.r(ell)))

        stage = StageResult(
            index=ell, name=name, dictionary=result.dictionary, codes=result.codes,
            trace=result.trace, sparsity=s_in, scale=scale,
            error=dict_error(result.dictionary, truth) if truth is not None else None,
        )
        if ell == 1:
            report.codes = result.codes
        else:
            try:
                derived = column_normalize(unscale(result.codes, scale))
            except DegenerateAtomError as e:
                report.stages.append(stage)
                raise FactorizationAbort(f"阶段 {name} 的编码第 {e.column} 列为零，无法得到 A({ell - 1})",
                                         report) from e
            if spec is not None:
                check_shape(f"A({ell - 1})", derived, spec.dims[ell - 2])
            stage.derived_name = f"A({ell - 1})"
            stage.derived = derived
            if instance is not None:
                stage.derived_error = dict_error(derived, instance.dictionary(ell - 1))
        report.stages.append(stage)
        previous = result.dictionary
        logger.info(f"前向阶段 {name} 完成: 迭代 {len(result.trace)} 次"
                    + (f", err={stage.error:.3e}" if stage.error is not None else "")
                    + (f", {stage.derived_name} err={stage.derived_error:.3e}"
                       if stage.derived_error is not None else ""))
    return report
