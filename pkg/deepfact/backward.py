"""
后向分解：从最靠近观测的 A⁽ᴸ⁾ 开始逐层剥离

阶段 ℓ（ℓ = L..1）在 σ_(0→ℓ−1)·Ŷ⁽ℓ⁾ 上以稀疏度 s_{Y⁽ℓ−1⁾} 运行 AltMinDict，
得到 Â⁽ℓ⁾，编码除以 σ_(0→ℓ−1) 即为下一阶段的观测 Ŷ⁽ℓ−1⁾；Ŷ⁽⁰⁾ = X̂。
"""
import logging
from typing import Optional, Sequence

from altmin.config import AltMinConfig
from altmin.metrics import dict_error
from core.errors import ParameterError
from core.types import Matrix, as_matrix
from deepfact.ledger import SparsityLedger
from deepfact.report import BACKWARD, FactorizationReport, StageResult
from deepfact.stages import check_inits, check_shape, new_report, run_stage, unscale
from genmodel.synthesis import DeepModelInstance

logger = logging.getLogger(__name__)


def backward_factorize(Y: Matrix, inits: Sequence[Matrix], ledger: SparsityLedger,
                       cfg: AltMinConfig, instance: Optional[DeepModelInstance] = None,
                       last_stage: int = 1) -> FactorizationReport:
    """
    后向分解

    Args:
        Y: 观测矩阵
        inits: 按执行顺序给出的 A⁽ᴸ⁾(0), A⁽ᴸ⁻¹⁾(0), ..., A⁽ℓ̄⁾(0)
        ledger: 稀疏度记账
        cfg: AltMinDict 参数
        instance: 可选的生成实例，提供真值误差与形状检查
        last_stage: 最后一个阶段 ℓ̄，缺省为 1（恢复全部字典）

    Returns:
        FactorizationReport；所有阶段完成时 codes 为 X̂

    Raises:
        FactorizationAbort: 某阶段失败，异常携带已完成阶段的报告
    """
    Y = as_matrix(Y, "Y")
    L = ledger.L
    if not 1 <= last_stage <= L:
        raise ParameterError(f"last_stage={last_stage} 必须位于 [1, {L}]")
    check_inits(inits, L - last_stage + 1)

    report = new_report(BACKWARD, L, cfg, instance.seed if instance else None, ledger.to_dict())
    spec = instance.spec if instance else None

    target = Y
    for k, ell in enumerate(range(L, last_stage - 1, -1)):
        name = f"A({ell})"
        sigma = ledger.sigma[ell - 1]
        s_in = ledger.s_Y[ell - 1]
        truth = instance.dictionary(ell) if instance else None
        A0 = as_matrix(inits[k], f"{name}(0)")
        result = run_stage(report, name, sigma * target, A0, cfg, s_in, truth)
        if spec is not None:
            check_shape(name, result.dictionary, spec.dims[ell - 1])
        stage = StageResult(
            index=ell, name=name, dictionary=result.dictionary, codes=result.codes,
            trace=result.trace, sparsity=s_in, scale=sigma,
            error=dict_error(result.dictionary, truth) if truth is not None else None,
        )
        report.stages.append(stage)
        target = unscale(result.codes, sigma)
        logger.info(f"后向阶段 {name} 完成: 迭代 {len(result.trace)} 次"
                    + (f", err={stage.error:.3e}" if stage.error is not None else ""))
    if last_stage == 1:
        report.codes = target
    return report
