"""
实验编排：初始化扰动、前向/后向恢复、SNR 扫描和恢复曲线

命令行各子命令共享这里的流程，库函数本身不做任何文件读写以外的副作用。
"""
import logging
import math
from typing import Any, Dict, List, Sequence, Tuple

from altmin.config import AltMinConfig
from core.errors import FactorizationAbort, ParameterError
from core.types import Matrix
from deepfact.backward import backward_factorize
from deepfact.forward import forward_factorize
from deepfact.ledger import sparsity_levels
from deepfact.report import BACKWARD, FORWARD, FactorizationReport
from genmodel.rng import stream
from genmodel.sampling import alpha_for_snr, perturb_dictionary, snr_db
from genmodel.synthesis import DeepModelInstance

logger = logging.getLogger(__name__)

SWEEP_COLUMNS = ["snr_db", "algo", "stage", "final_err", "seed"]
CURVE_COLUMNS = ["seed", "algo", "stage", "iter", "eps_t", "err"]


def stage_names(mode: str, L: int) -> List[str]:
    """某一模式下报告中出现的全部字典名，顺序与 FactorizationReport.errors() 一致"""
    if mode == FORWARD:
        names = [f"A(1->{L})"]
        for ell in range(2, L + 1):
            names += [f"A({ell}->{L})", f"A({ell - 1})"]
        return names
    if mode == BACKWARD:
        return [f"A({ell})" for ell in range(L, 0, -1)]
    raise ParameterError(f"不支持的分解模式: {mode}，目前仅支持'forward'和'backward'")


def make_inits(instance: DeepModelInstance, mode: str, alpha: float,
               seed: int) -> Tuple[List[Matrix], float]:
    """
    生成扰动初始化

    前向模式扰动乘积字典 A⁽ℓ→L⁾（ℓ = 1..L），使用流 stream(seed, 'perturb', ℓ)；
    后向模式按执行顺序 ℓ = L..1 扰动 A⁽ℓ⁾，使用流 stream(seed, 'perturb_layer', ℓ)。

    Returns:
        (初始字典列表, SNR dB)
    """
    L = instance.L
    if mode == FORWARD:
        inits = [perturb_dictionary(instance.product(ell), alpha, stream(seed, "perturb", ell))[0]
                 for ell in range(1, L + 1)]
    elif mode == BACKWARD:
        inits = [perturb_dictionary(instance.dictionary(ell), alpha, stream(seed, "perturb_layer", ell))[0]
                 for ell in range(L, 0, -1)]
    else:
        raise ParameterError(f"不支持的分解模式: {mode}，目前仅支持'forward'和'backward'")
    return inits, snr_db(alpha)


def run_factorization(instance: DeepModelInstance, mode: str, cfg: AltMinConfig, alpha: float,
                      seed: int, sigma_convention: str = "unit") -> FactorizationReport:
    """
    在给定实例上运行一次前向或后向分解

    Raises:
        FactorizationAbort: 某阶段失败，携带部分报告
    """
    inits, snr = make_inits(instance, mode, alpha, seed)
    ledger = sparsity_levels(instance.spec, sigma_convention)
    logger.info(f"开始 {mode} 分解: seed={seed}, 初始化 SNR={snr:.2f} dB")
    if mode == FORWARD:
        report = forward_factorize(instance.observations, inits, ledger, cfg, instance=instance)
    else:
        report = backward_factorize(instance.observations, inits, ledger, cfg, instance=instance)
    report.config["init_seed"] = seed
    report.config["snr_db"] = snr
    return report


def snr_sweep(instance: DeepModelInstance, cfg: AltMinConfig, snr_grid: Sequence[float],
              seeds: Sequence[int], modes: Sequence[str] = (FORWARD, BACKWARD),
              sigma_convention: str = "unit") -> List[Dict[str, Any]]:
    """
    对每个 SNR、每个种子和每种算法运行一次分解，收集各字典的最终误差

    某次运行中途失败时记录警告，已完成阶段照常输出，未完成阶段的 final_err 为 nan，
    因此行数恒为 |grid|·|seeds|·Σ|stages|。

    Returns:
        以 SWEEP_COLUMNS 为键的行
    """
    rows: List[Dict[str, Any]] = []
    for snr in snr_grid:
        alpha = alpha_for_snr(snr)
        for seed in seeds:
            for mode in modes:
                try:
                    errors = run_factorization(instance, mode, cfg, alpha, seed,
                                               sigma_convention).errors()
                except FactorizationAbort as e:
                    logger.warning(f"SNR={snr:g} dB, seed={seed}, {mode} 分解中止: {e}")
                    errors = e.partial_report.errors()
                for name in stage_names(mode, instance.L):
                    rows.append({"snr_db": snr, "algo": mode, "stage": name,
                                 "final_err": errors.get(name, math.nan), "seed": seed})
    return rows


def recovery_curves(reports: Sequence[FactorizationReport]) -> List[Dict[str, Any]]:
    """把各报告的逐次迭代误差展开为曲线行（以 CURVE_COLUMNS 为键）"""
    rows: List[Dict[str, Any]] = []
    for report in reports:
        seed = report.config.get("init_seed")
        for stage in report.stages:
            for t, (eps, err) in enumerate(zip(stage.trace.eps, stage.trace.err)):
                rows.append({"seed": seed, "algo": report.mode, "stage": stage.name, "iter": t,
                             "eps_t": eps, "err": "" if err is None else err})
    return rows


def summarize_errors(report: FactorizationReport) -> str:
    """一行文字的误差摘要"""
    parts = [f"{name}: {err:.3e}" for name, err in report.errors().items()]
    return f"[{report.mode}] " + (", ".join(parts) if parts else "无误差记录")


def sweep_summary(rows: Sequence[Dict[str, Any]]) -> Dict[Tuple[str, str, float], float]:
    """(algo, stage, snr) -> 各种子最终误差的均值，忽略 nan"""
    buckets: Dict[Tuple[str, str, float], List[float]] = {}
    for row in rows:
        value = float(row["final_err"])
        if not math.isnan(value):
            buckets.setdefault((row["algo"], row["stage"], float(row["snr_db"])), []).append(value)
    return {key: sum(vals) / len(vals) for key, vals in buckets.items()}

