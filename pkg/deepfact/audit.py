"""
前向（A 系列）与后向（B 系列）分解所需假设的可检验审计

未知的通用常数取 1，对应记录标记 constant_free。只有给出阈值的
RIP 类假设才判定通过与否，否则只报告测量值。审计总能完成，不抛出计算异常。
"""
import logging
import math
from dataclasses import asdict, dataclass, field
from typing import Any, Dict, List, Mapping, Optional, Sequence

import numpy as np

from altmin.metrics import init_distance
from altmin.schedule import paper_accuracy_parameters
from analysis.complexity import complexity_expressions
from analysis.rip import rip_constant_estimate
from core.linalg import min_singular_value, spectral_norm
from core.types import Matrix
from deepfact.ledger import SparsityLedger, sparsity_levels
from deepfact.report import BACKWARD, FORWARD
from genmodel.sampling import indicator_matrix
from genmodel.synthesis import DeepModelInstance

logger = logging.getLogger(__name__)

# 浮点比较时给上界留的相对余量
_SLACK = 1e-12


@dataclass(frozen=True)
class AssumptionRecord:
    """
    Attributes:
        name: 假设编号与层号，如 'A1[2]'、'B2c[1]'
        measured: 测量值
        threshold: 比较阈值；无阈值时为 None
        passed: 是否满足；无法判定时为 None
        constant_free: 阈值中是否省略了未知常数
        note: 说明
    """
    name: str
    measured: float
    threshold: Optional[float]
    passed: Optional[bool]
    constant_free: bool = False
    note: str = ""

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)


@dataclass
class AuditReport:
    mode: str
    records: List[AssumptionRecord] = field(default_factory=list)

    def add(self, record: AssumptionRecord) -> None:
        self.records.append(record)
        if record.passed is False:
            logger.warning(f"假设 {record.name} 不满足: 测量值 {record.measured:.4g}，阈值 {record.threshold}")

    def failed(self) -> List[str]:
        return [rec.name for rec in self.records if rec.passed is False]

    def get(self, name: str) -> AssumptionRecord:
        for rec in self.records:
            if rec.name == name:
                return rec
        raise KeyError(name)

    def to_dict(self) -> Dict[str, Any]:
        return {"mode": self.mode, "failed": self.failed(),
                "records": [rec.to_dict() for rec in self.records]}


def _at_most(name: str, measured: float, bound: float, constant_free: bool,
             note: str = "") -> AssumptionRecord:
    return AssumptionRecord(name, float(measured), float(bound),
                            bool(measured <= bound * (1 + _SLACK)), constant_free, note)


def _at_least(name: str, measured: float, bound: float, constant_free: bool,
              note: str = "") -> AssumptionRecord:
    return AssumptionRecord(name, float(measured), float(bound),
                            bool(measured >= bound * (1 - _SLACK)), constant_free, note)


def _rip_record(name: str, A: Matrix, order: int, targets: Mapping[str, float],
                trials: int, seed: int) -> AssumptionRecord:
    order = min(order, A.shape[1])
    est = rip_constant_estimate(A, order, trials, seed=seed)
    label = "穷举" if est.exhaustive else f"{est.trials} 次采样的下界"
    threshold = targets.get(name)
    passed = None if threshold is None else bool(est.delta_hat < threshold)
    return AssumptionRecord(name, est.delta_hat, threshold, passed, False,
                            f"δ_{order} 估计（{label}）")


def _nonzero_law_records(report: AuditReport, prefix: str, X: Matrix, M0: float,
                         require_zero_mean: bool) -> None:
    nz = X[X != 0]
    report.add(_at_most(f"{prefix}-bound", float(np.abs(nz).max()), M0, False, "max|X_ij| ≤ M_(0)"))
    second = float(np.mean(nz * nz))
    report.add(AssumptionRecord(f"{prefix}-variance", second, 1.0, bool(abs(second - 1.0) <= 0.1),
                                False, "非零元二阶矩应为 1（容差 10%）"))
    if require_zero_mean:
        mean = float(nz.mean())
        se = float(nz.std(ddof=1) / math.sqrt(nz.size)) if nz.size > 1 else 0.0
        report.add(AssumptionRecord(f"{prefix}-mean", mean, 0.0, bool(abs(mean) <= 3 * se + 1e-12),
                                    False, "非零元均值应为 0（3 倍标准误）"))


def measured_intermediate_bounds(instance: DeepModelInstance, ledger: SparsityLedger) -> List[float]:
    """M_Y(ℓ) = max|σ_(0→ℓ)·Y⁽ℓ⁾_ij|，ℓ = 0..L−1；Y⁽⁰⁾ = X"""
    return [float(np.abs(ledger.sigma[ell] * instance.layer_output(ell)).max())
            for ell in range(instance.L)]


def audit_assumptions_forward(instance: DeepModelInstance,
                              delta_targets: Optional[Mapping[str, float]] = None,
                              inits: Optional[Sequence[Matrix]] = None, delta: float = 0.1,
                              mu: float = 1.0, rip_trials: int = 200,
                              seed: int = 0) -> AuditReport:
    """
    审计 A1–A7

    Args:
        instance: 生成的模型实例
        delta_targets: RIP 阈值，键为记录名（如 'A1[1]'）；缺省不判定
        inits: 可选的 A⁽ℓ→L⁾(0)，提供时检查 A6
        delta: 样本复杂度中的失败概率
        mu: 谱条件中的常数 μ
        rip_trials: RIP 采样次数
        seed: RIP 采样种子

    Returns:
        AuditReport
    """
    targets = dict(delta_targets or {})
    spec = instance.spec
    L = spec.L
    M = spec.amplitudes()
    d_L = spec.d(L)
    report = AuditReport(FORWARD)

    for ell in range(1, L + 1):
        P = instance.product(ell)
        s_prev = spec.s_col(ell - 1)
        report.add(_rip_record(f"A1[{ell}]", P, 2 * s_prev, targets, rip_trials, seed))
        report.add(_at_most(f"A2[{ell}]", spectral_norm(P), mu * math.sqrt(spec.r(ell) / d_L), True,
                            "‖A(ℓ→L)‖₂ ≤ μ√(r_ℓ/d_L)"))

    _nonzero_law_records(report, "A3a", instance.codes, M[0], False)
    for ell in range(1, L):
        A = instance.dictionary(ell)
        report.add(_at_most(f"A3b[{ell}]", float(np.abs(math.sqrt(spec.s_col(ell)) * A).max()), M[ell],
                            False, "max|√s_(ℓ)·A(ℓ)_ij| ≤ M_(ℓ)"))

    for ell in range(0, L):
        bound = d_L ** (1.0 / 6.0) / mu ** (1.0 / 3.0)
        report.add(_at_most(f"A4[{ell}]", spec.s_col(ell), bound, True, "s_(ℓ) ≤ d_L^(1/6)/(c₂μ^(1/3))，c₂ = 1"))

    for row in complexity_expressions(spec, delta, n=instance.n):
        if row.name == "A5a":
            report.add(AssumptionRecord("A5a", float(instance.n), row.value, row.passed, True, row.note))
        elif row.name == "A5b":
            report.add(AssumptionRecord(f"A5b[{row.layer}]", float(row.compare_to), row.value,
                                        row.passed, True))

    if inits is not None:
        for ell, A0 in enumerate(inits, start=1):
            radius = 1.0 / (2592.0 * spec.s_col(ell - 1) ** 2)
            report.add(_at_most(f"A6[{ell}]", init_distance(A0, instance.product(ell)), radius, False,
                                "初始化半径"))

    for ell in range(1, L + 1):
        params = paper_accuracy_parameters(spec.s_col(ell - 1), mu, d_L)
        report.add(AssumptionRecord(f"A7[{ell}]", params.ratio, 1.0, params.decreasing, True,
                                    f"ε₀ = {params.eps0:.6g}，递推比需小于 1"))
    return report


def audit_assumptions_backward(instance: DeepModelInstance,
                               delta_targets: Optional[Mapping[str, float]] = None,
                               inits: Optional[Sequence[Matrix]] = None, delta: float = 0.1,
                               mu: float = 1.0, mu_tilde: float = 1.0, rip_trials: int = 200,
                               seed: int = 0, sigma_convention: str = "unit") -> AuditReport:
    """
    审计 B1–B7；inits 按 ℓ = L..1 的执行顺序给出
    """
    targets = dict(delta_targets or {})
    spec = instance.spec
    L = spec.L
    M = spec.amplitudes()
    ledger = sparsity_levels(spec, sigma_convention)
    report = AuditReport(BACKWARD)

    for ell in range(1, L + 1):
        A = instance.dictionary(ell)
        d, r = spec.dims[ell - 1]
        report.add(_rip_record(f"B1[{ell}]", A, 2 * ledger.s_Y[ell - 1], targets, rip_trials, seed))
        report.add(_at_most(f"B2a[{ell}]", spectral_norm(A), mu * math.sqrt(r / d), True,
                            "‖A(ℓ)‖₂ ≤ μ√(r_ℓ/d_ℓ)"))

    for ell in range(1, L):
        A = instance.dictionary(ell)
        d, r = spec.dims[ell - 1]
        smin = min_singular_value(A.T)
        report.add(_at_least(f"B2b[{ell}]", smin.value, mu_tilde * math.sqrt(r / d), True,
                             "σ_min(A(ℓ)ᵀ) ≥ μ̃√(r_ℓ/d_ℓ)"))
        U = indicator_matrix(A)
        s_ell = spec.s_col(ell)
        r_next = spec.r(ell + 1)
        bound = 2.0 * math.sqrt(s_ell ** 2 * r / r_next)
        alt = 2.0 * math.sqrt(s_ell ** 2 * r_next / r)
        report.add(_at_most(f"B2c[{ell}]", spectral_norm(U), bound, False,
                            f"‖U(ℓ)‖₂ ≤ 2√(s_(ℓ)²r_ℓ/r_(ℓ+1))；交换 r 的写法给出 {alt:.4g}"))

    _nonzero_law_records(report, "B3", instance.codes, M[0], True)

    d1 = spec.d(1)
    report.add(_at_most("B4[0]", spec.code_sparsity, d1 ** (1.0 / 6.0) / mu ** (1.0 / 3.0), True,
                        "s ≤ d_1^(1/6)/(c₂μ^(1/3))，c₂ = 1"))
    for ell in range(1, L):
        bound = spec.d(ell + 1) ** (1.0 / 6.0) / mu ** (1.0 / 3.0)
        report.add(_at_most(f"B4[{ell}]", ledger.s_Y[ell], bound, True,
                            "s_Y(ℓ) ≤ d_(ℓ+1)^(1/6)/(c₂μ^(1/3))；小维度下难以满足"))

    m_y = measured_intermediate_bounds(instance, ledger)
    for row in complexity_expressions(spec, delta, n=instance.n, intermediate_bounds=m_y):
        if row.name == "B5":
            report.add(AssumptionRecord(f"B5[{row.layer}]", float(instance.n), row.value, row.passed,
                                        True, f"M_Y = {m_y[row.layer - 1]:.4g}（实测）"))

    if inits is not None:
        for k, A0 in enumerate(inits):
            ell = L - k
            radius = 1.0 / (2592.0 * ledger.s_Y[ell - 1] ** 2)
            report.add(_at_most(f"B6[{ell}]", init_distance(A0, instance.dictionary(ell)), radius, False,
                                "初始化半径"))

    for ell in range(1, L + 1):
        params = paper_accuracy_parameters(ledger.s_Y[ell - 1], mu, spec.d(ell))
        report.add(AssumptionRecord(f"B7[{ell}]", params.ratio, 1.0, params.decreasing, True,
                                    f"ε₀ = {params.eps0:.6g}，递推比需小于 1"))
    return report
