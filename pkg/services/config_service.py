"""
实验配置服务

配置文件是扁平的 KEY=value 文本，用 dotenv_values 读取；优先级从低到高为
内置默认值、进程环境变量（THREADS、LOG_LEVEL、OUT_DIR、SPARSE_CODER）、配置文件、命令行参数。
"""
import logging
import os
from dataclasses import asdict, dataclass, field, replace
from typing import Any, Callable, Dict, Mapping, Optional, Tuple

from dotenv import dotenv_values

from altmin.config import AltMinConfig
from core.errors import ConfigError, ParameterError
from deepfact.ledger import SIGMA_UNIT, SIGMA_WITH_CODE
from genmodel.laws import NonzeroLaw
from genmodel.sampling import alpha_for_snr
from genmodel.spec import DESK_SAMPLES, PAPER_SAMPLES, DeepModelSpec
from solvers.sparse_coder import SparseCoderConfig

logger = logging.getLogger(__name__)

MODES = ("forward", "backward", "both")
CODERS = ("bisection", "lars")

DESK_DIMS = ((60, 150), (40, 60))
PAPER_DIMS = ((200, 800), (100, 200))


def _strip(value: str) -> str:
    # 移除可能存在的注释部分
    return str(value).split('#')[0].strip()


def safe_get_int(env_name: str, default_value: int) -> int:
    """安全地从环境变量获取整数值，处理可能包含注释的情况"""
    value = _strip(os.getenv(env_name, str(default_value)))
    try:
        return int(value)
    except ValueError:
        return default_value


def _default_threads() -> int:
    return safe_get_int('THREADS', os.cpu_count() or 1)


def parse_dims(text: str) -> Tuple[Tuple[int, int], ...]:
    """'60x150,40x60' -> ((60, 150), (40, 60))，按 ℓ = 1..L 排列"""
    dims = []
    for part in _strip(text).split(","):
        d, _, r = part.strip().lower().partition("x")
        dims.append((int(d), int(r)))
    return tuple(dims)


def _int_tuple(text: str) -> Tuple[int, ...]:
    text = _strip(text)
    return tuple(int(x) for x in text.split(",") if x.strip()) if text else ()


def _float_tuple(text: str) -> Tuple[float, ...]:
    text = _strip(text)
    return tuple(float(x) for x in text.split(",") if x.strip()) if text else ()


def _optional_float(text: str) -> Optional[float]:
    text = _strip(text)
    return None if text.lower() in ("", "none", "auto") else float(text)


def _optional_str(text: str) -> Optional[str]:
    text = _strip(text)
    return text or None


def _bool(text: str) -> bool:
    text = _strip(text).lower()
    if text in ("1", "true", "yes", "on"):
        return True
    if text in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"无法解析的布尔值: {text}")


def _lower(text: str) -> str:
    return _strip(text).lower()


# 配置键 -> (字段名, 解析函数)
SCHEMA: Dict[str, Tuple[str, Callable[[str], Any]]] = {
    "DIMS": ("dims", parse_dims),
    "CODE_SPARSITY": ("code_sparsity", lambda v: int(_strip(v))),
    "COLUMN_SPARSITIES": ("column_sparsities", _int_tuple),
    "CODE_LAW": ("code_law", lambda v: NonzeroLaw.parse(_strip(v))),
    "DICT_LAW": ("dict_law", lambda v: NonzeroLaw.parse(_strip(v))),
    "N_SAMPLES": ("n_samples", lambda v: int(_strip(v))),
    "SEED": ("seed", lambda v: int(_strip(v))),
    "SEEDS": ("seeds", _int_tuple),
    "ALPHA": ("alpha", lambda v: float(_strip(v))),
    "SNR_GRID": ("snr_grid", _float_tuple),
    "MODE": ("mode", _lower),
    "EPS0": ("eps0", _optional_float),
    "RHO": ("rho", lambda v: float(_strip(v))),
    "T": ("T", lambda v: int(_strip(v))),
    "SWEEP_T": ("sweep_T", lambda v: int(_strip(v))),
    "THRESHOLD_CONST": ("threshold_const", lambda v: float(_strip(v))),
    "STOP_ERR": ("stop_err", lambda v: float(_strip(v))),
    "FIRST_THRESHOLD": ("first_threshold", lambda v: float(_strip(v))),
    "SPARSE_CODER": ("sparse_coder", _lower),
    "DEBIAS": ("debias", _bool),
    "THREADS": ("threads", lambda v: int(_strip(v))),
    "OUT_DIR": ("out_dir", _strip),
    "INSTANCE_DIR": ("instance_dir", _optional_str),
    "SIGMA_CONVENTION": ("sigma_convention", _lower),
    "TRIALS": ("trials", lambda v: int(_strip(v))),
    "R": ("r", lambda v: int(_strip(v))),
    "S": ("s", lambda v: int(_strip(v))),
    "RIP_ORDER": ("rip_order", lambda v: int(_strip(v))),
    "MATRIX_PATH": ("matrix_path", _optional_str),
    "DELTA": ("delta", lambda v: float(_strip(v))),
    "LOG_LEVEL": ("log_level", lambda v: _strip(v).upper()),
}

# 可以从进程环境变量（.env）读取默认值的键
ENV_KEYS = ("THREADS", "LOG_LEVEL", "OUT_DIR", "SPARSE_CODER")


@dataclass(frozen=True)
class ExperimentConfig:
    """
    一次命令运行所需的全部参数，构造时校验

    Attributes:
        dims: 各层字典形状，ℓ = 1..L
        code_sparsity / column_sparsities / code_law / dict_law: 生成模型参数
        n_samples: 样本数
        seed: 生成实例与单次运行的种子
        seeds: 扰动初始化的种子列表（恢复曲线与 SNR 扫描）
        alpha: 初始化扰动强度，缺省对应 6 dB
        snr_grid: SNR 扫描网格（dB）
        mode: 'forward'、'backward' 或 'both'
        eps0 ... debias: AltMinDict 参数
        sweep_T: SNR 扫描中每次运行的迭代数
        sparse_coder: 'bisection' 或 'lars'
        threads: 并行线程数
        out_dir: 输出目录
        instance_dir: 已生成实例的目录
        sigma_convention: 后向分解的缩放约定
        trials / r / s / rip_order / matrix_path / delta: 分析类命令参数
        log_level: 日志级别
        paper_scale: 是否使用完整规模的默认维度
    """
    dims: Tuple[Tuple[int, int], ...] = DESK_DIMS
    code_sparsity: int = 3
    column_sparsities: Tuple[int, ...] = (3,)
    code_law: NonzeroLaw = field(default_factory=lambda: NonzeroLaw.parse("uniform_shell:1:2"))
    dict_law: NonzeroLaw = field(default_factory=lambda: NonzeroLaw.parse("rademacher"))
    n_samples: int = DESK_SAMPLES
    seed: int = 0
    seeds: Tuple[int, ...] = (0, 1, 2)
    alpha: float = alpha_for_snr(6.0)
    snr_grid: Tuple[float, ...] = (-3.0, 0.0, 3.0, 6.0, 9.0)
    mode: str = "both"
    eps0: Optional[float] = None
    rho: float = 0.5
    T: int = 30
    sweep_T: int = 10
    threshold_const: float = 9.0
    stop_err: float = 1e-5
    first_threshold: float = 0.1
    sparse_coder: str = "bisection"
    debias: bool = False
    threads: int = 1
    out_dir: str = "runs"
    instance_dir: Optional[str] = None
    sigma_convention: str = SIGMA_UNIT
    trials: int = 1000
    r: int = 20
    s: int = 1
    rip_order: int = 2
    matrix_path: Optional[str] = None
    delta: float = 0.1
    log_level: str = "INFO"
    paper_scale: bool = False

    def __post_init__(self):
        if self.mode not in MODES:
            raise ConfigError(f"不支持的分解模式: {self.mode}，目前仅支持'forward'、'backward'和'both'")
        if self.sparse_coder not in CODERS:
            raise ConfigError(f"不支持的稀疏编码器类型: {self.sparse_coder}，目前仅支持'bisection'和'lars'")
        if self.sigma_convention not in (SIGMA_UNIT, SIGMA_WITH_CODE):
            raise ConfigError(f"不支持的缩放约定: {self.sigma_convention}，目前仅支持'unit'和'with_code'")
        if self.threads < 1:
            raise ConfigError(f"THREADS 必须至少为 1，实际为 {self.threads}")
        if self.n_samples < 1 or self.trials < 1:
            raise ConfigError("N_SAMPLES 与 TRIALS 必须为正")
        if not self.seeds:
            raise ConfigError("SEEDS 不能为空")
        if not self.snr_grid:
            raise ConfigError("SNR_GRID 不能为空")
        if self.alpha <= 0:
            raise ConfigError(f"ALPHA 必须为正，实际为 {self.alpha}")
        if not 0 < self.delta < 1:
            raise ConfigError(f"DELTA 必须位于 (0, 1)，实际为 {self.delta}")
        if self.sweep_T < 1:
            raise ConfigError(f"SWEEP_T 必须至少为 1，实际为 {self.sweep_T}")
        # 模型结构与算法参数的一致性在任何计算之前检查
        self.model_spec()
        self.altmin_config()

    def modes(self) -> Tuple[str, ...]:
        return ("forward", "backward") if self.mode == "both" else (self.mode,)

    def model_spec(self) -> DeepModelSpec:
        try:
            return DeepModelSpec(dims=self.dims, code_sparsity=self.code_sparsity,
                                 column_sparsities=self.column_sparsities,
                                 dict_law=self.dict_law, code_law=self.code_law)
        except ParameterError as e:
            raise ConfigError(f"模型参数无效: {e}") from e

    def altmin_config(self, T: Optional[int] = None) -> AltMinConfig:
        try:
            coder = SparseCoderConfig(coder=self.sparse_coder, n_jobs=self.threads)
            return AltMinConfig(eps0=self.eps0, rho=self.rho, T=self.T if T is None else T,
                                threshold_const=self.threshold_const, stop_err=self.stop_err,
                                first_threshold=self.first_threshold, debias=self.debias,
                                coder=coder)
        except ParameterError as e:
            raise ConfigError(f"交替最小化参数无效: {e}") from e

    def to_dict(self) -> Dict[str, Any]:
        data = asdict(self)
        data["dims"] = [list(dr) for dr in self.dims]
        data["code_law"] = self.code_law.describe()
        data["dict_law"] = self.dict_law.describe()
        return data


def _parse_values(values: Mapping[str, Optional[str]], source: str) -> Dict[str, Any]:
    parsed = {}
    for key, raw in values.items():
        if key not in SCHEMA:
            raise ConfigError(f"{source} 中存在未知配置键: {key}")
        if raw is None:
            raise ConfigError(f"{source} 中的配置键 {key} 缺少取值")
        name, parser = SCHEMA[key]
        try:
            parsed[name] = parser(raw)
        except (ValueError, ParameterError) as e:
            raise ConfigError(f"{source} 中 {key}={raw!r} 无法解析: {e}") from e
    return parsed


def load_config(path: Optional[str] = None, overrides: Optional[Mapping[str, Any]] = None,
                paper_scale: bool = False) -> ExperimentConfig:
    """
    加载实验配置

    Args:
        path: 配置文件路径，可选
        overrides: 命令行给出的覆盖值，键为 ExperimentConfig 字段名，None 值被忽略
        paper_scale: 使用完整规模的默认维度与样本数

    Returns:
        ExperimentConfig

    Raises:
        ConfigError: 文件不存在、未知键、无法解析的值或参数不一致
    """
    fields: Dict[str, Any] = {"threads": _default_threads()}
    if paper_scale:
        fields.update(dims=PAPER_DIMS, n_samples=PAPER_SAMPLES, paper_scale=True)

    env = {key: os.environ[key] for key in ENV_KEYS if key in os.environ}
    env.pop("THREADS", None)
    fields.update(_parse_values(env, "环境变量"))

    if path is not None:
        if not os.path.isfile(path):
            raise ConfigError(f"配置文件不存在: {path}")
        fields.update(_parse_values(dotenv_values(path), path))
        logger.debug(f"已读取配置文件 {path}")

    fields.update({k: v for k, v in (overrides or {}).items() if v is not None})
    return ExperimentConfig(**fields)


def with_overrides(cfg: ExperimentConfig, **changes: Any) -> ExperimentConfig:
    """在已有配置上覆盖部分字段，None 值被忽略"""
    return replace(cfg, **{k: v for k, v in changes.items() if v is not None})
