"""
运行目录的读写：模型实例、分解报告、审计报告和迭代轨迹
"""
import logging
import re
from typing import Any, Dict, List

from altmin.trace import TRACE_COLUMNS
from core.errors import MatrixFormatError
from deepfact.report import FactorizationReport
from genmodel.spec import DeepModelSpec
from genmodel.synthesis import DeepModelInstance
from storage.local_storage import LocalStorage

logger = logging.getLogger(__name__)

MANIFEST = "manifest.json"
REPORT = "report.json"


def stage_file_name(name: str) -> str:
    """把 'A(1->2)' 这样的阶段名转成文件名 'A_1-2'"""
    return re.sub(r"[^0-9A-Za-z_-]", "", name.replace("->", "-").replace("(", "_"))


def save_instance(storage: LocalStorage, instance: DeepModelInstance) -> Dict[str, Any]:
    """
    把 DeepModelInstance 写成目录：每个矩阵一个 DS2PMAT1 文件，外加 manifest.json

    Returns:
        写入的 manifest
    """
    for name, M in instance.named_matrices().items():
        storage.save_matrix(name, M)
    manifest = instance.manifest()
    storage.save_json(MANIFEST, manifest)
    logger.info(f"模型实例已写入 {storage.storage_path}（{len(manifest['matrices'])} 个矩阵）")
    return manifest


def load_instance(path: str) -> DeepModelInstance:
    """
    从目录读回 DeepModelInstance

    Raises:
        FileNotFoundError: 目录或其中的文件不存在
        MatrixFormatError: 矩阵文件损坏或形状与 manifest 不符
    """
    storage = LocalStorage(path, create=False)
    manifest = storage.load_json(MANIFEST)
    spec = DeepModelSpec.from_dict(manifest["spec"])
    matrices = {}
    for name, shape in manifest["matrices"].items():
        M = storage.load_matrix(name)
        if list(M.shape) != list(shape):
            raise MatrixFormatError(f"{name} 的形状 {M.shape} 与 manifest 记录的 {shape} 不符")
        matrices[name] = M
    L = spec.L
    return DeepModelInstance(
        spec=spec,
        dicts=[matrices[f"A{ell}"] for ell in range(1, L + 1)],
        codes=matrices["X"],
        intermediates=[matrices[f"Y{ell}"] for ell in range(1, L)],
        observations=matrices["Y"],
        seed=int(manifest["seed"]),
    )


def save_factorization(storage: LocalStorage, report: FactorizationReport) -> List[str]:
    """
    写出分解报告：report.json、每个恢复出的字典和各阶段的迭代轨迹 CSV

    部分报告（阶段中途失败）同样可以写出。

    Returns:
        写入的条目名称
    """
    written = []
    for name, M in report.recovered().items():
        file_name = stage_file_name(name)
        storage.save_matrix(file_name, M)
        written.append(file_name)
    if report.codes is not None:
        storage.save_matrix("X_hat", report.codes)
        written.append("X_hat")
    for stage in report.stages:
        trace_name = f"trace_{stage_file_name(stage.name)}.csv"
        storage.save_csv(trace_name, TRACE_COLUMNS, stage.trace.rows())
        written.append(trace_name)
    storage.save_json(REPORT, report.to_dict())
    written.append(REPORT)
    logger.info(f"{report.mode} 分解报告已写入 {storage.storage_path}")
    return written
