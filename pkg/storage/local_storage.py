"""
本地文件系统存储实现

写入先落到同目录的临时文件再 os.replace，读者不会看到写了一半的文件。
"""
import csv
import io
import json
import logging
import os
import tempfile
from typing import Any, Dict, List, Optional, Sequence

from core.types import Matrix
from storage.base_storage import BaseStorage
from storage.matrix_codec import decode_matrix, encode_matrix

logger = logging.getLogger(__name__)

TEMP_SUFFIX = ".partial"
MATRIX_SUFFIX = ".ds2p"


class LocalStorage(BaseStorage):
    """以一个目录为根的本地存储"""

    def __init__(self, storage_path: str, create: bool = True):
        """
        初始化本地存储

        Args:
            storage_path: 根目录
            create: 目录不存在时是否创建；为 False 且目录不存在时抛出 FileNotFoundError
        """
        self.storage_path = storage_path
        if create:
            os.makedirs(self.storage_path, exist_ok=True)
        elif not os.path.isdir(self.storage_path):
            raise FileNotFoundError(f"目录不存在: {self.storage_path}")

    def _path(self, name: str) -> str:
        return os.path.join(self.storage_path, name)

    def save(self, name: str, content: bytes) -> str:
        path = self._path(name)
        directory = os.path.dirname(path)
        os.makedirs(directory, exist_ok=True)
        fd, temp_path = tempfile.mkstemp(dir=directory, prefix=".", suffix=TEMP_SUFFIX)
        try:
            with os.fdopen(fd, "wb") as f:
                f.write(content)
            os.replace(temp_path, path)
        except BaseException:
            if os.path.exists(temp_path):
                os.remove(temp_path)
            raise
        logger.debug(f"已写入 {path} ({len(content)} 字节)")
        return path

    def get(self, name: str) -> Optional[bytes]:
        path = self._path(name)
        if not os.path.isfile(path):
            return None
        with open(path, "rb") as f:
            return f.read()

    def delete(self, name: str) -> bool:
        path = self._path(name)
        if not os.path.isfile(path):
            return False
        os.remove(path)
        return True

    def cleanup_stale(self) -> int:
        count = 0
        for root, _, files in os.walk(self.storage_path):
            for filename in files:
                if filename.endswith(TEMP_SUFFIX):
                    os.remove(os.path.join(root, filename))
                    count += 1
        if count:
            logger.info(f"清理了 {count} 个残留的临时文件")
        return count

    def get_all_names(self) -> List[str]:
        names = []
        for root, _, files in os.walk(self.storage_path):
            for filename in files:
                if not filename.endswith(TEMP_SUFFIX):
                    names.append(os.path.relpath(os.path.join(root, filename), self.storage_path))
        return sorted(names)

    def exists(self, name: str) -> bool:
        return os.path.isfile(self._path(name))

    # 以下为各类内容的便捷读写

    def save_matrix(self, name: str, M: Matrix) -> str:
        return self.save(name + MATRIX_SUFFIX, encode_matrix(M))

    def load_matrix(self, name: str) -> Matrix:
        data = self.get(name + MATRIX_SUFFIX)
        if data is None:
            raise FileNotFoundError(f"矩阵文件不存在: {self._path(name + MATRIX_SUFFIX)}")
        return decode_matrix(data)

    def save_json(self, name: str, document: Dict[str, Any]) -> str:
        text = json.dumps(document, ensure_ascii=False, indent=2, sort_keys=True)
        return self.save(name, (text + "\n").encode("utf-8"))

    def load_json(self, name: str) -> Dict[str, Any]:
        data = self.get(name)
        if data is None:
            raise FileNotFoundError(f"文件不存在: {self._path(name)}")
        return json.loads(data.decode("utf-8"))

    def save_csv(self, name: str, fieldnames: Sequence[str], rows: Sequence[Dict[str, Any]]) -> str:
        buffer = io.StringIO()
        writer = csv.DictWriter(buffer, fieldnames=list(fieldnames), extrasaction="ignore",
                                lineterminator="\n")
        writer.writeheader()
        writer.writerows(rows)
        return self.save(name, buffer.getvalue().encode("utf-8"))
