"""
存储服务抽象基类
"""
from abc import ABC, abstractmethod
from typing import List, Optional


class BaseStorage(ABC):
    """存储服务抽象基类，条目按相对名称寻址"""

    @abstractmethod
    def save(self, name: str, content: bytes) -> str:
        """
        原子地写入一个条目

        Args:
            name: 条目名称（相对路径）
            content: 二进制内容

        Returns:
            写入位置
        """
        pass

    @abstractmethod
    def get(self, name: str) -> Optional[bytes]:
        """
        读取条目

        Args:
            name: 条目名称

        Returns:
            二进制内容，不存在时返回 None
        """
        pass

    @abstractmethod
    def delete(self, name: str) -> bool:
        """
        删除条目

        Returns:
            删除是否成功
        """
        pass

    @abstractmethod
    def cleanup_stale(self) -> int:
        """
        清理中断写入遗留的临时文件

        Returns:
            清理的文件数量
        """
        pass

    @abstractmethod
    def get_all_names(self) -> List[str]:
        """
        获取所有条目名称

        Returns:
            名称列表（排序后）
        """
        pass
