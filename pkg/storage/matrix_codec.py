"""
DS2PMAT1 矩阵文件格式

布局：8 字节魔数 b"DS2PMAT1"，小端 u64 行数，小端 u64 列数，随后按行主序
存放 rows·cols 个小端 f64。
"""
import numpy as np

from core.errors import MatrixFormatError
from core.types import Matrix, as_matrix

MAGIC = b"DS2PMAT1"
HEADER_SIZE = len(MAGIC) + 16


def encode_matrix(M: Matrix) -> bytes:
    """把矩阵编码为 DS2PMAT1 字节串"""
    M = as_matrix(M, "matrix")
    header = np.array(M.shape, dtype="<u8").tobytes()
    body = np.ascontiguousarray(M, dtype="<f8").tobytes(order="C")
    return MAGIC + header + body


def decode_matrix(data: bytes) -> Matrix:
    """
    解码 DS2PMAT1 字节串

    Raises:
        MatrixFormatError: 魔数不符、头部残缺或数据长度与形状不一致
    """
    if len(data) < HEADER_SIZE:
        raise MatrixFormatError(f"文件过短 ({len(data)} 字节)，缺少 DS2PMAT1 头部")
    if data[:len(MAGIC)] != MAGIC:
        raise MatrixFormatError(f"魔数不符: {data[:len(MAGIC)]!r}")
    rows, cols = (int(v) for v in np.frombuffer(data, dtype="<u8", count=2, offset=len(MAGIC)))
    expected = HEADER_SIZE + rows * cols * 8
    if len(data) != expected:
        raise MatrixFormatError(f"数据长度 {len(data)} 与形状 {rows}x{cols} 要求的 {expected} 不一致")
    values = np.frombuffer(data, dtype="<f8", offset=HEADER_SIZE)
    return values.reshape(rows, cols).astype(np.float64)
