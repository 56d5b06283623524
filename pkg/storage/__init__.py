"""
存储模块，提供矩阵文件编解码和运行目录的读写
"""
