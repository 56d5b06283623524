"""
核心模块，提供稠密矩阵原语、支撑集类型和统一的异常体系
"""
