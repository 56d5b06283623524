"""
求解器模块，提供软阈值、ISTA/FISTA、约束稀疏编码和 ML-FISTA
"""
