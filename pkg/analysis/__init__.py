"""
随机矩阵理论与采样复杂度的经验检验
"""
