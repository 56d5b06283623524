"""
交替最小化字典学习 AltMinDict 及其精度调度、误差度量和迭代轨迹
"""
