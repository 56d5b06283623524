"""
生成模型模块：深度稀疏生成模型与列稀疏随机字典的采样
"""
