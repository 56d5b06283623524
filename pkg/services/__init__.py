"""
服务模块，提供实验配置解析和实验编排
"""
