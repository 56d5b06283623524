"""
深度字典分解：前向与后向分解、稀疏度记账、假设审计
"""
