"""
LASSO 求解器工厂，按名称创建 ISTA/FISTA 实例
"""
from solvers.base_solver import BaseLassoSolver
from solvers.fista_solver import FistaSolver
from solvers.ista_solver import IstaSolver


class LassoSolverFactory:
    """LASSO 求解器工厂类"""

    @staticmethod
    def get_solver(solver_type: str) -> BaseLassoSolver:
        """
        根据类型获取求解器实例

        Args:
            solver_type: 'ista' 或 'fista'

        Returns:
            求解器实例

        Raises:
            ValueError: 不支持的求解器类型
        """
        kind = solver_type.lower()
        if kind == 'ista':
            return IstaSolver()
        if kind == 'fista':
            return FistaSolver()
        raise ValueError(f"不支持的求解器类型: {solver_type}，目前仅支持'ista'和'fista'")
