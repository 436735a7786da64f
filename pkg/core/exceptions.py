"""
求解器统一异常体系

所有模块抛出的业务异常都继承自 FracHeatError，命令行入口据此映射退出码。
"""


class FracHeatError(Exception):
    """求解器异常基类"""

    def __init__(self, message=""):
        super().__init__(message)
        self.message = message

    def __str__(self):
        return self.message


class ParameterError(FracHeatError):
    """参数不合法（例如 alpha 不在 (0, 1] 内）"""


class DomainError(FracHeatError, ValueError):
    """自变量超出定义域"""


class AlphaSingular(FracHeatError):
    """alpha 过于接近 1，无法除以 (1 - alpha)"""

    def __init__(self, alpha, tol):
        super().__init__(f"alpha={alpha!r} 与 1 的距离小于 {tol:g}，该运算需要除以 (1 - alpha)")
        self.alpha = alpha
        self.tol = tol


class CompatibilityError(FracHeatError):
    """
    初值问题的相容条件不满足

    condition 为条件名称（例如 "f(0)=0"），measured 为实测偏差。
    """

    def __init__(self, condition, measured, detail=""):
        message = f"不满足相容条件 {condition}，实测偏差 {measured:.3e}"
        if detail:
            message = f"{message}（{detail}）"
        super().__init__(message)
        self.condition = condition
        self.measured = measured


class NoConvergence(FracHeatError):
    """迭代未在上限内收敛"""

    def __init__(self, iterations, residual):
        super().__init__(f"迭代 {iterations} 次后仍未收敛，最后残差 {residual:.3e}")
        self.iterations = iterations
        self.residual = residual


class HypothesisViolation(FracHeatError):
    """边值问题的定理条件不满足，report 为完整的 HypothesisReport"""

    def __init__(self, report):
        failed = ", ".join(f"{row.name}（{row.required_by}）" for row in report.failures())
        super().__init__(f"定理条件不满足: {failed}")
        self.report = report
