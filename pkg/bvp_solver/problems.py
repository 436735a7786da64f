"""
[0, 1]×[0, T] 上 CF D u − u_xx = g, u(x, 0) = 0 的四类边值问题

    P1_Dirichlet   u(0,t) = u(1,t) = 0
    P2_Neumann     u_x(0,t) = u_x(1,t) = 0
    P3_Periodic    u(0,t) = u(1,t), u_x(0,t) = u_x(1,t)
    P4_NonLocal    u(0,t) = u(1,t), u_x(0,t) = 0
"""

from dataclasses import dataclass
import math

from django.db import models

from core.exceptions import ParameterError
from forcing_dsl.forcing import FieldForcing
from spectral_bases.bases import BasisFamily


class ProblemKind(models.TextChoices):
    P1_DIRICHLET = 'P1_Dirichlet', 'Dirichlet 边界'
    P2_NEUMANN = 'P2_Neumann', 'Neumann 边界'
    P3_PERIODIC = 'P3_Periodic', '周期边界'
    P4_NONLOCAL = 'P4_NonLocal', '非局部边界'


PROBLEM_FAMILY = {
    ProblemKind.P1_DIRICHLET: BasisFamily.DIRICHLET_SINE,
    ProblemKind.P2_NEUMANN: BasisFamily.NEUMANN_COSINE,
    ProblemKind.P3_PERIODIC: BasisFamily.PERIODIC_FOURIER,
    ProblemKind.P4_NONLOCAL: BasisFamily.ROOT_SYSTEM_X,
}

# 命令行 --problem 1..4
PROBLEM_NUMBERS = {
    1: ProblemKind.P1_DIRICHLET,
    2: ProblemKind.P2_NEUMANN,
    3: ProblemKind.P3_PERIODIC,
    4: ProblemKind.P4_NONLOCAL,
}


@dataclass(frozen=True)
class BVProblem:
    """
    边值问题的完整描述

    g 可以是 FieldForcing、表达式字符串或接受 (x, t) 数组的可调用对象；
    n_modes 为截断波数。
    """

    problem: str
    alpha: float
    g: object
    horizon: float = 1.0
    n_modes: int = 32

    def __post_init__(self):
        try:
            problem = ProblemKind(self.problem)
        except ValueError:
            raise ParameterError(f"未知的问题类型: {self.problem!r}")
        alpha = float(self.alpha)
        if not 0.0 < alpha < 1.0:
            raise ParameterError(f"边值问题要求 alpha 在 (0, 1) 内，实际为 {self.alpha!r}")
        horizon = float(self.horizon)
        if not math.isfinite(horizon) or horizon <= 0:
            raise ParameterError(f"T 必须为正有限数，实际为 {self.horizon!r}")
        if isinstance(self.n_modes, bool) or int(self.n_modes) != self.n_modes or self.n_modes < 1:
            raise ParameterError(f"模态数必须为正整数，实际为 {self.n_modes!r}")
        g = self.g
        if isinstance(g, str):
            g = FieldForcing.from_expression(g)
        elif not isinstance(g, FieldForcing):
            if not callable(g):
                raise ParameterError(f"强迫项必须可调用，实际为 {type(g).__name__}")
            g = FieldForcing.from_callable(g)

        object.__setattr__(self, 'problem', problem)
        object.__setattr__(self, 'alpha', alpha)
        object.__setattr__(self, 'horizon', horizon)
        object.__setattr__(self, 'n_modes', int(self.n_modes))
        object.__setattr__(self, 'g', g)

    @property
    def family(self):
        return PROBLEM_FAMILY[self.problem]
