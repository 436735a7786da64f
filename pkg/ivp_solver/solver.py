"""
分数阶初值问题 CF D u(t) − λu(t) = f(t), u(0) = u0 的闭式解

记 D = 1 − λ(1−α)，r = λα/D:
    一般情形      u = (1−α)/D·f + α/D²·∫₀ᵗ f(ξ)e^{r(t−ξ)}dξ + u0/D·e^{rt}
    λ = 0         u = (1−α)f + α∫₀ᵗ f + u0
    λ = 1/(1−α)   u = −((1−α)²/α)f′ − (1−α)[f − f(0)] + u0
"""

from dataclasses import dataclass, field
import logging

import numpy as np
from django.db import models

from cf_operators.operators import CFParams, SampledFunction, derivative_function
from cf_operators.quadrature import exp_kernel_integral
from core.conf import get_option
from core.exceptions import CompatibilityError, DomainError, ParameterError

logger = logging.getLogger(__name__)

# 一般情形下 |D| 小于该值时提示病态
ILL_CONDITIONED_DENOMINATOR = 1e-6


class Regime(models.TextChoices):
    GENERIC = 'Generic', '一般情形'
    RESONANT = 'Resonant', '共振情形'
    LAMBDA_ZERO = 'LambdaZero', 'lambda 为零'


@dataclass(frozen=True)
class IVProblem:
    """初值问题：参数、右端项、初值与求解区间 [0, T]"""

    params: CFParams
    f: object
    u0: float = 0.0
    horizon: float = 1.0

    def __post_init__(self):
        self.params.require_lambda()
        if not float(self.horizon) > 0:
            raise ParameterError(f"求解区间长度必须为正，实际为 {self.horizon!r}")
        object.__setattr__(self, 'u0', float(self.u0))
        object.__setattr__(self, 'horizon', float(self.horizon))


@dataclass(frozen=True)
class TimeFunction:
    """
    可求值的 u(t)，记录使用的闭式分支

    evaluator 接受 numpy 数组；__call__ 对标量返回 float。
    """

    branch: str
    evaluator: object = field(repr=False)
    params: CFParams
    u0: float = 0.0
    horizon: float = 1.0

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        value = np.broadcast_to(np.asarray(self.evaluator(t), dtype=float), t.shape)
        if value.ndim == 0:
            return float(value)
        return np.array(value)

    def sample(self, t_grid):
        """在网格上采样为 SampledFunction"""
        t_grid = np.asarray(t_grid, dtype=float)
        return SampledFunction(t_grid, self(t_grid))

    @classmethod
    def zero(cls, params, horizon=1.0, branch=Regime.GENERIC):
        return cls(branch, lambda t: np.zeros(np.shape(t)), params, 0.0, horizon)


def classify_regime(params, tol=None):
    """
    判定参数所属分支

    共振带宽按 1/(1−α) 的量级相对放大；共振优先于 λ = 0（二者在 α∈(0,1) 内不会重合）。
    alpha = 1 时不存在共振情形。
    """
    lam = params.require_lambda()
    tol = get_option('RESONANCE_TOL', tol)
    if params.alpha < 1.0:
        resonant = 1.0 / (1.0 - params.alpha)
        if abs(lam - resonant) < tol * max(1.0, resonant):
            return Regime.RESONANT
    if abs(lam) < tol:
        return Regime.LAMBDA_ZERO
    return Regime.GENERIC


def check_compatibility(problem, regime, compat_tol=None, slope=None):
    """检查定理要求的相容条件，不满足时抛 CompatibilityError"""
    tol = get_option('COMPAT_TOL', compat_tol)
    f0 = float(problem.f(0.0))
    lam = problem.params.lam
    if problem.u0 == 0.0:
        if abs(f0) > tol:
            raise CompatibilityError("f(0)=0", abs(f0))
    else:
        defect = abs(f0 + lam * problem.u0)
        if defect > tol:
            raise CompatibilityError("f(0)=-lambda*u0", defect, f"f(0)={f0!r}, u0={problem.u0!r}")
    if regime == Regime.RESONANT:
        slope0 = float(slope(0.0))
        if abs(slope0) > tol:
            raise CompatibilityError("f'(0)=0", abs(slope0), "共振情形还要求 f′(0)=0")


def solve_ivp(problem, compat_tol=None, n_quad=None):
    """
    求初值问题的闭式解

    参数:
        problem: IVProblem
        compat_tol: 相容条件容差，None 时读取 COMPAT_TOL
        n_quad: 卷积积分的面板密度，None 时读取 N_QUAD

    返回:
        TimeFunction
    """
    params = problem.params
    alpha, lam, u0 = params.alpha, params.lam, problem.u0
    f = problem.f
    regime = classify_regime(params)

    slope = None
    if regime == Regime.RESONANT:
        params.require_nonsingular()
        slope = derivative_function(f, problem.horizon)
    check_compatibility(problem, regime, compat_tol, slope)

    if regime == Regime.RESONANT:
        scale = (1.0 - alpha) ** 2 / alpha
        f0 = float(f(0.0))

        def evaluator(t):
            return -scale * slope(t) - (1.0 - alpha) * (f(t) - f0) + u0

    elif regime == Regime.LAMBDA_ZERO:
        def evaluator(t):
            return (1.0 - alpha) * f(t) + alpha * exp_kernel_integral(f, 0.0, t, n_quad) + u0

    else:
        denominator = 1.0 - lam * (1.0 - alpha)
        if abs(denominator) < ILL_CONDITIONED_DENOMINATOR:
            logger.warning(f"lambda={lam!r} 接近共振值，1-lambda(1-alpha)={denominator:.3e}，结果可能病态")
        c1 = (1.0 - alpha) / denominator
        c2 = alpha / denominator ** 2
        rate = lam * alpha / denominator

        def evaluator(t):
            value = c1 * f(t) + c2 * exp_kernel_integral(f, rate, t, n_quad)
            if u0 != 0.0:
                value = value + (u0 / denominator) * np.exp(rate * t)
            return value

    logger.debug(f"初值问题闭式解: 分支={regime.value}, alpha={alpha!r}, lambda={lam!r}, u0={u0!r}")
    return TimeFunction(regime.value, _guard_negative(evaluator), params, u0, problem.horizon)


def _guard_negative(evaluator):
    def guarded(t):
        if np.any(np.asarray(t) < 0):
            raise DomainError("t 必须非负")
        return evaluator(t)

    return guarded
