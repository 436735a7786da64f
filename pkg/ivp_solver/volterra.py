"""
Volterra 积分方程的逐次逼近求解

作为闭式解的独立校验：不调用 solve_ivp，直接在均匀网格上对第二类 Volterra
方程做 Picard 迭代。
    一般情形    u − ∫ c·e^{−a(t−s)} u(s) ds = (1−α)/D · f
    共振情形    u − ∫ a·e^{−a(t−s)} u(s) ds = −((1−α)²/α) · f′
"""

import logging

import numpy as np

from cf_operators.operators import SampledFunction, derivative_function
from cf_operators.quadrature import sample, simpson_weight_matrix
from core.conf import get_option
from core.exceptions import NoConvergence, ParameterError
from .solver import Regime, classify_regime

logger = logging.getLogger(__name__)


def volterra_oracle(problem, n_steps, tol=None, max_iter=None):
    """
    Picard 迭代求解 Volterra 方程

    参数:
        problem: IVProblem，要求 u0 = 0
        n_steps: 区间数，网格共 n_steps + 1 个点
        tol: 相邻两次迭代的上确界距离阈值，None 时读取 PICARD_TOL
        max_iter: 迭代上限，None 时读取 PICARD_MAX_ITER

    返回:
        SampledFunction
    """
    tol = get_option('PICARD_TOL', tol)
    max_iter = get_option('PICARD_MAX_ITER', max_iter)
    if int(n_steps) != n_steps or n_steps < 1:
        raise ParameterError(f"n_steps 必须为正整数，实际为 {n_steps!r}")
    n_steps = int(n_steps)
    if problem.u0 != 0.0:
        raise ParameterError("Volterra 校验只处理 u0 = 0 的齐次初值")

    params = problem.params
    params.require_nonsingular()
    alpha, lam = params.alpha, params.lam
    a = params.decay_rate
    regime = classify_regime(params)

    grid = np.linspace(0.0, problem.horizon, n_steps + 1)
    if regime == Regime.RESONANT:
        scale = a
        slope = derivative_function(problem.f, problem.horizon)
        rhs = -((1.0 - alpha) ** 2 / alpha) * sample(slope, grid)
    else:
        denominator = 1.0 - lam * (1.0 - alpha)
        scale = alpha / ((1.0 - alpha) * denominator)
        rhs = (1.0 - alpha) / denominator * sample(problem.f, grid)

    lag = np.tril(grid[:, None] - grid[None, :])
    operator = simpson_weight_matrix(n_steps, problem.horizon / n_steps) * (scale * np.exp(-a * lag))

    u = rhs.copy()
    residual = np.inf
    for iteration in range(1, max_iter + 1):
        updated = rhs + operator @ u
        residual = float(np.max(np.abs(updated - u)))
        u = updated
        if residual < tol:
            logger.debug(f"Picard 迭代收敛: 分支={regime.value}, 迭代 {iteration} 次, 残差 {residual:.3e}")
            return SampledFunction(grid, u)

    logger.warning(f"Picard 迭代 {max_iter} 次后未收敛，残差 {residual:.3e}")
    raise NoConvergence(max_iter, residual)
