"""
边值问题的级数解

每个模态系数满足 CF D u_k + μ u_k = g_k, u_k(0) = 0，记 D = 1 + μ(1−α)，
ρ = −αμ/D，c1 = (1−α)/D，c2 = α/D²:
    u_k = c1·g_k + c2·∫₀ᵗ g_k(ξ) e^{ρ(t−ξ)} dξ

非局部问题的 cos 模态与 x sin 模态耦合（λ = 2kπ）:
    CF D u_1k + λ² u_1k = g_1k + 2λ u_2k
    CF D u_2k + λ² u_2k = g_2k
"""

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from functools import partial
import logging
import math
from typing import Optional

import numpy as np

from cf_operators.operators import HORIZON_SLACK, CFParams, SampledFunction
from cf_operators.quadrature import exp_kernel_integral
from core.conf import get_option
from core.exceptions import CompatibilityError, DomainError, HypothesisViolation, ParameterError
from ivp_solver.solver import IVProblem, Regime, TimeFunction, solve_ivp
from spectral_bases.bases import (
    BasisFamily, ModeIndex, Slot, basis_second_derivative, coefficient_table, eigenvalue, eval_basis,
    family_modes,
)
from verification import hypotheses

logger = logging.getLogger(__name__)


class ModalForcing:
    """
    模态强迫项 g_m(t) 的缓存

    在 [0, T] 的均匀网格上一次性求出全部模态系数，之后按分段线性插值取值。
    强迫项有对 t 的解析导数时导数也按同样方式求积，否则对缓存做二阶差分。
    构造完成后只读，可在线程间共享。
    """

    def __init__(self, g, modes, horizon, n_t_cache=None, n_quad_x=None):
        n_points = int(get_option('N_T_CACHE', n_t_cache))
        if n_points < 3:
            raise ParameterError(f"缓存网格至少需要 3 个点，实际为 {n_points}")
        self.modes = tuple(modes)
        self.knots = np.linspace(0.0, float(horizon), n_points)
        self.values = coefficient_table(g, self.modes, self.knots, n_quad_x)
        if getattr(g, 'has_derivative', False):
            self.slopes = coefficient_table(g.derivative_t, self.modes, self.knots, n_quad_x)
        else:
            self.slopes = np.gradient(self.values, self.knots, axis=0, edge_order=2)
        self._index = {m: i for i, m in enumerate(self.modes)}
        logger.debug(f"模态强迫项缓存: {len(self.modes)} 个模态, {n_points} 个时间节点")

    def __getitem__(self, m):
        i = self._index[m]
        return SampledFunction(self.knots, self.values[:, i], self.slopes[:, i])

    def is_zero(self, m):
        i = self._index[m]
        return bool(np.all(self.values[:, i] == 0.0) and np.all(self.slopes[:, i] == 0.0))


def _check_initial(gk, condition, compat_tol):
    tol = get_option('COMPAT_TOL', compat_tol)
    g0 = float(gk(0.0))
    if abs(g0) > tol:
        raise CompatibilityError(condition, abs(g0), "模态初值问题要求强迫项在 t = 0 处为零")


def _vanishes(gk):
    return bool(getattr(gk, 'is_constant', False)) and float(gk(0.0)) == 0.0


def _modal_constants(mu, alpha):
    denominator = 1.0 + mu * (1.0 - alpha)
    return denominator, (1.0 - alpha) / denominator, alpha / denominator ** 2, -alpha * mu / denominator


def solve_modal_selfadjoint(gk, mu, alpha, compat_tol=None, horizon=None, n_quad=None):
    """
    求解 CF D u + μ u = g_k, u(0) = 0

    相当于 λ = −μ 的初值问题；μ ≥ 0 时不会落入共振分支，μ = 0 时为 λ = 0 分支。

    参数:
        gk: 模态强迫项，接受时间数组
        mu: 特征值 μ ≥ 0
        alpha: 分数阶
        compat_tol: gk(0) = 0 的容差
        horizon: 求解区间右端，None 时取 gk.horizon 或 1
        n_quad: 卷积积分的面板密度

    返回:
        TimeFunction
    """
    mu = float(mu)
    if not math.isfinite(mu) or mu < 0:
        raise ParameterError(f"特征值必须非负，实际为 {mu!r}")
    _check_initial(gk, "g_k(0)=0", compat_tol)
    if horizon is None:
        horizon = getattr(gk, 'horizon', None) or 1.0
    return solve_ivp(IVProblem(CFParams(alpha, -mu), gk, 0.0, horizon), compat_tol, n_quad)


def solve_modal_coupled(g1k, g2k, k, alpha, compat_tol=None, horizon=None, n_quad=None):
    """
    非局部问题第 k 对模态的耦合求解

    u_2k 是 μ = (2kπ)² 的自共轭模态解；u_1k 对合成强迫项 g_1k + 2λ u_2k 用同一闭式，
    展开后为
        u_1k = c1[g_1k + 2λc1 g_2k] + c2[E g_1k + 4λc1 E g_2k + 2λc2 E E g_2k]
    其中 E q(t) = ∫₀ᵗ q(ξ) e^{ρ(t−ξ)} dξ。

    返回:
        (u_1k, u_2k)
    """
    if isinstance(k, bool) or int(k) != k or k < 1:
        raise ParameterError(f"k 必须为正整数，实际为 {k!r}")
    _check_initial(g1k, "g_1k(0)=0", compat_tol)
    _check_initial(g2k, "g_2k(0)=0", compat_tol)
    lam = 2.0 * int(k) * np.pi
    mu = lam * lam
    free = solve_modal_selfadjoint(g1k, mu, alpha, compat_tol, horizon, n_quad)
    u2 = solve_modal_selfadjoint(g2k, mu, alpha, compat_tol, horizon, n_quad)
    if _vanishes(g2k):
        return free, u2

    _, c1, c2, rho = _modal_constants(mu, alpha)

    def nested(s):
        return exp_kernel_integral(g2k, rho, s, n_quad)

    def evaluator(t):
        coupling = 2.0 * lam * c1 * c1 * g2k(t) + c2 * (
            4.0 * lam * c1 * exp_kernel_integral(g2k, rho, t, n_quad)
            + 2.0 * lam * c2 * exp_kernel_integral(nested, rho, t, n_quad)
        )
        return free(t) + coupling

    u1 = TimeFunction(Regime.GENERIC.value, evaluator, free.params, 0.0, free.horizon)
    return u1, u2


@dataclass(frozen=True)
class SeriesSolution:
    """
    截断级数解 Σ u_m(t) X_m(x)

    modal 与 modes 一一对应，按函数系的规范顺序排列。
    """

    problem: str
    family: str
    alpha: float
    horizon: float
    n_modes: int
    modes: tuple
    modal: tuple = field(repr=False)
    forcing: ModalForcing = field(repr=False)
    n_quad: Optional[int] = None
    workers: Optional[int] = None

    def modal_function(self, m):
        return self.modal[self.modes.index(m)]


def _map_modes(func, items, workers=None):
    workers = int(get_option('MODAL_WORKERS', workers))
    if workers <= 1 or len(items) <= 1:
        return [func(item) for item in items]
    with ThreadPoolExecutor(max_workers=workers) as executor:
        return list(executor.map(func, items))


def _run_task(task):
    keys, solver, args, options = task
    result = solver(*args, **options)
    return keys, result if isinstance(result, tuple) else (result,)


def _modal_tasks(p, cache, options):
    tasks = []
    for m in cache.modes:
        if p.family == BasisFamily.ROOT_SYSTEM_X and m.slot == Slot.COS:
            partner = ModeIndex(m.family, Slot.ASSOC_X_SIN, m.k)
            tasks.append(((m, partner), solve_modal_coupled, (cache[m], cache[partner], m.k, p.alpha), options))
        elif m.slot != Slot.ASSOC_X_SIN:
            tasks.append(((m,), solve_modal_selfadjoint, (cache[m], eigenvalue(m), p.alpha), options))
    return tasks


def solve_bvp(p, check_hypotheses=True, compat_tol=None, workers=None, n_t_cache=None, n_quad_x=None,
              n_quad=None):
    """
    组装边值问题的级数解

    参数:
        p: BVProblem
        check_hypotheses: 为 True 时先检查定理条件，不满足抛 HypothesisViolation
        compat_tol: 相容条件容差
        workers: 模态并行线程数，None 时读取 MODAL_WORKERS
        n_t_cache: 模态强迫项缓存的时间节点数
        n_quad_x: 空间求积区间数
        n_quad: 时间卷积积分的面板密度

    返回:
        SeriesSolution
    """
    if check_hypotheses:
        report = hypotheses.check_hypotheses(p, compat_tol=compat_tol)
        if not report.passed:
            raise HypothesisViolation(report)

    modes = family_modes(p.family, p.n_modes)
    cache = ModalForcing(p.g, modes, p.horizon, n_t_cache, n_quad_x)
    options = {'compat_tol': compat_tol, 'horizon': p.horizon, 'n_quad': n_quad}
    solved = {}
    for keys, functions in _map_modes(_run_task, _modal_tasks(p, cache, options), workers):
        solved.update(zip(keys, functions))

    logger.info(f"边值问题级数解: 问题={p.problem.value}, alpha={p.alpha!r}, 截断波数={p.n_modes}, 模态数={len(modes)}")
    return SeriesSolution(
        problem=p.problem,
        family=p.family,
        alpha=p.alpha,
        horizon=p.horizon,
        n_modes=p.n_modes,
        modes=tuple(modes),
        modal=tuple(solved[m] for m in modes),
        forcing=cache,
        n_quad=n_quad,
        workers=workers,
    )


def _check_rectangle(s, x, t):
    x = np.asarray(x, dtype=float)
    t = np.asarray(t, dtype=float)
    if not np.all(np.isfinite(x)) or np.any(x < 0.0) or np.any(x > 1.0):
        raise DomainError("x 必须在 [0, 1] 内")
    upper = s.horizon * (1.0 + HORIZON_SLACK) + HORIZON_SLACK
    if not np.all(np.isfinite(t)) or np.any(t < 0.0) or np.any(t > upper):
        raise DomainError(f"t 必须在 [0, {s.horizon!r}] 内")
    return x, t


def _basis_matrix(modes, x, rule):
    return np.stack([np.asarray(rule(m, x), dtype=float) for m in modes], axis=1)


def modal_values(s, t):
    """各模态系数在时间节点上的取值，形状 (len(t), 模态数)"""
    t = np.atleast_1d(np.asarray(t, dtype=float))
    columns = _map_modes(lambda u: np.asarray(u(t), dtype=float), list(s.modal), s.workers)
    return np.stack(columns, axis=1)


def evaluate_grid(s, x, t):
    """
    在张量网格上求值

    参数:
        s: SeriesSolution
        x: 空间节点（一维）
        t: 时间节点（一维）

    返回:
        形状 (len(t), len(x)) 的数组
    """
    x, t = _check_rectangle(s, np.atleast_1d(x), np.atleast_1d(t))
    return modal_values(s, t) @ _basis_matrix(s.modes, x, eval_basis).T


def _curvature(g, mu, alpha, n_quad, t):
    # −μ u = −g + (1/D)∫₀ᵗ g′(ξ) e^{ρ(t−ξ)} dξ
    denominator, _, _, rho = _modal_constants(mu, alpha)
    return -g(t) + exp_kernel_integral(g.derivative, rho, t, n_quad) / denominator


def _coupled_curvature(g1, g2, lam, alpha, n_quad, t):
    # −λ² u_1k + 2λ u_2k，即 cos 2kπx 在 u_xx 中的系数
    denominator, c1, c2, rho = _modal_constants(lam * lam, alpha)

    def inner(s):
        return exp_kernel_integral(g2.derivative, rho, s, n_quad)

    history = (
        exp_kernel_integral(g1.derivative, rho, t, n_quad)
        + 2.0 * lam * c1 * exp_kernel_integral(g2.derivative, rho, t, n_quad)
        + 2.0 * lam * c2 * exp_kernel_integral(inner, rho, t, n_quad)
    )
    return -g1(t) + history / denominator


def _curvature_terms(s):
    terms = []
    for m in s.modes:
        mu = eigenvalue(m)
        if mu == 0.0:
            continue
        if s.family == BasisFamily.ROOT_SYSTEM_X and m.slot == Slot.COS:
            partner = ModeIndex(m.family, Slot.ASSOC_X_SIN, m.k)
            rule = partial(_coupled_curvature, s.forcing[m], s.forcing[partner], m.frequency, s.alpha, s.n_quad)
        else:
            rule = partial(_curvature, s.forcing[m], mu, s.alpha, s.n_quad)
        terms.append((m, rule))
    return terms


def uxx_grid(s, x, t, direct=False):
    """
    u_xx 在张量网格上的值，形状 (len(t), len(x))

    默认用模态强迫项减去带阻尼的历史积分来表示每一项，避免高波数下
    μ·u_m 的相消误差；direct=True 时直接用 Σ u_m(t) X_m″(x)。
    """
    x, t = _check_rectangle(s, np.atleast_1d(x), np.atleast_1d(t))
    if direct:
        return modal_values(s, t) @ _basis_matrix(s.modes, x, basis_second_derivative).T
    terms = _curvature_terms(s)
    if not terms:
        return np.zeros((t.size, x.size))
    columns = _map_modes(lambda term: np.asarray(term[1](t), dtype=float), terms, s.workers)
    return np.stack(columns, axis=1) @ _basis_matrix([m for m, _ in terms], x, eval_basis).T


def _pointwise(grid_rule, s, x, t, **kwargs):
    x, t = _check_rectangle(s, x, t)
    shape = np.broadcast_shapes(x.shape, t.shape)
    xb, tb = np.broadcast_arrays(x, t)
    xu, x_index = np.unique(xb.ravel(), return_inverse=True)
    tu, t_index = np.unique(tb.ravel(), return_inverse=True)
    grid = grid_rule(s, xu, tu, **kwargs)
    values = grid[t_index.ravel(), x_index.ravel()].reshape(shape)
    return float(values) if values.ndim == 0 else values


def eval_solution(s, x, t):
    """u(x, t)，x 与 t 可以是可广播的数组"""
    return _pointwise(evaluate_grid, s, x, t)


def uxx_series(s, x, t, direct=False):
    """u_xx(x, t)，x 与 t 可以是可广播的数组"""
    return _pointwise(uxx_grid, s, x, t, direct=direct)


class SolutionSlice:
    """
    固定空间节点后的向量值时间函数 t ↦ (u(x_i, t))_i

    供 cf_derivative 的差分路径一次处理全部空间节点。
    """

    def __init__(self, s, x):
        self.solution = s
        self.x = np.atleast_1d(np.asarray(x, dtype=float))

    @property
    def horizon(self):
        return self.solution.horizon

    def __call__(self, t):
        if np.ndim(t) == 0:
            return evaluate_grid(self.solution, self.x, t)[0]
        return evaluate_grid(self.solution, self.x, t)
