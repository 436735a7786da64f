"""
残差检查

CF 导数一律走 cf_operators 的差分路径，不复用模态闭式解，
因此残差是对级数解与初值问题解的独立校验。
"""

from dataclasses import dataclass, field
import logging

import numpy as np

from bvp_solver.solver import SolutionSlice, evaluate_grid, uxx_grid
from cf_operators.operators import as_params, cf_derivative
from cf_operators.quadrature import exp_kernel_integral, sample
from core.exceptions import DomainError, ParameterError

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class ResidualReport:
    """
    残差网格与汇总范数

    grid 存放残差绝对值，形状 (x_count, t_count)（一维报告为 (t_count,)）；
    未参与计算的节点（边界、t = 0）记为 0。l2 为参与计算节点上的均方根。
    """

    grid: np.ndarray = field(repr=False)
    max_abs: float
    l2: float
    grid_spec: tuple
    nodes: int

    def to_dict(self):
        x_count, t_count, horizon = self.grid_spec
        return {
            'grid_spec': {'x_count': x_count, 't_count': t_count, 'T': horizon},
            'max_abs': self.max_abs,
            'l2': self.l2,
            'nodes': self.nodes,
            'grid': self.grid.tolist(),
        }


def _report(residual, mask, grid_spec):
    residual = np.abs(np.asarray(residual, dtype=float))
    grid = np.where(mask, residual, 0.0)
    picked = residual[mask]
    if picked.size == 0:
        return ResidualReport(grid, 0.0, 0.0, grid_spec, 0)
    return ResidualReport(
        grid=grid,
        max_abs=float(np.max(picked)),
        l2=float(np.sqrt(np.mean(picked ** 2))),
        grid_spec=grid_spec,
        nodes=int(picked.size),
    )


def _grid_axes(grid_spec, horizon):
    x_count, t_count, T = grid_spec
    if int(x_count) != x_count or int(t_count) != t_count or x_count < 3 or t_count < 2:
        raise ParameterError(f"残差网格至少需要 3 个空间点和 2 个时间点，实际为 {x_count}×{t_count}")
    T = float(T)
    if not 0 < T <= horizon:
        raise DomainError(f"残差网格的 T={T!r} 超出解的区间 [0, {horizon!r}]")
    return np.linspace(0.0, 1.0, int(x_count)), np.linspace(0.0, T, int(t_count)), (int(x_count), int(t_count), T)


def pde_residual(s, g, grid_spec, alpha=None, n_quad=None, h_fd=None):
    """
    |CF D u − u_xx − g| 在内部节点上的值

    参数:
        s: SeriesSolution
        g: 强迫项 g(x, t)
        grid_spec: (x_count, t_count, T)
        alpha: 分数阶，None 时取 s.alpha
        n_quad: CF 导数求积的面板密度
        h_fd: 差分步长

    返回:
        ResidualReport，grid 形状 (x_count, t_count)
    """
    alpha = s.alpha if alpha is None else alpha
    x, t, grid_spec = _grid_axes(grid_spec, s.horizon)
    inner_x, later_t = x[1:-1], t[1:]

    solution = SolutionSlice(s, inner_x)
    cf = np.stack([
        cf_derivative(solution, alpha, t_j, horizon=s.horizon, n_quad=n_quad, h_fd=h_fd, numeric=True)
        for t_j in later_t
    ])
    curvature = uxx_grid(s, inner_x, later_t)
    forcing = np.broadcast_to(np.asarray(g(inner_x[None, :], later_t[:, None]), dtype=float), curvature.shape)

    residual = np.zeros((x.size, t.size))
    mask = np.zeros((x.size, t.size), dtype=bool)
    residual[1:-1, 1:] = (cf - curvature - forcing).T
    mask[1:-1, 1:] = True
    report = _report(residual, mask, grid_spec)
    logger.debug(f"PDE 残差: 网格 {grid_spec[0]}×{grid_spec[1]}, max={report.max_abs:.3e}, l2={report.l2:.3e}")
    return report


def modal_residual(u, gk, mu, alpha, t_grid, n_quad=None, h_fd=None):
    """
    模态方程 CF D u + μ u − g_k 在时间节点上的残差

    t = 0 处不计算。返回一维 ResidualReport。
    """
    t_grid = np.asarray(t_grid, dtype=float)
    if t_grid.ndim != 1 or t_grid.size < 2 or np.any(t_grid < 0) or np.any(np.diff(t_grid) <= 0):
        raise ParameterError("时间节点必须是非负且严格递增的一维数组")
    horizon = float(t_grid[-1])
    mask = t_grid > 0
    residual = np.zeros(t_grid.size)
    for j in np.flatnonzero(mask):
        derivative = cf_derivative(u, alpha, t_grid[j], horizon=horizon, n_quad=n_quad, h_fd=h_fd, numeric=True)
        residual[j] = derivative + mu * float(u(t_grid[j])) - float(gk(t_grid[j]))
    return _report(residual, mask, (1, int(t_grid.size), horizon))


def ivp_residual(problem, u, t_grid, n_quad=None):
    """
    初值问题积分形式的残差

    分部积分后 CF D u − λu = f 等价于
        (1/(1−α) − λ) u − α/(1−α)² ∫₀ᵗ u(s) e^{−a(t−s)} ds − u0 e^{−at}/(1−α) − f = 0
    其中 a = α/(1−α)。不需要 u 的导数。
    """
    params = as_params(problem.params)
    params.require_nonsingular()
    alpha, lam = params.alpha, params.require_lambda()
    a = params.decay_rate
    t_grid = np.asarray(t_grid, dtype=float)
    if t_grid.ndim != 1 or t_grid.size < 1 or np.any(t_grid < 0):
        raise ParameterError("时间节点必须是非负的一维数组")

    values = sample(u, t_grid)
    history = exp_kernel_integral(u, -a, t_grid, n_quad)
    residual = (
        (1.0 / (1.0 - alpha) - lam) * values
        - alpha / (1.0 - alpha) ** 2 * history
        - problem.u0 * np.exp(-a * t_grid) / (1.0 - alpha)
        - sample(problem.f, t_grid)
    )
    return _report(residual, np.ones(t_grid.size, dtype=bool), (1, int(t_grid.size), float(t_grid.max())))


def verify_grid(s, x, t, u):
    """
    存储网格与级数解之间的数据偏差 |u_file − u|

    参数:
        s: SeriesSolution
        x, t: 网格节点（一维）
        u: 形状 (len(t), len(x)) 的存储值

    返回:
        ResidualReport，grid 形状 (len(x), len(t))
    """
    x = np.asarray(x, dtype=float)
    t = np.asarray(t, dtype=float)
    u = np.asarray(u, dtype=float)
    if u.shape != (t.size, x.size):
        raise ParameterError(f"网格取值形状 {u.shape} 与节点 ({t.size}, {x.size}) 不一致")
    defect = (u - evaluate_grid(s, x, t)).T
    spec = (int(x.size), int(t.size), float(t.max()) if t.size else 0.0)
    return _report(defect, np.ones(defect.shape, dtype=bool), spec)

