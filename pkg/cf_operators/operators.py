"""
Caputo-Fabrizio 导数与 Losada-Nieto 积分算子

    CF D f(t) = 1/(1−α) ∫₀ᵗ f′(s) e^{−α(t−s)/(1−α)} ds
    I^α u(t)  = (1−α) u(t) + α ∫₀ᵗ u(s) ds

被求值的函数可以是 TimeForcing、SampledFunction，或任何接受 numpy 数组的可调用对象。
可调用对象若提供 has_derivative / derivative(t) 则使用解析导数，否则用中心差分。
"""

from dataclasses import dataclass
import logging
import math
from typing import Optional

import numpy as np
from scipy.integrate import simpson

from core.conf import fd_step, get_option, panel_count
from core.exceptions import AlphaSingular, DomainError, ParameterError
from .quadrature import along_first_axis, sample

logger = logging.getLogger(__name__)

# 允许 t 略微超出 horizon 的相对误差
HORIZON_SLACK = 1e-12


@dataclass(frozen=True)
class CFParams:
    """分数阶 alpha 与（初值问题用的）系数 lambda"""

    alpha: float
    lam: Optional[float] = None

    def __post_init__(self):
        alpha = float(self.alpha)
        if not math.isfinite(alpha) or not 0.0 < alpha <= 1.0:
            raise ParameterError(f"alpha 必须在 (0, 1] 内，实际为 {self.alpha!r}")
        object.__setattr__(self, 'alpha', alpha)
        if self.lam is not None:
            lam = float(self.lam)
            if not math.isfinite(lam):
                raise ParameterError(f"lambda 必须为有限数，实际为 {self.lam!r}")
            object.__setattr__(self, 'lam', lam)

    def require_nonsingular(self, tol=None):
        """alpha 过于接近 1 时抛 AlphaSingular"""
        tol = get_option('ALPHA_SINGULAR_TOL', tol)
        if abs(1.0 - self.alpha) < tol:
            raise AlphaSingular(self.alpha, tol)

    @property
    def decay_rate(self):
        """CF 核的衰减率 α/(1−α)"""
        self.require_nonsingular()
        return self.alpha / (1.0 - self.alpha)

    def require_lambda(self):
        if self.lam is None:
            raise ParameterError("该运算需要 lambda")
        return self.lam


def as_params(alpha):
    """接受 CFParams 或裸的 alpha 数值"""
    if isinstance(alpha, CFParams):
        return alpha
    return CFParams(alpha)


class SampledFunction:
    """
    网格上的离散函数

    节点必须从 0 开始且严格递增，求值使用分段线性插值。
    """

    def __init__(self, knots, values, derivative_values=None):
        knots = np.asarray(knots, dtype=float)
        values = np.asarray(values, dtype=float)
        if knots.ndim != 1 or knots.size < 2:
            raise ParameterError("节点必须是至少含两个点的一维数组")
        if knots[0] != 0.0:
            raise ParameterError(f"第一个节点必须为 0，实际为 {knots[0]!r}")
        if np.any(np.diff(knots) <= 0):
            raise ParameterError("节点必须严格递增")
        if values.shape != knots.shape:
            raise ParameterError(f"取值长度 {values.shape} 与节点长度 {knots.shape} 不一致")
        if derivative_values is not None:
            derivative_values = np.asarray(derivative_values, dtype=float)
            if derivative_values.shape != knots.shape:
                raise ParameterError("导数取值长度与节点长度不一致")
        self.knots = knots
        self.values = values
        self.derivative_values = derivative_values

    @property
    def horizon(self):
        return float(self.knots[-1])

    @property
    def is_constant(self):
        return bool(np.all(self.values == self.values[0]))

    @property
    def has_derivative(self):
        return True

    def _check(self, t):
        t = np.asarray(t, dtype=float)
        slack = HORIZON_SLACK * max(1.0, self.horizon)
        if np.any(t < -slack) or np.any(t > self.horizon + slack):
            raise DomainError(f"t 超出采样区间 [0, {self.horizon!r}]")
        return t

    def __call__(self, t):
        t = self._check(t)
        value = np.interp(t, self.knots, self.values)
        return float(value) if np.ndim(value) == 0 else value

    def derivative(self, t):
        """给定导数取值时插值，否则用二阶差分 numpy.gradient"""
        t = self._check(t)
        if self.derivative_values is None:
            self.derivative_values = np.gradient(self.values, self.knots, edge_order=2)
        value = np.interp(t, self.knots, self.derivative_values)
        return float(value) if np.ndim(value) == 0 else value

    def __len__(self):
        return self.knots.size


def _resolve_horizon(f, horizon):
    if horizon is not None:
        return float(horizon)
    return getattr(f, 'horizon', None)


def _check_time(t, horizon):
    t = float(t)
    if not math.isfinite(t) or t < 0:
        raise DomainError(f"t 必须为非负有限数，实际为 {t!r}")
    if horizon is not None and t > horizon * (1.0 + HORIZON_SLACK) + HORIZON_SLACK:
        raise DomainError(f"t={t!r} 超出区间 [0, {horizon!r}]")
    return t


def _zeros_like_value(f, t):
    probe = sample(f, np.array([t]))
    if probe.ndim <= 1:
        return 0.0
    return np.zeros(probe.shape[1:])


def numeric_derivative(f, s, h):
    """
    节点 s 上的数值导数

    内部节点用中心差分，首节点用二阶前向差分，末节点用二阶后向差分，
    因此不会在 [s[0], s[-1]] 之外求值。
    """
    s = np.asarray(s, dtype=float)
    interior = s[1:-1]
    forward = sample(f, s[0] + np.array([0.0, h, 2.0 * h]))
    backward = sample(f, s[-1] - np.array([0.0, h, 2.0 * h]))
    first = (-3.0 * forward[0] + 4.0 * forward[1] - forward[2]) / (2.0 * h)
    last = (3.0 * backward[0] - 4.0 * backward[1] + backward[2]) / (2.0 * h)
    middle = (sample(f, interior + h) - sample(f, interior - h)) / (2.0 * h)
    return np.concatenate([np.asarray(first)[None, ...], middle, np.asarray(last)[None, ...]], axis=0)


def cf_derivative(f, params, t, horizon=None, n_quad=None, h_fd=None, numeric=False):
    """
    Caputo-Fabrizio 导数 CF D f(t)

    参数:
        f: 时间函数，可返回 (len, m) 的向量值
        params: CFParams 或 alpha
        t: 求值时间
        horizon: 定义区间右端 T，None 时取 f.horizon（若有）
        n_quad: 每单位时间的 Simpson 面板数
        h_fd: 差分步长，None 时为 H_FD_SCALE * max(1, T)
        numeric: 为 True 时即使 f 有解析导数也用差分

    返回:
        导数值；向量值 f 返回数组
    """
    params = as_params(params)
    horizon = _resolve_horizon(f, horizon)
    t = _check_time(t, horizon)
    a = params.decay_rate

    if t == 0.0 or getattr(f, 'is_constant', False):
        return _zeros_like_value(f, t)

    n = panel_count(t, n_quad)
    s = np.linspace(0.0, t, 2 * n + 1)
    if not numeric and getattr(f, 'has_derivative', False):
        slope = sample(f.derivative, s)
    else:
        h = fd_step(horizon if horizon is not None else t, h_fd)
        slope = numeric_derivative(f, s, h)

    kernel = along_first_axis(np.exp(-a * (t - s)), slope)
    value = simpson(slope * kernel, dx=t / (2 * n), axis=0) / (1.0 - params.alpha)
    return float(value) if np.ndim(value) == 0 else value


def cf_integral(u, alpha, t, horizon=None, n_quad=None):
    """
    Losada-Nieto 积分 (1−α)u(t) + α∫₀ᵗ u(s)ds

    alpha = 1 时退化为普通积分。
    """
    params = as_params(alpha)
    horizon = _resolve_horizon(u, horizon)
    t = _check_time(t, horizon)
    current = sample(u, np.array([t]))[0]

    if t == 0.0:
        running = np.zeros_like(current)
    else:
        n = panel_count(t, n_quad)
        s = np.linspace(0.0, t, 2 * n + 1)
        running = simpson(sample(u, s), dx=t / (2 * n), axis=0)

    value = (1.0 - params.alpha) * current + params.alpha * running
    return float(value) if np.ndim(value) == 0 else value


def derivative_function(f, horizon=None, h_fd=None):
    """
    返回 f′ 的可调用对象

    f 有解析导数时直接使用；否则用二阶差分，靠近区间端点时把模板平移到区间内，
    再用二阶差商修正平移带来的一阶误差。
    """
    if getattr(f, 'has_derivative', False):
        return f.derivative
    horizon = _resolve_horizon(f, horizon)
    upper = np.inf if horizon is None else horizon

    def slope(t):
        points = np.asarray(t, dtype=float)
        scale = horizon if horizon is not None else max(1.0, float(np.max(points)))
        h = fd_step(scale, h_fd)
        shift = np.where(points - h < 0, h, np.where(points + h > upper, -h, 0.0))
        center = points + shift
        plus = sample(f, center + h)
        here = sample(f, center)
        minus = sample(f, center - h)
        first = (plus - minus) / (2.0 * h)
        second = (plus - 2.0 * here + minus) / (h * h)
        value = first - along_first_axis(shift, second) * second
        return float(value) if np.ndim(value) == 0 else value

    return slope
