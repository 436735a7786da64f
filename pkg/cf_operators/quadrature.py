"""
共享求积工具

exp_kernel_integral 计算 ∫₀ᵗ g(ξ) e^{rate·(t−ξ)} dξ，所有闭式解中的卷积积分
都经由这里求值。simpson_weight_matrix 给出 Volterra 迭代用的下三角求积权重。
"""

import numpy as np
from scipy.signal import lfilter

from core.conf import panel_count
from core.exceptions import DomainError, ParameterError


def along_first_axis(weights, values):
    """把一维权重扩展到 values 的维数，以便沿第 0 轴广播"""
    weights = np.asarray(weights, dtype=float)
    extra = np.ndim(values) - weights.ndim
    if extra <= 0:
        return weights
    return weights.reshape(weights.shape + (1,) * extra)


def sample(func, points):
    """对可调用对象求值并转换为浮点数组，标量结果广播到 points 的长度"""
    values = np.asarray(func(points), dtype=float)
    if values.ndim == 0:
        values = np.full(np.shape(points), float(values))
    return values


def exp_kernel_integral(g, rate, t, n_quad=None):
    """
    计算 ∫₀ᵗ g(ξ) e^{rate·(t−ξ)} dξ

    在 [0, max(t)] 上取均匀节点，每个面板用含中点的 Simpson 公式，再用精确递推
    I(t+h) = e^{rate·h} I(t) + ∫_t^{t+h} 累积；目标点落在面板内部时补上一段
    三点 Simpson。

    参数:
        g: 可调用对象，接受时间数组；可返回 (len, m) 的向量值
        rate: 指数核的增长率（衰减时为负）
        t: 目标时间，标量或数组，必须非负
        n_quad: 每单位时间的面板数，None 时读取 N_QUAD

    返回:
        标量 t 返回 float（向量值 g 返回数组），数组 t 返回数组
    """
    scalar = np.ndim(t) == 0
    targets = np.atleast_1d(np.asarray(t, dtype=float))
    if np.any(targets < 0) or not np.all(np.isfinite(targets)):
        raise DomainError(f"积分上限必须为非负有限数，实际最小值 {targets.min()!r}")

    t_max = float(targets.max()) if targets.size else 0.0
    if t_max == 0.0:
        probe = sample(g, np.zeros(1))
        result = np.zeros(targets.shape + probe.shape[1:])
        return _finish(result, scalar)

    n = panel_count(t_max, n_quad)
    h = t_max / n
    nodes = np.linspace(0.0, t_max, n + 1)
    g_nodes = sample(g, nodes)
    g_mids = sample(g, nodes[:-1] + 0.5 * h)

    e_full = np.exp(rate * h)
    e_half = np.exp(rate * 0.5 * h)
    steps = (h / 6.0) * (g_nodes[:-1] * e_full + 4.0 * g_mids * e_half + g_nodes[1:])
    running = lfilter([1.0], [1.0, -e_full], steps, axis=0)
    cumulative = np.concatenate([np.zeros((1,) + steps.shape[1:]), running], axis=0)

    index = np.minimum(np.floor(targets / h).astype(int), n - 1)
    delta = np.maximum(targets - nodes[index], 0.0)
    g_start = g_nodes[index]
    g_mid = sample(g, nodes[index] + 0.5 * delta)
    g_end = sample(g, targets)

    decay = along_first_axis(np.exp(rate * delta), g_start)
    decay_half = along_first_axis(np.exp(rate * 0.5 * delta), g_start)
    width = along_first_axis(delta / 6.0, g_start)
    tail = width * (g_start * decay + 4.0 * g_mid * decay_half + g_end)
    result = decay * cumulative[index] + tail
    return _finish(result, scalar)


def _finish(result, scalar):
    if scalar:
        value = result[0]
        return float(value) if np.ndim(value) == 0 else value
    return result


def simpson_weights(n_intervals, h):
    """偶数个等距区间上复合 Simpson 公式的权重向量 h/3·[1, 4, 2, ..., 4, 1]"""
    if n_intervals < 2 or n_intervals % 2:
        raise ParameterError(f"Simpson 公式需要正偶数个区间，实际为 {n_intervals}")
    weights = np.empty(n_intervals + 1)
    weights[0::2] = 2.0 * h / 3.0
    weights[1::2] = 4.0 * h / 3.0
    weights[0] = weights[-1] = h / 3.0
    return weights


def simpson_weight_matrix(n_steps, h):
    """
    下三角求积权重矩阵 W，W[i] @ y 近似 ∫₀^{t_i} y

    偶数个区间用复合 Simpson；奇数个区间先对前面的偶数个区间用 Simpson，
    最后一个区间用过末三点的二次插值修正；只有一个区间时退化为梯形公式。
    """
    size = n_steps + 1
    weights = np.zeros((size, size))
    if n_steps >= 1:
        weights[1, 0] = weights[1, 1] = 0.5 * h
    for i in range(2, size):
        even = i if i % 2 == 0 else i - 1
        row = weights[i]
        row[:even + 1] = simpson_weights(even, h)
        if even != i:
            row[i] += 5.0 * h / 12.0
            row[i - 1] += 8.0 * h / 12.0
            row[i - 2] -= h / 12.0
    return weights
