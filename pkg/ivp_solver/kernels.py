"""
Volterra 方程的迭代核与预解核

一般情形下积分方程 u(t) − ∫₀ᵗ K(t,ξ)u(ξ)dξ = f̄(t) 的核为 K = c·e^{−a(t−ξ)}，
其中 a = α/(1−α)，c = α/[(1−α)(1−λ(1−α))]。迭代核与预解核都有闭式:
    K_i(t,ξ) = c^i (t−ξ)^{i−1}/(i−1)! · e^{−a(t−ξ)}
    R(t,ξ)   = Σ K_i = c·e^{λα(t−ξ)/(1−λ(1−α))}
"""

import math

import numpy as np

from core.exceptions import DomainError, ParameterError
from .solver import Regime, classify_regime


def kernel_constants(params):
    """返回 (c, a, r)，共振情形下核不存在"""
    if classify_regime(params) == Regime.RESONANT:
        raise ParameterError("共振情形下 1-lambda(1-alpha)=0，迭代核没有定义")
    a = params.decay_rate
    denominator = 1.0 - params.lam * (1.0 - params.alpha)
    c = params.alpha / ((1.0 - params.alpha) * denominator)
    r = params.lam * params.alpha / denominator
    return c, a, r


def _lag(t, xi):
    lag = np.asarray(t, dtype=float) - np.asarray(xi, dtype=float)
    if np.any(lag < 0):
        raise DomainError("要求 xi <= t")
    return lag


def _output(value):
    return float(value) if np.ndim(value) == 0 else value


def iterated_kernel(i, t, xi, params):
    """第 i 个迭代核 K_i(t, ξ)，i 从 1 开始"""
    if int(i) != i or i < 1:
        raise ParameterError(f"迭代核序号必须为正整数，实际为 {i!r}")
    i = int(i)
    c, a, _ = kernel_constants(params)
    lag = _lag(t, xi)
    value = c ** i * np.power(lag, i - 1) / math.factorial(i - 1) * np.exp(-a * lag)
    return _output(value)


def resolvent_kernel(t, xi, params):
    """预解核 R(t, ξ)"""
    c, _, r = kernel_constants(params)
    lag = _lag(t, xi)
    return _output(c * np.exp(r * lag))
