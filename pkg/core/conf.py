"""
求解器配置访问

数值参数集中在 settings.CF_SOLVER_CONFIG 中，未配置的键回落到这里的缺省值。
"""

import math

from django.conf import settings

DEFAULTS = {
    'N_QUAD': 512,
    'H_FD_SCALE': 1e-6,
    'ALPHA_SINGULAR_TOL': 1e-12,
    'RESONANCE_TOL': 1e-9,
    'COMPAT_TOL': 1e-9,
    'PICARD_TOL': 1e-12,
    'PICARD_MAX_ITER': 200,
    'N_QUAD_X': 1024,
    'N_T_CACHE': 513,
    'DEFAULT_MODES': 32,
    'HYPOTHESIS_GRID': 65,
    'DSL_STRICT_DOMAIN': True,
    'MODAL_WORKERS': 4,
}


def get_option(name, override=None):
    """
    读取求解器配置项

    参数:
        name: 配置键名（见 DEFAULTS）
        override: 调用方显式传入的值，不为 None 时直接返回

    返回:
        配置值
    """
    if override is not None:
        return override
    config = getattr(settings, 'CF_SOLVER_CONFIG', {})
    if name in config:
        return config[name]
    if name not in DEFAULTS:
        raise KeyError(f"未知的求解器配置项: {name}")
    return DEFAULTS[name]


def fd_step(horizon, override=None):
    """中心差分步长 h_fd = H_FD_SCALE * max(1, T)"""
    if override is not None:
        return override
    return get_option('H_FD_SCALE') * max(1.0, float(horizon))


def panel_count(length, per_unit=None):
    """区间 [0, length] 上的 Simpson 面板数，至少为 1"""
    per_unit = get_option('N_QUAD', per_unit)
    return max(1, int(math.ceil(per_unit * float(length) - 1e-9)))
