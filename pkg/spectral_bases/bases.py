"""
[0, 1] 上的特征函数系与根函数系

    DirichletSine     sin kπx                             k ≥ 1
    NeumannCosine     cos nπx                             n ≥ 0
    PeriodicFourier   cos 2nπx (n ≥ 0), sin 2nπx (n ≥ 1)
    RootSystemX       1, cos 2kπx, x sin 2kπx             k ≥ 1
    AdjointSystemY    2(1−x), 4(1−x) cos 2kπx, 4 sin 2kπx k ≥ 1

RootSystemX 与 AdjointSystemY 构成双正交系，配对关系为
Primary0↔Primary0、Cos↔Cos、AssocXSin↔Sin。
系数按合成归一化给出：正弦、余弦系的系数乘以 2（常数模态乘以 1），
使 Σ 系数·基函数 直接重构原函数。
"""

from dataclasses import dataclass
import logging

import numpy as np
from django.db import models

from cf_operators.quadrature import simpson_weights
from core.conf import get_option
from core.exceptions import DomainError, ParameterError

logger = logging.getLogger(__name__)


class BasisFamily(models.TextChoices):
    DIRICHLET_SINE = 'DirichletSine', 'Dirichlet 正弦系'
    NEUMANN_COSINE = 'NeumannCosine', 'Neumann 余弦系'
    PERIODIC_FOURIER = 'PeriodicFourier', '周期 Fourier 系'
    ROOT_SYSTEM_X = 'RootSystemX', '非局部问题根函数系'
    ADJOINT_SYSTEM_Y = 'AdjointSystemY', '共轭问题根函数系'


class Slot(models.TextChoices):
    PRIMARY0 = 'Primary0', '常数模态'
    COS = 'Cos', '余弦'
    SIN = 'Sin', '正弦'
    ASSOC_X_SIN = 'AssocXSin', '伴随函数 x sin'


# 各函数系允许的槽位（Primary0 只能取 k = 0，其余 k ≥ 1）
LEGAL_SLOTS = {
    BasisFamily.DIRICHLET_SINE: (Slot.SIN,),
    BasisFamily.NEUMANN_COSINE: (Slot.PRIMARY0, Slot.COS),
    BasisFamily.PERIODIC_FOURIER: (Slot.PRIMARY0, Slot.COS, Slot.SIN),
    BasisFamily.ROOT_SYSTEM_X: (Slot.PRIMARY0, Slot.COS, Slot.ASSOC_X_SIN),
    BasisFamily.ADJOINT_SYSTEM_Y: (Slot.PRIMARY0, Slot.COS, Slot.SIN),
}

# 根函数系与共轭系之间的配对
DUAL_SLOT = {
    (BasisFamily.ROOT_SYSTEM_X, Slot.PRIMARY0): (BasisFamily.ADJOINT_SYSTEM_Y, Slot.PRIMARY0),
    (BasisFamily.ROOT_SYSTEM_X, Slot.COS): (BasisFamily.ADJOINT_SYSTEM_Y, Slot.COS),
    (BasisFamily.ROOT_SYSTEM_X, Slot.ASSOC_X_SIN): (BasisFamily.ADJOINT_SYSTEM_Y, Slot.SIN),
    (BasisFamily.ADJOINT_SYSTEM_Y, Slot.PRIMARY0): (BasisFamily.ROOT_SYSTEM_X, Slot.PRIMARY0),
    (BasisFamily.ADJOINT_SYSTEM_Y, Slot.COS): (BasisFamily.ROOT_SYSTEM_X, Slot.COS),
    (BasisFamily.ADJOINT_SYSTEM_Y, Slot.SIN): (BasisFamily.ROOT_SYSTEM_X, Slot.ASSOC_X_SIN),
}

SELF_ADJOINT_FAMILIES = (
    BasisFamily.DIRICHLET_SINE,
    BasisFamily.NEUMANN_COSINE,
    BasisFamily.PERIODIC_FOURIER,
)


@dataclass(frozen=True)
class ModeIndex:
    """函数系中的一个模态：函数系、槽位与波数序号"""

    family: str
    slot: str
    k: int

    def __post_init__(self):
        try:
            family = BasisFamily(self.family)
            slot = Slot(self.slot)
        except ValueError:
            raise ParameterError(f"未知的函数系或槽位: {self.family!r}/{self.slot!r}")
        if slot not in LEGAL_SLOTS[family]:
            raise ParameterError(f"函数系 {family.value} 没有 {slot.value} 槽位")
        if int(self.k) != self.k:
            raise ParameterError(f"波数序号必须为整数，实际为 {self.k!r}")
        k = int(self.k)
        if slot == Slot.PRIMARY0 and k != 0:
            raise ParameterError("Primary0 模态只能取 k = 0")
        if slot != Slot.PRIMARY0 and k < 1:
            raise ParameterError(f"{slot.value} 模态要求 k >= 1，实际为 {k}")
        object.__setattr__(self, 'family', family)
        object.__setattr__(self, 'slot', slot)
        object.__setattr__(self, 'k', k)

    @property
    def frequency(self):
        """基函数中的角频率：kπ 或 2kπ"""
        if self.family in (BasisFamily.DIRICHLET_SINE, BasisFamily.NEUMANN_COSINE):
            return self.k * np.pi
        return 2.0 * self.k * np.pi

    @property
    def label(self):
        return f"{self.family.value}:{self.slot.value}:{self.k}"

    def __str__(self):
        return self.label


def dual_mode(m):
    """双正交配对的模态；自共轭函数系返回自身"""
    if m.family in SELF_ADJOINT_FAMILIES:
        return m
    family, slot = DUAL_SLOT[(m.family, m.slot)]
    return ModeIndex(family, slot, m.k)


def family_modes(family, k_max):
    """
    截断波数 k_max 以内的全部模态，按规范顺序排列

    根函数系为 [u0, (cos 1, x sin 1), (cos 2, x sin 2), ...]，
    周期系与共轭系为 [1, (cos 1, sin 1), ...]。
    """
    family = BasisFamily(family)
    if k_max < 1:
        raise ParameterError(f"截断波数必须 >= 1，实际为 {k_max}")
    if family == BasisFamily.DIRICHLET_SINE:
        return [ModeIndex(family, Slot.SIN, k) for k in range(1, k_max + 1)]
    if family == BasisFamily.NEUMANN_COSINE:
        return [ModeIndex(family, Slot.PRIMARY0, 0)] + [
            ModeIndex(family, Slot.COS, k) for k in range(1, k_max + 1)
        ]
    second = Slot.ASSOC_X_SIN if family == BasisFamily.ROOT_SYSTEM_X else Slot.SIN
    modes = [ModeIndex(family, Slot.PRIMARY0, 0)]
    for k in range(1, k_max + 1):
        modes.append(ModeIndex(family, Slot.COS, k))
        modes.append(ModeIndex(family, second, k))
    return modes


def _check_x(x):
    x = np.asarray(x, dtype=float)
    if np.any(x < 0.0) or np.any(x > 1.0) or not np.all(np.isfinite(x)):
        raise DomainError("x 必须在 [0, 1] 内")
    return x


def _output(value):
    return float(value) if np.ndim(value) == 0 else value


def _values(m, x):
    w = m.frequency
    if m.slot == Slot.PRIMARY0:
        if m.family == BasisFamily.ADJOINT_SYSTEM_Y:
            return 2.0 * (1.0 - x)
        return np.ones_like(x)
    if m.slot == Slot.SIN:
        scale = 4.0 if m.family == BasisFamily.ADJOINT_SYSTEM_Y else 1.0
        return scale * np.sin(w * x)
    if m.slot == Slot.COS:
        if m.family == BasisFamily.ADJOINT_SYSTEM_Y:
            return 4.0 * (1.0 - x) * np.cos(w * x)
        return np.cos(w * x)
    return x * np.sin(w * x)


def eval_basis(m, x):
    """基函数在 x 处的精确值"""
    return _output(_values(m, _check_x(x)))


def basis_second_derivative(m, x):
    """
    基函数的二阶导数

    (x sin ωx)″ = 2ω cos ωx − ω² x sin ωx
    (4(1−x) cos ωx)″ = 8ω sin ωx − ω²·4(1−x) cos ωx
    """
    x = _check_x(x)
    w = m.frequency
    if m.slot == Slot.PRIMARY0:
        return _output(np.zeros_like(x))
    if m.slot == Slot.ASSOC_X_SIN:
        return _output(2.0 * w * np.cos(w * x) - w * w * x * np.sin(w * x))
    if m.family == BasisFamily.ADJOINT_SYSTEM_Y and m.slot == Slot.COS:
        return _output(8.0 * w * np.sin(w * x) - w * w * _values(m, x))
    return _output(-w * w * _values(m, x))


def eigenvalue(m):
    """
    模态方程中的正系数 μ

    Dirichlet 为 (kπ)²，Neumann 为 (nπ)²，周期系与根函数系为 (2kπ)²。
    """
    return float(m.frequency ** 2)


def analysis_weight(m, x):
    """
    计算系数时与 g 作内积的权函数

    自共轭系为归一化因子乘基函数本身，双正交系为配对的共轭函数。
    """
    x = np.asarray(x, dtype=float)
    if m.family in SELF_ADJOINT_FAMILIES:
        factor = 1.0 if m.slot == Slot.PRIMARY0 else 2.0
        return factor * _values(m, x)
    return _values(dual_mode(m), x)


def _x_grid(n_quad_x):
    n = get_option('N_QUAD_X', n_quad_x)
    if n % 2:
        n += 1
    x = np.linspace(0.0, 1.0, n + 1)
    return x, simpson_weights(n, 1.0 / n)


def coefficient_table(g, modes, t_nodes, n_quad_x=None):
    """
    一次空间求积得到多个模态在多个时刻的系数

    参数:
        g: FieldForcing 或接受可广播数组 (x, t) 的可调用对象
        modes: ModeIndex 列表
        t_nodes: 时间节点数组
        n_quad_x: 空间 Simpson 区间数，None 时读取 N_QUAD_X

    返回:
        形状 (len(t_nodes), len(modes)) 的数组
    """
    x, weights = _x_grid(n_quad_x)
    t_nodes = np.atleast_1d(np.asarray(t_nodes, dtype=float))
    field = np.broadcast_to(np.asarray(g(x[None, :], t_nodes[:, None]), dtype=float), (t_nodes.size, x.size))
    analysis = np.stack([analysis_weight(m, x) for m in modes]) * weights[None, :]
    return field @ analysis.T


def coefficient(g, m, t, n_quad_x=None):
    """单个模态的系数 g_m(t)，t 可以是数组"""
    table = coefficient_table(g, [m], t, n_quad_x)[:, 0]
    return _output(table[0]) if np.ndim(t) == 0 else table


def gram_matrix(left, right, n_quad_x=None):
    """内积矩阵 G[i, j] = ∫₀¹ left_i(x) right_j(x) dx"""
    x, weights = _x_grid(n_quad_x)
    a = np.stack([_values(m, x) for m in left])
    b = np.stack([_values(m, x) for m in right])
    return (a * weights[None, :]) @ b.T


def expansion_matrix(family, k_max, n_quad_x=None):
    """
    M[i, j] = ∫₀¹ X_i(x)·w_j(x) dx，w_j 为第 j 个模态的分析权函数

    系数归一化无误时任何函数系的 M 都是单位阵。
    """
    modes = family_modes(family, k_max)
    x, weights = _x_grid(n_quad_x)
    values = np.stack([_values(m, x) for m in modes])
    analysis = np.stack([analysis_weight(m, x) for m in modes])
    return (values * weights[None, :]) @ analysis.T


def biorthogonality_matrix(k_max, n_quad_x=None):
    """
    根函数系与共轭系的内积矩阵 ⟨X_i, Y_j⟩，规范顺序下应接近单位阵

    返回 (2·k_max + 1) 阶方阵。
    """
    matrix = expansion_matrix(BasisFamily.ROOT_SYSTEM_X, k_max, n_quad_x)
    logger.debug(f"双正交矩阵 k_max={k_max}, 偏离单位阵 {np.max(np.abs(matrix - np.eye(len(matrix)))):.3e}")
    return matrix


def synthesize(coefficients, modes, x):
    """按给定系数合成 Σ c_m·X_m(x)"""
    x = _check_x(x)
    total = np.zeros_like(x)
    for c, m in zip(coefficients, modes):
        total = total + c * _values(m, x)
    return _output(total)
