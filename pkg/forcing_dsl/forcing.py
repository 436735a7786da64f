"""
强迫项对象

TimeForcing 包装 f(t)，FieldForcing 包装 g(x, t)。两者都可以由表达式源码、
内置目录名（"catalog:<名称>"）或 numpy 向量化的 Python 可调用对象构造。
表达式构造的强迫项自带符号求导得到的 ∂/∂t。
"""

import logging

import numpy as np

from core.conf import get_option
from .exceptions import ParseError, Unsupported
from .expr import Expr, Num, differentiate_t, evaluate, to_source
from .parser import parse

logger = logging.getLogger(__name__)

CATALOG_PREFIX = 'catalog:'

# 内置强迫项目录：初值问题测试族 + 各边值问题的单模态强迫项
CATALOG = {
    'zero': '0',
    'linear': 't',
    'quadratic': 't^2',
    'sine': 'sin(t)',
    'damped': 't*exp(-t)',
    'relaxation': '1 - exp(-t)',
    'dirichlet_mode': 't*sin(pi*x)',
    'neumann_mode': 't*cos(pi*x)',
    'periodic_mode': 't*sin(2*pi*x)',
    'nonlocal_mode': 't*x*sin(2*pi*x)',
    'nonlocal_sine': 't*sin(2*pi*x)',
}


def resolve_source(source):
    """把 "catalog:<名称>" 展开为表达式源码，其余原样返回"""
    if not source.startswith(CATALOG_PREFIX):
        return source
    name = source[len(CATALOG_PREFIX):].strip()
    if name not in CATALOG:
        known = ", ".join(sorted(CATALOG))
        raise ParseError(len(CATALOG_PREFIX), f"目录中的强迫项名称（{known}）", name)
    return CATALOG[name]


def _as_output(value):
    arr = np.asarray(value, dtype=float)
    if arr.ndim == 0:
        return float(arr)
    return arr


class TimeForcing:
    """只依赖时间的强迫项 f(t)"""

    def __init__(self, func, derivative=None, expr=None, label='callable', constant=False):
        self._func = func
        self._derivative = derivative
        self.expr = expr
        self.label = label
        self._constant = constant

    @classmethod
    def from_expression(cls, source, strict=None):
        """由表达式构造，表达式中只允许变量 t"""
        strict = get_option('DSL_STRICT_DOMAIN', strict)
        if isinstance(source, Expr):
            expr = source
            if 'x' in expr.variables():
                raise ParseError(0, "只含 t 的表达式", to_source(expr))
        else:
            expr = parse(resolve_source(source), variables=('t',))
        label = to_source(expr) if isinstance(source, Expr) else source

        def func(t):
            return evaluate(expr, t=t, strict=strict)

        derivative = None
        try:
            derivative_expr = differentiate_t(expr)
        except Unsupported as e:
            logger.debug(f"表达式 {label!r} 无法符号求导，改用数值差分: {e}")
        else:
            def derivative(t):
                return evaluate(derivative_expr, t=t, strict=strict)

        return cls(func, derivative, expr=expr, label=label, constant='t' not in expr.variables())

    @classmethod
    def from_callable(cls, func, derivative=None, vectorized=True, label='callable'):
        """
        由 Python 可调用对象构造

        vectorized=False 时用 numpy.vectorize 包装，使其接受数组。
        """
        if not vectorized:
            func = np.vectorize(func, otypes=[float])
            if derivative is not None:
                derivative = np.vectorize(derivative, otypes=[float])
        return cls(func, derivative, label=label)

    @classmethod
    def constant(cls, value):
        value = float(value)
        return cls.from_expression(Num(value))

    @classmethod
    def zero(cls):
        return cls.constant(0.0)

    def __call__(self, t):
        if self.expr is not None:
            return self._func(t)
        return _as_output(self._func(t))

    @property
    def has_derivative(self):
        return self._derivative is not None

    @property
    def is_constant(self):
        return self._constant

    def derivative(self, t):
        """df/dt，没有解析导数时抛 Unsupported"""
        if self._derivative is None:
            raise Unsupported(f"强迫项 {self.label!r} 没有解析导数")
        if self.expr is not None:
            return self._derivative(t)
        return _as_output(self._derivative(t))

    def __repr__(self):
        return f"TimeForcing({self.label!r})"


class FieldForcing:
    """依赖空间和时间的强迫项 g(x, t)"""

    def __init__(self, func, derivative_t=None, expr=None, label='callable'):
        self._func = func
        self._derivative_t = derivative_t
        self.expr = expr
        self.label = label

    @classmethod
    def from_expression(cls, source, strict=None):
        strict = get_option('DSL_STRICT_DOMAIN', strict)
        if isinstance(source, Expr):
            expr = source
            label = to_source(expr)
        else:
            expr = parse(resolve_source(source), variables=('x', 't'))
            label = source

        def func(x, t):
            return evaluate(expr, x=x, t=t, strict=strict)

        derivative_t = None
        try:
            derivative_expr = differentiate_t(expr)
        except Unsupported as e:
            logger.debug(f"表达式 {label!r} 无法对 t 符号求导: {e}")
        else:
            def derivative_t(x, t):
                return evaluate(derivative_expr, x=x, t=t, strict=strict)

        return cls(func, derivative_t, expr=expr, label=label)

    @classmethod
    def from_callable(cls, func, derivative_t=None, label='callable'):
        """func 需接受可广播的 numpy 数组 x、t"""
        return cls(func, derivative_t, label=label)

    @classmethod
    def zero(cls):
        return cls.from_expression(Num(0.0))

    def __call__(self, x, t):
        value = self._func(x, t)
        if self.expr is None:
            shape = np.broadcast_shapes(np.shape(x), np.shape(t))
            value = np.broadcast_to(np.asarray(value, dtype=float), shape)
            return _as_output(value)
        return value

    @property
    def has_derivative(self):
        return self._derivative_t is not None

    @property
    def is_zero(self):
        return isinstance(self.expr, Num) and self.expr.value == 0.0

    def derivative_t(self, x, t):
        """∂g/∂t，没有解析导数时抛 Unsupported"""
        if self._derivative_t is None:
            raise Unsupported(f"强迫项 {self.label!r} 没有对 t 的解析导数")
        value = self._derivative_t(x, t)
        if self.expr is None:
            shape = np.broadcast_shapes(np.shape(x), np.shape(t))
            return _as_output(np.broadcast_to(np.asarray(value, dtype=float), shape))
        return value

    def __repr__(self):
        return f"FieldForcing({self.label!r})"
