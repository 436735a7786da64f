"""
强迫项表达式树

节点均为不可变 dataclass，结构相等即 ==。求值基于 numpy，
x、t 可以是标量也可以是可广播的数组。
"""

from dataclasses import dataclass
import logging

import numpy as np

from core.conf import get_option
from .exceptions import MathDomain, UnboundVariable, Unsupported

logger = logging.getLogger(__name__)

FUNCTIONS = ('sin', 'cos', 'exp', 'log', 'sqrt')
VARIABLES = ('x', 't')


class Expr:
    """表达式节点基类"""

    def variables(self):
        return frozenset()

    def depends_on(self, name):
        return name in self.variables()


@dataclass(frozen=True)
class Num(Expr):
    value: float


@dataclass(frozen=True)
class Const(Expr):
    name: str

    @property
    def value(self):
        return float(np.pi)


@dataclass(frozen=True)
class Var(Expr):
    name: str

    def variables(self):
        return frozenset((self.name,))


@dataclass(frozen=True)
class Neg(Expr):
    operand: Expr

    def variables(self):
        return self.operand.variables()


@dataclass(frozen=True)
class BinOp(Expr):
    op: str
    left: Expr
    right: Expr

    def variables(self):
        return self.left.variables() | self.right.variables()


@dataclass(frozen=True)
class Call(Expr):
    func: str
    arg: Expr

    def variables(self):
        return self.arg.variables()


ZERO = Num(0.0)
ONE = Num(1.0)


# ---------------------------------------------------------------------------
# 求值
# ---------------------------------------------------------------------------

def evaluate(expr, x=None, t=None, strict=None):
    """
    对表达式求值

    参数:
        expr: 表达式树
        x, t: 变量取值，标量或数组；表达式用到但未提供的变量抛 UnboundVariable
        strict: 严格模式，结果含 NaN/Inf 时抛 MathDomain；None 时读取 DSL_STRICT_DOMAIN

    返回:
        标量输入返回 float，数组输入返回与 x、t 广播形状一致的 ndarray
    """
    strict = get_option('DSL_STRICT_DOMAIN', strict)
    env = {}
    if x is not None:
        env['x'] = np.asarray(x, dtype=float)
    if t is not None:
        env['t'] = np.asarray(t, dtype=float)
    for name in sorted(expr.variables()):
        if name not in env:
            raise UnboundVariable(name)

    with np.errstate(all='ignore'):
        value = _eval(expr, env)

    shape = np.broadcast_shapes(*(arr.shape for arr in env.values())) if env else ()
    value = np.broadcast_to(np.asarray(value, dtype=float), shape)
    if strict and not np.all(np.isfinite(value)):
        raise MathDomain("严格模式下表达式求值得到 NaN 或 Inf")
    if value.ndim == 0:
        return float(value)
    return np.array(value)


def _eval(node, env):
    if isinstance(node, Num):
        return np.float64(node.value)
    if isinstance(node, Const):
        return np.float64(node.value)
    if isinstance(node, Var):
        return env[node.name]
    if isinstance(node, Neg):
        return -_eval(node.operand, env)
    if isinstance(node, BinOp):
        left = _eval(node.left, env)
        right = _eval(node.right, env)
        if node.op == '+':
            return left + right
        if node.op == '-':
            return left - right
        if node.op == '*':
            return left * right
        if node.op == '/':
            return np.true_divide(left, right)
        if node.op == '^':
            if np.any((left == 0) & (right < 0)):
                raise MathDomain("0 的负数次幂")
            return np.power(left, right)
        raise Unsupported(f"未知运算符 {node.op}")
    if isinstance(node, Call):
        arg = _eval(node.arg, env)
        if node.func == 'sin':
            return np.sin(arg)
        if node.func == 'cos':
            return np.cos(arg)
        if node.func == 'exp':
            return np.exp(arg)
        if node.func == 'log':
            if np.any(arg <= 0):
                raise MathDomain("log 的自变量必须为正")
            return np.log(arg)
        if node.func == 'sqrt':
            if np.any(arg < 0):
                raise MathDomain("sqrt 的自变量不能为负")
            return np.sqrt(arg)
        raise Unsupported(f"未知函数 {node.func}")
    raise Unsupported(f"未知节点类型 {type(node).__name__}")


# ---------------------------------------------------------------------------
# 打印
# ---------------------------------------------------------------------------

def to_source(expr):
    """把表达式打印为源码，复合子式一律加括号，重新解析得到同构的树"""
    if isinstance(expr, Num):
        return repr(float(expr.value))
    if isinstance(expr, Const):
        return expr.name
    if isinstance(expr, Var):
        return expr.name
    if isinstance(expr, Neg):
        return f"-{_wrap(expr.operand)}"
    if isinstance(expr, BinOp):
        return f"{_wrap(expr.left)} {expr.op} {_wrap(expr.right)}"
    if isinstance(expr, Call):
        return f"{expr.func}({to_source(expr.arg)})"
    raise Unsupported(f"未知节点类型 {type(expr).__name__}")


def _wrap(expr):
    if isinstance(expr, (Num, Const, Var, Call)) and not (isinstance(expr, Num) and expr.value < 0):
        return to_source(expr)
    return f"({to_source(expr)})"


# ---------------------------------------------------------------------------
# 对 t 的符号求导
# ---------------------------------------------------------------------------

def _is_num(expr, value):
    return isinstance(expr, Num) and expr.value == value


def _add(a, b):
    if _is_num(a, 0.0):
        return b
    if _is_num(b, 0.0):
        return a
    return BinOp('+', a, b)


def _sub(a, b):
    if _is_num(b, 0.0):
        return a
    if _is_num(a, 0.0):
        return _neg(b)
    return BinOp('-', a, b)


def _mul(a, b):
    if _is_num(a, 0.0) or _is_num(b, 0.0):
        return ZERO
    if _is_num(a, 1.0):
        return b
    if _is_num(b, 1.0):
        return a
    return BinOp('*', a, b)


def _div(a, b):
    if _is_num(a, 0.0):
        return ZERO
    if _is_num(b, 1.0):
        return a
    return BinOp('/', a, b)


def _neg(a):
    if _is_num(a, 0.0):
        return ZERO
    if isinstance(a, Neg):
        return a.operand
    return Neg(a)


def _pow(base, exponent):
    if _is_num(exponent, 1.0):
        return base
    return BinOp('^', base, exponent)


def differentiate_t(expr):
    """
    对 t 求偏导，返回新的表达式树

    只做常数折叠级别的化简；x 视为常数。
    """
    if isinstance(expr, (Num, Const)):
        return ZERO
    if isinstance(expr, Var):
        return ONE if expr.name == 't' else ZERO
    if isinstance(expr, Neg):
        return _neg(differentiate_t(expr.operand))
    if isinstance(expr, BinOp):
        u, v = expr.left, expr.right
        du, dv = differentiate_t(u), differentiate_t(v)
        if expr.op == '+':
            return _add(du, dv)
        if expr.op == '-':
            return _sub(du, dv)
        if expr.op == '*':
            return _add(_mul(du, v), _mul(u, dv))
        if expr.op == '/':
            if _is_num(dv, 0.0):
                return _div(du, v)
            return _div(_sub(_mul(du, v), _mul(u, dv)), _pow(v, Num(2.0)))
        if expr.op == '^':
            return _differentiate_power(u, v, du, dv)
        raise Unsupported(f"无法对运算符 {expr.op} 求导")
    if isinstance(expr, Call):
        u = expr.arg
        du = differentiate_t(u)
        if _is_num(du, 0.0):
            return ZERO
        if expr.func == 'sin':
            return _mul(Call('cos', u), du)
        if expr.func == 'cos':
            return _neg(_mul(Call('sin', u), du))
        if expr.func == 'exp':
            return _mul(Call('exp', u), du)
        if expr.func == 'log':
            return _div(du, u)
        if expr.func == 'sqrt':
            return _div(du, _mul(Num(2.0), Call('sqrt', u)))
        raise Unsupported(f"无法对函数 {expr.func} 求导")
    raise Unsupported(f"未知节点类型 {type(expr).__name__}")


def _differentiate_power(base, exponent, dbase, dexponent):
    if _is_num(dexponent, 0.0):
        if _is_num(dbase, 0.0):
            return ZERO
        if isinstance(exponent, Num):
            lowered = Num(exponent.value - 1.0)
        else:
            lowered = _sub(exponent, ONE)
        return _mul(_mul(exponent, _pow(base, lowered)), dbase)
    # b^e = exp(e * log b)
    power = BinOp('^', base, exponent)
    if _is_num(dbase, 0.0):
        return _mul(_mul(power, Call('log', base)), dexponent)
    inner = _add(_mul(dexponent, Call('log', base)), _div(_mul(exponent, dbase), base))
    return _mul(power, inner)
