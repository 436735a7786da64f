"""表达式语言相关异常"""

from core.exceptions import FracHeatError


class DSLError(FracHeatError):
    """表达式语言异常基类"""


class ParseError(DSLError):
    """
    语法错误

    offset 为出错位置在 UTF-8 源码中的字节偏移，expected 描述期望的记号。
    """

    def __init__(self, offset, expected, found=None):
        message = f"第 {offset} 字节处语法错误: 期望 {expected}"
        if found is not None:
            message = f"{message}，实际为 {found!r}"
        super().__init__(message)
        self.offset = offset
        self.expected = expected
        self.found = found


class ArityError(DSLError):
    """函数参数个数错误"""

    def __init__(self, func, got, offset):
        super().__init__(f"第 {offset} 字节处函数 {func} 需要 1 个参数，实际 {got} 个")
        self.func = func
        self.got = got
        self.offset = offset


class UnboundVariable(DSLError):
    """求值时变量未绑定"""

    def __init__(self, name):
        super().__init__(f"变量 {name} 未绑定")
        self.name = name


class MathDomain(DSLError):
    """数学定义域错误（对数自变量非正、0 的负数次幂、严格模式下出现 NaN/Inf）"""


class Unsupported(DSLError):
    """无法符号求导的表达式"""
