"""
强迫项表达式的递归下降解析器

文法:
    expr   := unary (('+' | '-') unary)*
    unary  := '-' unary | term
    term   := power (('*' | '/') power)*
    power  := atom ['^' exponent]
    exponent := '-' exponent | power
    atom   := number | 'pi' | 变量 | func '(' expr ')' | '(' expr ')'

乘除号之后不允许直接出现一元负号，"2*-3" 需写成 "2*(-3)"。
"^" 右结合，优先级高于一元负号，"-t^2" 解析为 -(t^2)。
"""

from dataclasses import dataclass
import logging

from .exceptions import ArityError, ParseError
from .expr import FUNCTIONS, VARIABLES, BinOp, Call, Const, Neg, Num, Var

logger = logging.getLogger(__name__)

OPERATORS = '+-*/^(),'


@dataclass(frozen=True)
class Token:
    kind: str      # NUM / IDENT / OP / END
    text: str
    offset: int    # UTF-8 字节偏移


def tokenize(source):
    """把源码切分为记号列表，最后一个记号为 END"""
    tokens = []
    i = 0
    byte_offset = 0
    length = len(source)

    def advance(count):
        nonlocal i, byte_offset
        byte_offset += len(source[i:i + count].encode('utf-8'))
        i += count

    while i < length:
        ch = source[i]
        if ch.isspace() and ch.isascii():
            advance(1)
            continue
        if not ch.isascii():
            raise ParseError(byte_offset, "ASCII 字符", ch)
        if ch.isdigit() or (ch == '.' and i + 1 < length and source[i + 1].isdigit()):
            start = i
            j = i
            while j < length and source[j].isdigit():
                j += 1
            if j < length and source[j] == '.':
                j += 1
                while j < length and source[j].isdigit():
                    j += 1
            if j < length and source[j] in 'eE':
                k = j + 1
                if k < length and source[k] in '+-':
                    k += 1
                if k < length and source[k].isdigit():
                    while k < length and source[k].isdigit():
                        k += 1
                    j = k
            tokens.append(Token('NUM', source[start:j], byte_offset))
            advance(j - i)
            continue
        if ch.isalpha() or ch == '_':
            j = i
            while j < length and source[j].isascii() and (source[j].isalnum() or source[j] == '_'):
                j += 1
            tokens.append(Token('IDENT', source[i:j], byte_offset))
            advance(j - i)
            continue
        if ch in OPERATORS:
            tokens.append(Token('OP', ch, byte_offset))
            advance(1)
            continue
        raise ParseError(byte_offset, "数字、标识符或运算符", ch)

    tokens.append(Token('END', '', byte_offset))
    return tokens


class Parser:
    """
    表达式解析器

    variables 限定允许出现的变量，初值问题的 f(t) 只允许 t。
    """

    def __init__(self, source, variables=VARIABLES):
        self.source = source
        self.variables = tuple(variables)
        self.tokens = tokenize(source)
        self.pos = 0

    @property
    def current(self):
        return self.tokens[self.pos]

    def peek_op(self, *ops):
        token = self.current
        return token.kind == 'OP' and token.text in ops

    def advance(self):
        token = self.current
        self.pos += 1
        return token

    def expect_op(self, op):
        token = self.current
        if not (token.kind == 'OP' and token.text == op):
            raise ParseError(token.offset, f"'{op}'", token.text or None)
        return self.advance()

    def parse(self):
        node = self.parse_expr()
        token = self.current
        if token.kind != 'END':
            raise ParseError(token.offset, "运算符或表达式结束", token.text)
        return node

    def parse_expr(self):
        node = self.parse_unary()
        while self.peek_op('+', '-'):
            op = self.advance().text
            node = BinOp(op, node, self.parse_unary())
        return node

    def parse_unary(self):
        if self.peek_op('-'):
            self.advance()
            return Neg(self.parse_unary())
        return self.parse_term()

    def parse_term(self):
        node = self.parse_power()
        while self.peek_op('*', '/'):
            op = self.advance().text
            node = BinOp(op, node, self.parse_power())
        return node

    def parse_power(self):
        base = self.parse_atom()
        if self.peek_op('^'):
            self.advance()
            return BinOp('^', base, self.parse_exponent())
        return base

    def parse_exponent(self):
        if self.peek_op('-'):
            self.advance()
            return Neg(self.parse_exponent())
        return self.parse_power()

    def parse_atom(self):
        token = self.current
        if token.kind == 'NUM':
            self.advance()
            return Num(float(token.text))
        if token.kind == 'IDENT':
            self.advance()
            name = token.text
            if name in FUNCTIONS:
                return self.parse_call(name, token.offset)
            if name == 'pi':
                return Const('pi')
            if name in self.variables:
                return Var(name)
            if name in VARIABLES:
                allowed = "、".join(self.variables)
                raise ParseError(token.offset, f"变量 {allowed}（此处不允许 {name}）", name)
            raise ParseError(token.offset, "已知的函数、常数或变量", name)
        if self.peek_op('('):
            self.advance()
            node = self.parse_expr()
            self.expect_op(')')
            return node
        raise ParseError(token.offset, "数字、变量、函数或 '('", token.text or None)

    def parse_call(self, name, offset):
        self.expect_op('(')
        args = []
        if not self.peek_op(')'):
            args.append(self.parse_expr())
            while self.peek_op(','):
                self.advance()
                args.append(self.parse_expr())
        self.expect_op(')')
        if len(args) != 1:
            raise ArityError(name, len(args), offset)
        return Call(name, args[0])


def parse(source, variables=VARIABLES):
    """
    解析表达式源码

    参数:
        source: 表达式文本（str 或 UTF-8 bytes）
        variables: 允许出现的变量名

    返回:
        表达式树
    """
    if isinstance(source, bytes):
        try:
            source = source.decode('utf-8')
        except UnicodeDecodeError as e:
            raise ParseError(e.start, "合法的 UTF-8 编码", source[e.start:e.end])
    node = Parser(source, variables).parse()
    logger.debug(f"解析表达式: {source!r}")
    return node
