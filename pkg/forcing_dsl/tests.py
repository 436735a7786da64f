import math

import numpy as np
from django.test import SimpleTestCase

from .exceptions import ArityError, MathDomain, ParseError, UnboundVariable, Unsupported
from .expr import BinOp, Call, Neg, Num, Var, differentiate_t, evaluate, to_source
from .forcing import FieldForcing, TimeForcing
from .parser import parse

# 往返打印和求导校验用的表达式集合
CORPUS = [
    "t", "t^2", "t^3 - 2*t", "sin(t)", "cos(t) - 1",
    "exp(-t)", "t*exp(-t)", "1 - exp(-t)", "log(1 + t)", "sqrt(1 + t)",
    "t/(1 + t)", "t^0.5", "2^t", "t^t", "-t^2",
    "-(t + 1)", "sin(pi*t)", "cos(2*pi*t)*t", "exp(sin(t))", "log(t)",
    "1/t", "t^-1", "2^-t", "3.5e-1*t", "1.25*t^2 + 0.5*t",
    "(t - 1)^2", "t^2^2", "sqrt(t)*log(t)", "exp(t)/(1 + exp(t))", "sin(t)^2 + cos(t)^2",
    "t*sin(t + 1)", "(1 + t)^(1 + t)", "pi*t - sin(pi*t)", "exp(-t^2)", "t - t",
    "4", "pi", "x*t", "t*sin(pi*x)", "t*x*sin(2*pi*x)",
    "x^2 + t^2", "exp(-x*t)", "sqrt(x + t)", "log(x + t + 1)*x", "cos(pi*x)*t^2",
    "t/(x + 1)", "(x - 1)*(t + 2)", "-(x*t)", "sin(x)*cos(t) - cos(x)*sin(t)", "2*t - 3/(t + 4)",
]


class ParserTests(SimpleTestCase):
    """解析器测试"""

    def test_power_node(self):
        node = parse("t^2")
        self.assertEqual(node, BinOp('^', Var('t'), Num(2.0)))
        self.assertEqual(evaluate(node, t=2.0), 4.0)

    def test_product_with_function(self):
        self.assertAlmostEqual(evaluate(parse("t*sin(pi*x)"), x=0.5, t=3.0), 3.0, places=14)

    def test_unary_minus_after_multiplication_rejected(self):
        with self.assertRaises(ParseError) as ctx:
            parse("2*-3")
        self.assertEqual(ctx.exception.offset, 2)

    def test_unary_minus_binds_looser_than_power(self):
        self.assertEqual(parse("-t^2"), Neg(BinOp('^', Var('t'), Num(2.0))))
        self.assertEqual(evaluate(parse("-t^2"), t=3.0), -9.0)

    def test_power_is_right_associative(self):
        self.assertEqual(parse("t^2^3"), BinOp('^', Var('t'), BinOp('^', Num(2.0), Num(3.0))))
        self.assertEqual(evaluate(parse("2^-1"), t=None), 0.5)

    def test_left_associative_subtraction(self):
        self.assertEqual(evaluate(parse("10 - 4 - 3")), 3.0)
        self.assertEqual(evaluate(parse("8 / 4 / 2")), 1.0)

    def test_whitespace_insensitive(self):
        self.assertEqual(parse(" t *  sin( pi * x ) "), parse("t*sin(pi*x)"))

    def test_parse_error_reports_byte_offset(self):
        with self.assertRaises(ParseError) as ctx:
            parse("t + ")
        self.assertEqual(ctx.exception.offset, 4)
        with self.assertRaises(ParseError) as ctx:
            parse("t*2 + π")
        self.assertEqual(ctx.exception.offset, 6)

    def test_unknown_identifier(self):
        with self.assertRaises(ParseError) as ctx:
            parse("foo(t)")
        self.assertEqual(ctx.exception.offset, 0)

    def test_function_requires_parentheses(self):
        with self.assertRaises(ParseError):
            parse("sin t")

    def test_arity(self):
        with self.assertRaises(ArityError):
            parse("sin(t, x)")
        with self.assertRaises(ArityError):
            parse("exp()")

    def test_x_forbidden_in_time_context(self):
        with self.assertRaises(ParseError):
            parse("x*t", variables=('t',))
        with self.assertRaises(ParseError):
            TimeForcing.from_expression("t*x")

    def test_bytes_source(self):
        self.assertEqual(parse("t^2".encode('utf-8')), parse("t^2"))

    def test_invalid_utf8_reports_byte_offset(self):
        with self.assertRaises(ParseError) as ctx:
            parse(b"t + \xff")
        self.assertEqual(ctx.exception.offset, 4)

    def test_round_trip_corpus(self):
        self.assertEqual(len(CORPUS), 50)
        for source in CORPUS:
            tree = parse(source)
            self.assertEqual(parse(to_source(tree)), tree, source)


class EvaluateTests(SimpleTestCase):
    """求值测试"""

    def test_constant(self):
        self.assertEqual(evaluate(parse("0"), t=5.0), 0.0)

    def test_constant_broadcasts_over_arrays(self):
        value = evaluate(parse("0"), t=np.array([0.0, 1.0, 2.0]))
        self.assertEqual(value.shape, (3,))
        self.assertTrue(np.all(value == 0.0))

    def test_exp(self):
        self.assertAlmostEqual(evaluate(parse("exp(-t)"), t=1.0), math.exp(-1.0), places=15)

    def test_division_by_zero_strict_and_lenient(self):
        node = parse("1/ t")
        with self.assertRaises(MathDomain):
            evaluate(node, t=0.0, strict=True)
        self.assertEqual(evaluate(node, t=0.0, strict=False), math.inf)

    def test_domain_errors_always_raise(self):
        with self.assertRaises(MathDomain):
            evaluate(parse("log(t)"), t=0.0, strict=False)
        with self.assertRaises(MathDomain):
            evaluate(parse("t^-1"), t=0.0, strict=False)
        with self.assertRaises(MathDomain):
            evaluate(parse("sqrt(t)"), t=-1.0, strict=False)

    def test_unbound_variable(self):
        with self.assertRaises(UnboundVariable) as ctx:
            evaluate(parse("x*t"), t=1.0)
        self.assertEqual(ctx.exception.name, 'x')

    def test_grid_broadcast(self):
        x = np.linspace(0.0, 1.0, 5)[None, :]
        t = np.linspace(0.0, 2.0, 3)[:, None]
        value = evaluate(parse("x*t"), x=x, t=t)
        self.assertEqual(value.shape, (3, 5))
        self.assertEqual(value[2, 4], 2.0)

    def test_determinism(self):
        rng = np.random.default_rng(7)
        points = rng.uniform(0.1, 0.9, 20)
        for source in CORPUS:
            first = evaluate(parse(source), x=0.3, t=points)
            second = evaluate(parse(source), x=0.3, t=points)
            self.assertTrue(np.array_equal(first, second), source)


class DifferentiateTests(SimpleTestCase):
    """符号求导测试"""

    def test_square(self):
        self.assertEqual(evaluate(differentiate_t(parse("t^2")), t=2.0), 4.0)

    def test_sine_at_zero(self):
        self.assertEqual(evaluate(differentiate_t(parse("sin(t)")), t=0.0), 1.0)

    def test_product_rule(self):
        self.assertAlmostEqual(evaluate(differentiate_t(parse("t*exp(-t)")), t=1.0), 0.0, places=15)

    def test_constant_folds_to_zero(self):
        self.assertEqual(differentiate_t(parse("x^2 + pi")), Num(0.0))

    def test_unknown_function_unsupported(self):
        with self.assertRaises(Unsupported):
            differentiate_t(Call('tan', Var('t')))

    def test_against_central_difference(self):
        rng = np.random.default_rng(2024)
        points = rng.uniform(0.1, 0.9, 20)
        h = 1e-6
        for source in CORPUS:
            tree = parse(source)
            derivative = evaluate(differentiate_t(tree), x=0.3, t=points)
            central = (evaluate(tree, x=0.3, t=points + h) - evaluate(tree, x=0.3, t=points - h)) / (2 * h)
            self.assertLess(np.max(np.abs(derivative - central)), 1e-6, source)


class ForcingTests(SimpleTestCase):
    """强迫项包装测试"""

    def test_time_forcing_from_catalog(self):
        f = TimeForcing.from_expression("catalog:quadratic")
        self.assertEqual(f(2.0), 4.0)
        self.assertEqual(f.derivative(2.0), 4.0)
        self.assertTrue(f.has_derivative)
        self.assertFalse(f.is_constant)

    def test_unknown_catalog_entry(self):
        with self.assertRaises(ParseError):
            TimeForcing.from_expression("catalog:nope")

    def test_constant_forcing(self):
        f = TimeForcing.from_expression("3")
        self.assertTrue(f.is_constant)
        self.assertEqual(f.derivative(1.0), 0.0)

    def test_callable_without_derivative(self):
        f = TimeForcing.from_callable(np.sin)
        self.assertFalse(f.has_derivative)
        with self.assertRaises(Unsupported):
            f.derivative(0.0)
        self.assertIsInstance(f(0.0), float)

    def test_scalar_callable_is_vectorized(self):
        f = TimeForcing.from_callable(lambda t: math.sin(t), vectorized=False)
        values = f(np.array([0.0, math.pi / 2]))
        self.assertAlmostEqual(values[1], 1.0, places=15)

    def test_field_forcing(self):
        g = FieldForcing.from_expression("catalog:dirichlet_mode")
        self.assertAlmostEqual(g(0.5, 3.0), 3.0, places=14)
        self.assertAlmostEqual(g.derivative_t(0.5, 3.0), 1.0, places=14)
        self.assertFalse(g.is_zero)
        self.assertTrue(FieldForcing.from_expression("0").is_zero)

    def test_field_forcing_callable_broadcast(self):
        g = FieldForcing.from_callable(lambda x, t: 0.0)
        value = g(np.linspace(0, 1, 4), np.array([[0.0], [1.0]]))
        self.assertEqual(value.shape, (2, 4))
