import math

import numpy as np
from django.test import SimpleTestCase

from core.exceptions import AlphaSingular, DomainError, ParameterError
from forcing_dsl.forcing import TimeForcing
from .operators import CFParams, SampledFunction, cf_derivative, cf_integral
from .quadrature import exp_kernel_integral, simpson_weight_matrix

SMOOTH_CORPUS = ["sin(t)", "t^2", "t*exp(-t)", "1 - exp(-t)"]


class CFParamsTests(SimpleTestCase):
    """参数校验测试"""

    def test_alpha_range(self):
        for alpha in (0.0, -0.1, 1.2, float('nan')):
            with self.assertRaises(ParameterError):
                CFParams(alpha)
        self.assertEqual(CFParams(1.0).alpha, 1.0)

    def test_singular_alpha(self):
        with self.assertRaises(AlphaSingular):
            CFParams(1.0).decay_rate
        self.assertEqual(CFParams(0.5).decay_rate, 1.0)


class CFDerivativeTests(SimpleTestCase):
    """Caputo-Fabrizio 导数测试"""

    def test_linear_forcing(self):
        expected = 2.0 * (1.0 - math.exp(-1.0))
        f = TimeForcing.from_expression("t")
        self.assertAlmostEqual(cf_derivative(f, 0.5, 1.0), expected, delta=1e-8)
        self.assertAlmostEqual(cf_derivative(lambda s: s, 0.5, 1.0), expected, delta=1e-8)

    def test_constant_is_exactly_zero(self):
        for alpha in (0.25, 0.5, 0.75):
            self.assertEqual(cf_derivative(TimeForcing.constant(3.0), alpha, 0.7), 0.0)
        self.assertEqual(cf_derivative(SampledFunction([0.0, 1.0], [2.0, 2.0]), 0.5, 1.0), 0.0)

    def test_empty_interval(self):
        self.assertEqual(cf_derivative(TimeForcing.from_expression("t^2"), 0.5, 0.0), 0.0)

    def test_errors(self):
        f = TimeForcing.from_expression("t")
        with self.assertRaises(AlphaSingular):
            cf_derivative(f, 1.0, 0.5)
        with self.assertRaises(DomainError):
            cf_derivative(f, 0.5, -0.1)
        with self.assertRaises(DomainError):
            cf_derivative(f, 0.5, 2.0, horizon=1.0)

    def test_linearity(self):
        f = TimeForcing.from_expression("sin(t)")
        g = TimeForcing.from_expression("t^2")
        combo = TimeForcing.from_expression("2*sin(t) - 3*t^2")
        for t in (0.3, 0.8, 1.0):
            lhs = cf_derivative(combo, 0.4, t)
            rhs = 2.0 * cf_derivative(f, 0.4, t) - 3.0 * cf_derivative(g, 0.4, t)
            self.assertAlmostEqual(lhs, rhs, delta=1e-10)

    def test_numeric_path_matches_analytic(self):
        f = TimeForcing.from_expression("t*exp(-t)")
        for t in (0.25, 1.0):
            analytic = cf_derivative(f, 0.5, t, horizon=1.0)
            numeric = cf_derivative(f, 0.5, t, horizon=1.0, numeric=True)
            self.assertAlmostEqual(analytic, numeric, delta=1e-8)

    def test_fundamental_theorem(self):
        params = CFParams(0.5)
        for source in SMOOTH_CORPUS:
            f = TimeForcing.from_expression(source)

            def derivative(s, f=f):
                return np.array([cf_derivative(f, params, si) for si in np.atleast_1d(s)])

            for t in (0.5, 1.0):
                value = cf_integral(derivative, params, t, n_quad=64)
                self.assertAlmostEqual(value, f(t) - f(0.0), delta=1e-7, msg=source)

    def test_quadrature_convergence(self):
        f = TimeForcing.from_expression("t")
        exact = 2.0 * (1.0 - math.exp(-1.0))
        coarse = abs(cf_derivative(f, 0.5, 1.0, n_quad=2) - exact)
        fine = abs(cf_derivative(f, 0.5, 1.0, n_quad=4) - exact)
        self.assertGreater(coarse, 0.0)
        self.assertGreaterEqual(coarse / fine, 3.5)

    def test_vector_valued(self):
        def pair(s):
            s = np.asarray(s, dtype=float)
            return np.stack([s, s ** 2], axis=-1)

        value = cf_derivative(pair, 0.5, 1.0, horizon=1.0)
        self.assertEqual(value.shape, (2,))
        self.assertAlmostEqual(value[0], cf_derivative(lambda s: s, 0.5, 1.0, horizon=1.0), delta=1e-12)
        self.assertAlmostEqual(value[1], cf_derivative(lambda s: s ** 2, 0.5, 1.0, horizon=1.0), delta=1e-12)


class CFIntegralTests(SimpleTestCase):
    """Losada-Nieto 积分测试"""

    def test_zero(self):
        self.assertEqual(cf_integral(TimeForcing.zero(), 0.3, 2.0), 0.0)

    def test_constant(self):
        self.assertAlmostEqual(cf_integral(TimeForcing.constant(1.0), 0.5, 2.0), 1.5, delta=1e-12)

    def test_classical_limit(self):
        self.assertAlmostEqual(cf_integral(TimeForcing.from_expression("t"), 1.0, 1.0), 0.5, delta=1e-12)

    def test_domain(self):
        u = SampledFunction([0.0, 0.5, 1.0], [0.0, 1.0, 2.0])
        with self.assertRaises(DomainError):
            cf_integral(u, 0.5, 1.5)
        self.assertAlmostEqual(cf_integral(u, 0.5, 1.0), 0.5 * 2.0 + 0.5 * 1.0, delta=1e-12)


class ExpKernelIntegralTests(SimpleTestCase):
    """指数核卷积积分测试"""

    def test_zero(self):
        self.assertEqual(exp_kernel_integral(TimeForcing.zero(), -2.0, 1.5), 0.0)

    def test_degenerate_rate(self):
        self.assertAlmostEqual(exp_kernel_integral(TimeForcing.constant(1.0), 0.0, 3.0), 3.0, delta=1e-12)

    def test_decaying(self):
        value = exp_kernel_integral(TimeForcing.constant(1.0), -1.0, 1.0)
        self.assertAlmostEqual(value, 1.0 - math.exp(-1.0), delta=1e-12)

    def test_negative_time(self):
        with self.assertRaises(DomainError):
            exp_kernel_integral(TimeForcing.constant(1.0), -1.0, -0.5)

    def test_array_targets(self):
        g = TimeForcing.from_expression("sin(t)")
        targets = np.array([0.0, 0.123, 0.5, 0.77, 1.0])
        values = exp_kernel_integral(g, 0.7, targets)
        # ∫ sin ξ e^{r(t−ξ)} dξ = (e^{rt} − r sin t − cos t)/(1 + r²)
        r = 0.7
        exact = (np.exp(r * targets) - r * np.sin(targets) - np.cos(targets)) / (1.0 + r * r)
        self.assertLess(np.max(np.abs(values - exact)), 1e-11)

    def test_vector_valued(self):
        def pair(s):
            s = np.asarray(s, dtype=float)
            return np.stack([np.ones_like(s), s], axis=-1)

        value = exp_kernel_integral(pair, 0.0, 2.0)
        self.assertEqual(value.shape, (2,))
        self.assertAlmostEqual(value[0], 2.0, delta=1e-12)
        self.assertAlmostEqual(value[1], 2.0, delta=1e-12)


class SampledFunctionTests(SimpleTestCase):
    """离散函数测试"""

    def test_validation(self):
        with self.assertRaises(ParameterError):
            SampledFunction([0.1, 1.0], [0.0, 1.0])
        with self.assertRaises(ParameterError):
            SampledFunction([0.0, 1.0, 0.5], [0.0, 1.0, 2.0])
        with self.assertRaises(ParameterError):
            SampledFunction([0.0, 1.0], [0.0])

    def test_interpolation_and_gradient(self):
        knots = np.linspace(0.0, 1.0, 11)
        u = SampledFunction(knots, knots ** 2)
        self.assertAlmostEqual(u(0.5), 0.25, delta=1e-15)
        self.assertAlmostEqual(u.derivative(0.5), 1.0, delta=1e-12)
        self.assertAlmostEqual(u.derivative(1.0), 2.0, delta=1e-12)
        with self.assertRaises(DomainError):
            u(1.5)


class SimpsonWeightTests(SimpleTestCase):
    """下三角求积权重测试"""

    def test_rows_integrate_quadratics(self):
        n, h = 9, 0.1
        weights = simpson_weight_matrix(n, h)
        s = np.arange(n + 1) * h
        self.assertTrue(np.all(weights[0] == 0.0))
        self.assertAlmostEqual(weights[1] @ s, 0.5 * h * h, delta=1e-15)
        for i in range(2, n + 1):
            self.assertAlmostEqual(weights[i] @ s ** 2, s[i] ** 3 / 3.0, delta=1e-13)
        self.assertTrue(np.all(np.triu(weights, 1) == 0.0))
