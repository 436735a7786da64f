import math

import numpy as np
from django.test import SimpleTestCase
from scipy.integrate import simpson

from cf_operators.operators import CFParams
from core.exceptions import CompatibilityError, DomainError, NoConvergence, ParameterError
from forcing_dsl.forcing import TimeForcing
from .kernels import iterated_kernel, resolvent_kernel
from .solver import IVProblem, Regime, classify_regime, solve_ivp
from .volterra import volterra_oracle

ALPHAS = (0.25, 0.5, 0.75)
LAMBDAS = (-5.0, -1.0, 0.0, 0.5, 1.0)
FORCINGS = ("t", "t^2", "sin(t)", "t*exp(-t)")


def make_problem(alpha, lam, source, u0=0.0, horizon=1.0):
    return IVProblem(CFParams(alpha, lam), TimeForcing.from_expression(source), u0, horizon)


class ClassifyRegimeTests(SimpleTestCase):
    """分支判定测试"""

    def test_examples(self):
        self.assertEqual(classify_regime(CFParams(0.5, 2.0)), Regime.RESONANT)
        self.assertEqual(classify_regime(CFParams(0.5, 0.0)), Regime.LAMBDA_ZERO)
        self.assertEqual(classify_regime(CFParams(0.5, 1.0)), Regime.GENERIC)

    def test_band_is_relative(self):
        self.assertEqual(classify_regime(CFParams(0.75, 4.0 + 1e-9)), Regime.RESONANT)
        self.assertEqual(classify_regime(CFParams(0.75, 4.0 + 1e-6)), Regime.GENERIC)

    def test_lambda_required(self):
        with self.assertRaises(ParameterError):
            classify_regime(CFParams(0.5))


class SolveIvpTests(SimpleTestCase):
    """闭式解测试"""

    def test_lambda_zero(self):
        u = solve_ivp(make_problem(0.5, 0.0, "t"))
        self.assertEqual(u.branch, Regime.LAMBDA_ZERO)
        self.assertAlmostEqual(u(1.0), 0.75, delta=1e-12)

    def test_resonant(self):
        u = solve_ivp(make_problem(0.5, 2.0, "t^2"))
        self.assertEqual(u.branch, Regime.RESONANT)
        self.assertAlmostEqual(u(1.0), -1.5, delta=1e-12)

    def test_resonant_numeric_derivative(self):
        f = TimeForcing.from_callable(lambda t: np.asarray(t) ** 2)
        u = solve_ivp(IVProblem(CFParams(0.5, 2.0), f))
        self.assertAlmostEqual(u(1.0), -1.5, delta=1e-6)
        self.assertAlmostEqual(u(0.0), 0.0, delta=1e-6)

    def test_zero_forcing(self):
        for lam in (-1.0, 0.0, 2.0):
            u = solve_ivp(make_problem(0.5, lam, "0"))
            values = u(np.linspace(0.0, 1.0, 9))
            self.assertTrue(np.all(values == 0.0))

    def test_generic_closed_form(self):
        # α = 0.5, λ = 1: D = 0.5, u = t + 2∫₀ᵗ ξ e^{t−ξ} dξ = t + 2(e^t − 1 − t)
        u = solve_ivp(make_problem(0.5, 1.0, "t"))
        for t in (0.25, 0.5, 1.0):
            self.assertAlmostEqual(u(t), t + 2.0 * (math.exp(t) - 1.0 - t), delta=1e-10)

    def test_compatibility_violations(self):
        with self.assertRaises(CompatibilityError) as ctx:
            solve_ivp(make_problem(0.5, 0.0, "1"))
        self.assertEqual(ctx.exception.condition, "f(0)=0")
        with self.assertRaises(CompatibilityError) as ctx:
            solve_ivp(make_problem(0.5, 2.0, "t"))
        self.assertEqual(ctx.exception.condition, "f'(0)=0")
        with self.assertRaises(CompatibilityError) as ctx:
            solve_ivp(make_problem(0.5, 1.0, "t", u0=1.0))
        self.assertEqual(ctx.exception.condition, "f(0)=-lambda*u0")

    def test_initial_condition(self):
        cases = [
            (0.5, 1.0, "t", 0.0),
            (0.5, 1.0, "-2 + t", 2.0),
            (0.25, -1.0, "3 + sin(t)", 3.0),
            (0.5, 0.0, "t", 1.0),
            (0.5, 2.0, "-2 + t^2", 1.0),
        ]
        for alpha, lam, source, u0 in cases:
            u = solve_ivp(make_problem(alpha, lam, source, u0=u0))
            self.assertAlmostEqual(u(0.0), u0, delta=1e-10, msg=source)

    def test_branch_continuity_near_lambda_zero(self):
        near = solve_ivp(make_problem(0.5, 1e-6, "t"))
        exact = solve_ivp(make_problem(0.5, 0.0, "t"))
        self.assertEqual(near.branch, Regime.GENERIC)
        self.assertLess(abs(near(1.0) - exact(1.0)), 1e-4)

    def test_negative_time(self):
        u = solve_ivp(make_problem(0.5, 1.0, "t"))
        with self.assertRaises(DomainError):
            u(-0.5)

    def test_classical_limit(self):
        # α = 1: u′ − λu = f
        u = solve_ivp(make_problem(1.0, -1.0, "t"))
        self.assertAlmostEqual(u(1.0), math.exp(-1.0), delta=1e-12)


class VolterraOracleTests(SimpleTestCase):
    """Volterra 迭代与闭式解对照"""

    def test_zero_forcing(self):
        grid = volterra_oracle(make_problem(0.5, 1.0, "0"), 64)
        self.assertTrue(np.all(grid.values == 0.0))

    def test_generic_example(self):
        problem = make_problem(0.5, 1.0, "t")
        grid = volterra_oracle(problem, 2048)
        closed = solve_ivp(problem)(grid.knots)
        self.assertLess(np.max(np.abs(grid.values - closed)), 1e-6)

    def test_resonant_example(self):
        problem = make_problem(0.5, 2.0, "t^2")
        grid = volterra_oracle(problem, 2048)
        closed = solve_ivp(problem)(grid.knots)
        self.assertLess(np.max(np.abs(grid.values - closed)), 1e-6)

    def test_oracle_equivalence_grid(self):
        for alpha in ALPHAS:
            resonant = 1.0 / (1.0 - alpha)
            cases = [(lam, source) for lam in LAMBDAS for source in FORCINGS]
            cases.append((resonant, "t^2"))
            for lam, source in cases:
                problem = make_problem(alpha, lam, source)
                grid = volterra_oracle(problem, 2048)
                closed = solve_ivp(problem)(grid.knots)
                self.assertLess(
                    np.max(np.abs(grid.values - closed)), 1e-6,
                    msg=f"alpha={alpha}, lambda={lam}, f={source}",
                )

    def test_rejects_nonzero_initial_value(self):
        with self.assertRaises(ParameterError):
            volterra_oracle(make_problem(0.5, 1.0, "-2 + t", u0=2.0), 16)

    def test_no_convergence(self):
        with self.assertRaises(NoConvergence) as ctx:
            volterra_oracle(make_problem(0.5, 1.0, "t"), 64, max_iter=2)
        self.assertEqual(ctx.exception.iterations, 2)


class KernelTests(SimpleTestCase):
    """迭代核与预解核测试"""

    def test_first_kernel(self):
        params = CFParams(0.5, 1.0)
        self.assertAlmostEqual(iterated_kernel(1, 1.3, 0.4, params), 2.0 * math.exp(-0.9), delta=1e-15)

    def test_second_kernel_on_diagonal(self):
        self.assertEqual(iterated_kernel(2, 0.7, 0.7, CFParams(0.5, 1.0)), 0.0)

    def test_third_kernel(self):
        params = CFParams(0.5, 1.0)
        self.assertAlmostEqual(iterated_kernel(3, 1.0, 0.0, params), 4.0 * math.exp(-1.0), delta=1e-14)
        # K_3(t, ξ) = ∫_ξ^t K(t, s) K_2(s, ξ) ds
        s = np.linspace(0.0, 1.0, 2001)
        nested = simpson(iterated_kernel(1, 1.0, s, params) * iterated_kernel(2, s, 0.0, params), x=s)
        self.assertAlmostEqual(nested, iterated_kernel(3, 1.0, 0.0, params), delta=1e-10)

    def test_resolvent_examples(self):
        self.assertAlmostEqual(resolvent_kernel(0.4, 0.4, CFParams(0.25, -1.0)), 0.25 / (0.75 * 1.75), delta=1e-15)
        self.assertAlmostEqual(resolvent_kernel(1.0, 0.0, CFParams(0.5, 0.0)), 1.0, delta=1e-15)
        self.assertAlmostEqual(resolvent_kernel(1.0, 0.0, CFParams(0.5, 1.0)), 2.0 * math.e, delta=1e-14)

    def test_resolvent_series_identity(self):
        lags = np.linspace(0.0, 1.0, 21)
        for alpha in ALPHAS:
            for lam in (-5.0, -1.0, 0.5, 1.0):
                params = CFParams(alpha, lam)
                partial = sum(iterated_kernel(i, lags, 0.0, params) for i in range(1, 31))
                exact = resolvent_kernel(lags, 0.0, params)
                self.assertLess(np.max(np.abs(exact - partial)), 1e-10, msg=f"{alpha}, {lam}")

    def test_errors(self):
        with self.assertRaises(DomainError):
            resolvent_kernel(0.2, 0.5, CFParams(0.5, 1.0))
        with self.assertRaises(ParameterError):
            iterated_kernel(0, 1.0, 0.0, CFParams(0.5, 1.0))
        with self.assertRaises(ParameterError):
            resolvent_kernel(1.0, 0.0, CFParams(0.5, 2.0))
