import math

import numpy as np
from django.test import SimpleTestCase

from cf_operators.operators import CFParams
from core.exceptions import CompatibilityError, DomainError, HypothesisViolation, ParameterError
from forcing_dsl.forcing import FieldForcing, TimeForcing
from ivp_solver.solver import IVProblem, Regime
from ivp_solver.volterra import volterra_oracle
from spectral_bases.bases import BasisFamily, ModeIndex, Slot, family_modes
from .problems import BVProblem, ProblemKind
from .solver import (
    ModalForcing, eval_solution, evaluate_grid, solve_bvp, solve_modal_coupled, solve_modal_selfadjoint,
    uxx_series,
)

SINGLE_MODE = {
    ProblemKind.P1_DIRICHLET: "t*sin(pi*x)",
    ProblemKind.P2_NEUMANN: "t*cos(pi*x)",
    ProblemKind.P3_PERIODIC: "t*sin(2*pi*x)",
    ProblemKind.P4_NONLOCAL: "t*x*sin(2*pi*x)",
}


def make(problem, source, n_modes=8, alpha=0.5, horizon=1.0):
    return BVProblem(problem, alpha, FieldForcing.from_expression(source), horizon, n_modes)


def linear():
    return TimeForcing.from_expression("t")


class BVProblemTests(SimpleTestCase):
    """边值问题参数校验"""

    def test_invalid_parameters(self):
        g = FieldForcing.zero()
        with self.assertRaises(ParameterError):
            BVProblem(ProblemKind.P1_DIRICHLET, 1.0, g)
        with self.assertRaises(ParameterError):
            BVProblem(ProblemKind.P1_DIRICHLET, 0.5, g, horizon=0.0)
        with self.assertRaises(ParameterError):
            BVProblem(ProblemKind.P1_DIRICHLET, 0.5, g, n_modes=0)
        with self.assertRaises(ParameterError):
            BVProblem('P5_Robin', 0.5, g)

    def test_expression_forcing(self):
        p = BVProblem('P4_NonLocal', 0.5, "t*x*sin(2*pi*x)", 2.0, 4)
        self.assertIsInstance(p.g, FieldForcing)
        self.assertEqual(p.problem, ProblemKind.P4_NONLOCAL)
        self.assertEqual(p.family, BasisFamily.ROOT_SYSTEM_X)


class ModalSolverTests(SimpleTestCase):
    """模态初值问题测试"""

    def test_zero_forcing(self):
        u = solve_modal_selfadjoint(TimeForcing.zero(), math.pi ** 2, 0.5)
        self.assertTrue(np.all(u(np.linspace(0.0, 1.0, 5)) == 0.0))

    def test_zero_eigenvalue(self):
        u = solve_modal_selfadjoint(linear(), 0.0, 0.5)
        self.assertEqual(u.branch, Regime.LAMBDA_ZERO)
        self.assertAlmostEqual(u(1.0), 0.75, delta=1e-12)

    def test_matches_volterra_oracle(self):
        mu = math.pi ** 2
        u = solve_modal_selfadjoint(linear(), mu, 0.5)
        grid = volterra_oracle(IVProblem(CFParams(0.5, -mu), linear()), 2048)
        self.assertLess(np.max(np.abs(grid.values - u(grid.knots))), 1e-6)

    def test_compatibility(self):
        with self.assertRaises(CompatibilityError) as ctx:
            solve_modal_selfadjoint(TimeForcing.from_expression("1"), 1.0, 0.5)
        self.assertEqual(ctx.exception.condition, "g_k(0)=0")
        with self.assertRaises(ParameterError):
            solve_modal_selfadjoint(linear(), -1.0, 0.5)

    def test_coupled_zero(self):
        u1, u2 = solve_modal_coupled(TimeForcing.zero(), TimeForcing.zero(), 1, 0.5)
        t = np.linspace(0.0, 1.0, 5)
        self.assertTrue(np.all(u1(t) == 0.0))
        self.assertTrue(np.all(u2(t) == 0.0))

    def test_coupling_vanishes(self):
        u1, u2 = solve_modal_coupled(linear(), TimeForcing.zero(), 2, 0.5)
        free = solve_modal_selfadjoint(linear(), (4 * math.pi) ** 2, 0.5)
        t = np.linspace(0.0, 1.0, 9)
        self.assertTrue(np.array_equal(u1(t), free(t)))
        self.assertTrue(np.all(u2(t) == 0.0))

    def test_coupled_two_stage_oracle(self):
        u1, u2 = solve_modal_coupled(linear(), linear(), 1, 0.5)
        mu = (2 * math.pi) ** 2
        # 先用自共轭闭式得到 u_2k，再把 g_1k + 4π u_2k 交给 Volterra 迭代
        second = volterra_oracle(IVProblem(CFParams(0.5, -mu), linear()), 2048)
        self.assertLess(np.max(np.abs(second.values - u2(second.knots))), 1e-6)
        combined = TimeForcing.from_callable(lambda t: np.asarray(t) + 4 * math.pi * u2(t))
        first = volterra_oracle(IVProblem(CFParams(0.5, -mu), combined), 2048)
        self.assertLess(np.max(np.abs(first.values - u1(first.knots))), 1e-6)

    def test_coupled_errors(self):
        with self.assertRaises(CompatibilityError) as ctx:
            solve_modal_coupled(linear(), TimeForcing.from_expression("1"), 1, 0.5)
        self.assertEqual(ctx.exception.condition, "g_2k(0)=0")
        with self.assertRaises(ParameterError):
            solve_modal_coupled(linear(), linear(), 0, 0.5)


class ModalForcingTests(SimpleTestCase):
    """模态强迫项缓存测试"""

    def test_single_mode_cache(self):
        modes = family_modes(BasisFamily.DIRICHLET_SINE, 4)
        cache = ModalForcing(FieldForcing.from_expression("t*sin(pi*x)"), modes, 1.0)
        first = cache[modes[0]]
        self.assertAlmostEqual(first(0.5), 0.5, delta=1e-12)
        self.assertAlmostEqual(first.derivative(0.3), 1.0, delta=1e-12)
        for m in modes[1:]:
            self.assertLess(np.max(np.abs(cache[m].values)), 1e-12)

    def test_difference_slopes(self):
        g = FieldForcing.from_callable(lambda x, t: t ** 2 * np.sin(np.pi * x))
        m = ModeIndex(BasisFamily.DIRICHLET_SINE, Slot.SIN, 1)
        cache = ModalForcing(g, [m], 1.0)
        self.assertAlmostEqual(cache[m].derivative(0.5), 1.0, delta=1e-10)

    def test_zero_detection(self):
        modes = family_modes(BasisFamily.ROOT_SYSTEM_X, 2)
        cache = ModalForcing(FieldForcing.zero(), modes, 1.0)
        self.assertTrue(all(cache.is_zero(m) for m in modes))


class SolveBvpTests(SimpleTestCase):
    """级数解组装测试"""

    x = np.linspace(0.0, 1.0, 11)
    t = np.linspace(0.0, 1.0, 5)

    def test_zero_forcing(self):
        for problem in ProblemKind:
            s = solve_bvp(make(problem, "0", n_modes=4))
            self.assertTrue(np.all(evaluate_grid(s, self.x, self.t) == 0.0), problem)

    def test_single_mode_dirichlet(self):
        s = solve_bvp(make(ProblemKind.P1_DIRICHLET, SINGLE_MODE[ProblemKind.P1_DIRICHLET]))
        modal = solve_modal_selfadjoint(linear(), math.pi ** 2, 0.5)
        expected = modal(self.t)[:, None] * np.sin(np.pi * self.x)[None, :]
        self.assertLess(np.max(np.abs(evaluate_grid(s, self.x, self.t) - expected)), 1e-10)
        grid = volterra_oracle(IVProblem(CFParams(0.5, -math.pi ** 2), linear()), 2048)
        self.assertAlmostEqual(eval_solution(s, 0.5, 1.0), grid(1.0), delta=1e-6)

    def test_coupled_modes_excited(self):
        s = solve_bvp(make(ProblemKind.P4_NONLOCAL, SINGLE_MODE[ProblemKind.P4_NONLOCAL]))
        cos_mode = ModeIndex(BasisFamily.ROOT_SYSTEM_X, Slot.COS, 1)
        sin_mode = ModeIndex(BasisFamily.ROOT_SYSTEM_X, Slot.ASSOC_X_SIN, 1)
        self.assertGreater(abs(s.modal_function(cos_mode)(1.0)), 1e-4)
        self.assertGreater(abs(s.modal_function(sin_mode)(1.0)), 1e-4)
        self.assertLess(abs(s.modal_function(ModeIndex(BasisFamily.ROOT_SYSTEM_X, Slot.COS, 2))(1.0)), 1e-12)

    def test_hypothesis_violation(self):
        p = make(ProblemKind.P1_DIRICHLET, "t*x")
        with self.assertRaises(HypothesisViolation) as ctx:
            solve_bvp(p)
        self.assertEqual([row.name for row in ctx.exception.report.failures()], ["g(0,t)=g(1,t)=0"])
        s = solve_bvp(p, check_hypotheses=False)
        self.assertEqual(len(s.modes), 8)

    def test_modal_compatibility(self):
        with self.assertRaises(CompatibilityError):
            solve_bvp(make(ProblemKind.P1_DIRICHLET, "sin(pi*x)"), check_hypotheses=False)

    def test_initial_condition(self):
        for problem, source in SINGLE_MODE.items():
            s = solve_bvp(make(problem, source))
            self.assertLess(np.max(np.abs(evaluate_grid(s, self.x, [0.0]))), 1e-12, problem)

    def test_boundary_values(self):
        t = self.t[1:]
        s = solve_bvp(make(ProblemKind.P1_DIRICHLET, "t*x*(1-x)"))
        self.assertLess(np.max(np.abs(evaluate_grid(s, [0.0, 1.0], t))), 1e-10)
        for problem in (ProblemKind.P3_PERIODIC, ProblemKind.P4_NONLOCAL):
            s = solve_bvp(make(problem, SINGLE_MODE[problem]))
            ends = evaluate_grid(s, [0.0, 1.0], t)
            self.assertLess(np.max(np.abs(ends[:, 0] - ends[:, 1])), 1e-10, problem)

    def test_derivative_boundary_conditions(self):
        def left_slope(s, h):
            u = eval_solution(s, np.array([0.0, h, 2 * h]), 1.0)
            return (-3 * u[0] + 4 * u[1] - u[2]) / (2 * h)

        def right_slope(s, h):
            u = eval_solution(s, np.array([1.0, 1.0 - h, 1.0 - 2 * h]), 1.0)
            return (3 * u[0] - 4 * u[1] + u[2]) / (2 * h)

        for problem in (ProblemKind.P2_NEUMANN, ProblemKind.P4_NONLOCAL):
            s = solve_bvp(make(problem, SINGLE_MODE[problem]))
            self.assertLess(abs(left_slope(s, 5e-3)), abs(left_slope(s, 1e-2)) / 3, problem)
        s = solve_bvp(make(ProblemKind.P2_NEUMANN, SINGLE_MODE[ProblemKind.P2_NEUMANN]))
        self.assertLess(abs(right_slope(s, 5e-3)), abs(right_slope(s, 1e-2)) / 3)
        s = solve_bvp(make(ProblemKind.P3_PERIODIC, SINGLE_MODE[ProblemKind.P3_PERIODIC]))
        self.assertLess(abs(left_slope(s, 1e-3) - right_slope(s, 1e-3)), 1e-4)

    def test_mode_count_convergence(self):
        g = FieldForcing.from_expression("t*x*(1-x)")
        x = np.linspace(0.0, 1.0, 21)
        t = [0.5, 1.0]
        grids = {
            n: evaluate_grid(solve_bvp(BVProblem(ProblemKind.P1_DIRICHLET, 0.5, g, 1.0, n)), x, t)
            for n in (4, 8, 16, 32, 64)
        }
        gaps = [np.max(np.abs(grids[n] - grids[2 * n])) for n in (4, 8, 16, 32)]
        self.assertTrue(all(a > b for a, b in zip(gaps, gaps[1:])), gaps)

    def test_parallel_matches_serial(self):
        p = make(ProblemKind.P3_PERIODIC, "t*x*(1-x)", n_modes=6)
        serial = evaluate_grid(solve_bvp(p, workers=1), self.x, self.t)
        parallel = evaluate_grid(solve_bvp(p, workers=4), self.x, self.t)
        self.assertTrue(np.array_equal(serial, parallel))


class EvalSolutionTests(SimpleTestCase):
    """级数解求值与二阶导数测试"""

    @classmethod
    def setUpClass(cls):
        super().setUpClass()
        cls.dirichlet = solve_bvp(make(ProblemKind.P1_DIRICHLET, SINGLE_MODE[ProblemKind.P1_DIRICHLET]))
        cls.nonlocal_ = solve_bvp(make(ProblemKind.P4_NONLOCAL, SINGLE_MODE[ProblemKind.P4_NONLOCAL]))

    def test_domain(self):
        with self.assertRaises(DomainError):
            eval_solution(self.dirichlet, 1.5, 0.5)
        with self.assertRaises(DomainError):
            eval_solution(self.dirichlet, 0.5, -0.1)
        with self.assertRaises(DomainError):
            uxx_series(self.dirichlet, 0.5, 1.5)

    def test_broadcasting(self):
        values = eval_solution(self.dirichlet, np.array([0.25, 0.5, 0.75]), 1.0)
        self.assertEqual(values.shape, (3,))
        self.assertIsInstance(eval_solution(self.dirichlet, 0.5, 1.0), float)
        self.assertAlmostEqual(values[0], values[2], delta=1e-14)

    def test_uxx_single_mode(self):
        modal = self.dirichlet.modal_function(ModeIndex(BasisFamily.DIRICHLET_SINE, Slot.SIN, 1))
        for x in (0.2, 0.5, 0.9):
            expected = -math.pi ** 2 * modal(0.8) * math.sin(math.pi * x)
            self.assertAlmostEqual(uxx_series(self.dirichlet, x, 0.8), expected, delta=1e-8)

    def test_uxx_matches_second_difference(self):
        h = 1e-3
        for s in (self.dirichlet, self.nonlocal_):
            x = np.linspace(0.1, 0.9, 9)
            second = (eval_solution(s, x + h, 0.7) - 2 * eval_solution(s, x, 0.7) + eval_solution(s, x - h, 0.7)) / h ** 2
            self.assertLess(np.max(np.abs(second - uxx_series(s, x, 0.7))), 1e-4)

    def test_uxx_second_difference_converges(self):
        x = np.linspace(0.1, 0.9, 9)
        errors = []
        for h in (4e-3, 2e-3):
            u = [eval_solution(self.nonlocal_, x + shift, 1.0) for shift in (h, 0.0, -h)]
            second = (u[0] - 2 * u[1] + u[2]) / h ** 2
            errors.append(np.max(np.abs(second - uxx_series(self.nonlocal_, x, 1.0))))
        self.assertLess(errors[1], errors[0] / 3)

    def test_direct_and_reexpressed_agree(self):
        x = np.linspace(0.0, 1.0, 7)
        for s in (self.dirichlet, self.nonlocal_):
            direct = uxx_series(s, x, 0.6, direct=True)
            self.assertLess(np.max(np.abs(direct - uxx_series(s, x, 0.6))), 1e-8)
