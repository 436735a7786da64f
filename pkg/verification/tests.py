import math

import numpy as np
from django.test import SimpleTestCase

from bvp_solver.problems import BVProblem, ProblemKind
from bvp_solver.solver import evaluate_grid, solve_bvp, solve_modal_coupled, solve_modal_selfadjoint
from cf_operators.operators import CFParams
from core.exceptions import ParameterError
from forcing_dsl.forcing import FieldForcing, TimeForcing
from ivp_solver.solver import IVProblem, solve_ivp
from .hypotheses import INTEGRABILITY, check_hypotheses
from .residuals import ivp_residual, modal_residual, pde_residual, verify_grid

SINGLE_MODE = {
    ProblemKind.P1_DIRICHLET: "t*sin(pi*x)",
    ProblemKind.P2_NEUMANN: "t*cos(pi*x)",
    ProblemKind.P3_PERIODIC: "t*sin(2*pi*x)",
    ProblemKind.P4_NONLOCAL: "t*x*sin(2*pi*x)",
}


def make(problem, source, n_modes=8):
    return BVProblem(problem, 0.5, FieldForcing.from_expression(source), 1.0, n_modes)


class HypothesisTests(SimpleTestCase):
    """定理条件检查测试"""

    def test_all_pass(self):
        report = check_hypotheses(make(ProblemKind.P1_DIRICHLET, "t*sin(pi*x)"))
        self.assertTrue(report.passed)
        self.assertEqual(
            [row.name for row in report.rows],
            ["g(x,0)=0", "g(0,t)=g(1,t)=0", "g_t∈L1[0,T]", "g_x∈L2[0,1]"],
        )

    def test_initial_value_violation(self):
        report = check_hypotheses(make(ProblemKind.P1_DIRICHLET, "sin(pi*x)"))
        self.assertEqual([row.name for row in report.failures()], ["g(x,0)=0"])
        self.assertAlmostEqual(report.rows[0].measured, 1.0, delta=1e-12)

    def test_periodicity_violation(self):
        report = check_hypotheses(make(ProblemKind.P4_NONLOCAL, "t*x"))
        failures = report.failures()
        self.assertEqual([row.name for row in failures], ["g(0,t)=g(1,t)"])
        self.assertAlmostEqual(failures[0].measured, 1.0, delta=1e-12)
        self.assertEqual(failures[0].required_by, 'P4_NonLocal')

    def test_neumann_rows(self):
        report = check_hypotheses(make(ProblemKind.P2_NEUMANN, "t*cos(pi*x)"))
        self.assertEqual(len(report.rows), 3)
        self.assertTrue(report.passed)

    def test_integrability_reported(self):
        report = check_hypotheses(make(ProblemKind.P3_PERIODIC, "t*sin(2*pi*x)"))
        rows = [row for row in report.rows if row.kind == INTEGRABILITY]
        self.assertEqual(len(rows), 2)
        # ∫₀¹ |sin 2πx| 关于 t 的积分在 x = 1/4 处取最大值 1
        self.assertAlmostEqual(rows[0].measured, 1.0, delta=1e-9)
        self.assertTrue(all(math.isfinite(row.measured) for row in rows))

    def test_domain_failure_is_reported(self):
        report = check_hypotheses(make(ProblemKind.P1_DIRICHLET, "log(t)*sin(pi*x)"))
        self.assertFalse(report.passed)
        self.assertEqual(report.rows[0].measured, math.inf)

    def test_idempotent(self):
        p = make(ProblemKind.P4_NONLOCAL, "t*x*sin(2*pi*x)")
        self.assertEqual(check_hypotheses(p), check_hypotheses(p))
        self.assertEqual(check_hypotheses(p).to_dict()['problem'], 'P4_NonLocal')


class PdeResidualTests(SimpleTestCase):
    """PDE 残差与网格加密测试"""

    def test_zero_solution(self):
        s = solve_bvp(make(ProblemKind.P1_DIRICHLET, "0", n_modes=4))
        report = pde_residual(s, FieldForcing.zero(), (9, 9, 1.0))
        self.assertLess(report.max_abs, 1e-12)
        self.assertEqual(report.grid.shape, (9, 9))
        self.assertEqual(report.nodes, 7 * 8)

    def assert_refines(self, problem):
        g = FieldForcing.from_expression(SINGLE_MODE[problem])
        s = solve_bvp(make(problem, SINGLE_MODE[problem]))
        coarse = pde_residual(s, g, (33, 33, 1.0))
        self.assertLess(coarse.max_abs, 1e-4, problem)
        self.assertAlmostEqual(coarse.max_abs, float(np.max(coarse.grid)), delta=0.0)
        fine = pde_residual(s, g, (65, 65, 1.0), n_quad=1024, h_fd=5e-7)
        self.assertLess(fine.max_abs, max(coarse.max_abs / 2, 1e-8), problem)

    def test_dirichlet(self):
        self.assert_refines(ProblemKind.P1_DIRICHLET)

    def test_neumann(self):
        self.assert_refines(ProblemKind.P2_NEUMANN)

    def test_periodic(self):
        self.assert_refines(ProblemKind.P3_PERIODIC)

    def test_nonlocal(self):
        self.assert_refines(ProblemKind.P4_NONLOCAL)

    def test_wrong_forcing_detected(self):
        s = solve_bvp(make(ProblemKind.P1_DIRICHLET, SINGLE_MODE[ProblemKind.P1_DIRICHLET]))
        wrong = FieldForcing.from_expression("1.1*t*sin(pi*x)")
        self.assertGreater(pde_residual(s, wrong, (17, 9, 1.0)).max_abs, 1e-2)

    def test_grid_spec_validation(self):
        s = solve_bvp(make(ProblemKind.P1_DIRICHLET, "0", n_modes=2))
        with self.assertRaises(ParameterError):
            pde_residual(s, FieldForcing.zero(), (2, 9, 1.0))


class ModalResidualTests(SimpleTestCase):
    """模态方程残差与负对照"""

    t_grid = np.linspace(0.0, 1.0, 33)

    def test_zero(self):
        zero = TimeForcing.zero()
        u = solve_modal_selfadjoint(zero, math.pi ** 2, 0.5)
        self.assertEqual(modal_residual(u, zero, math.pi ** 2, 0.5, self.t_grid).max_abs, 0.0)

    def test_closed_form(self):
        g = TimeForcing.from_expression("t")
        mu = math.pi ** 2
        u = solve_modal_selfadjoint(g, mu, 0.5)
        passing = modal_residual(u, g, mu, 0.5, self.t_grid)
        self.assertLess(passing.max_abs, 1e-6)

        wrong = solve_modal_selfadjoint(g, 2 * mu, 0.5)
        self.assertGreater(modal_residual(wrong, g, mu, 0.5, self.t_grid).max_abs, 1e-2)

        def perturbed(t):
            return u(t) + 1e-3 * np.asarray(t)

        shifted = modal_residual(perturbed, g, mu, 0.5, self.t_grid)
        self.assertGreater(shifted.max_abs - passing.max_abs, 1e-4)

    def test_coupled_right_side(self):
        g2 = TimeForcing.from_expression("t")
        u1, u2 = solve_modal_coupled(TimeForcing.zero(), g2, 1, 0.5)
        combined = TimeForcing.from_callable(lambda t: 4 * math.pi * u2(t))
        mu = (2 * math.pi) ** 2
        self.assertLess(modal_residual(u1, combined, mu, 0.5, self.t_grid).max_abs, 1e-6)
        self.assertLess(modal_residual(u2, g2, mu, 0.5, self.t_grid).max_abs, 1e-6)


class IvpResidualTests(SimpleTestCase):
    """初值问题积分形式残差"""

    def test_closed_forms(self):
        cases = [
            (0.5, 1.0, "t", 0.0),
            (0.5, 1.0, "-2 + t", 2.0),
            (0.5, 2.0, "t^2", 0.0),
            (0.25, -5.0, "sin(t)", 0.0),
        ]
        t_grid = np.linspace(0.0, 1.0, 17)
        for alpha, lam, source, u0 in cases:
            problem = IVProblem(CFParams(alpha, lam), TimeForcing.from_expression(source), u0)
            report = ivp_residual(problem, solve_ivp(problem), t_grid)
            self.assertLess(report.max_abs, 1e-8, msg=source)

    def test_wrong_solution(self):
        problem = IVProblem(CFParams(0.5, 1.0), TimeForcing.from_expression("t"))
        wrong = solve_ivp(IVProblem(CFParams(0.5, 0.5), TimeForcing.from_expression("t")))
        self.assertGreater(ivp_residual(problem, wrong, np.linspace(0.0, 1.0, 9)).max_abs, 1e-2)


class VerifyGridTests(SimpleTestCase):
    """存储网格的数据偏差"""

    def test_tampered_grid(self):
        s = solve_bvp(make(ProblemKind.P1_DIRICHLET, SINGLE_MODE[ProblemKind.P1_DIRICHLET], n_modes=4))
        x = np.linspace(0.0, 1.0, 9)
        t = np.linspace(0.0, 1.0, 5)
        u = evaluate_grid(s, x, t)
        self.assertEqual(verify_grid(s, x, t, u).max_abs, 0.0)
        report = verify_grid(s, x, t, u + 0.01)
        self.assertAlmostEqual(report.max_abs, 0.01, delta=1e-12)
        self.assertEqual(report.grid.shape, (9, 5))
        with self.assertRaises(ParameterError):
            verify_grid(s, x, t, u.T)
