from django.test import SimpleTestCase, override_settings

from .conf import DEFAULTS, fd_step, get_option, panel_count
from .exceptions import AlphaSingular, CompatibilityError, DomainError, FracHeatError, NoConvergence


class SolverConfigTests(SimpleTestCase):
    """求解器配置读取测试"""

    def test_defaults_match_settings(self):
        for name, value in DEFAULTS.items():
            self.assertEqual(get_option(name), value)

    def test_override_wins(self):
        self.assertEqual(get_option('N_QUAD', 64), 64)

    @override_settings(CF_SOLVER_CONFIG={'N_QUAD': 128})
    def test_missing_key_falls_back_to_default(self):
        self.assertEqual(get_option('N_QUAD'), 128)
        self.assertEqual(get_option('PICARD_TOL'), 1e-12)

    def test_unknown_key(self):
        with self.assertRaises(KeyError):
            get_option('NO_SUCH_OPTION')

    def test_fd_step_scales_with_horizon(self):
        self.assertEqual(fd_step(0.5), 1e-6)
        self.assertEqual(fd_step(4.0), 4e-6)
        self.assertEqual(fd_step(4.0, 1e-3), 1e-3)

    def test_panel_count(self):
        self.assertEqual(panel_count(1.0), 512)
        self.assertEqual(panel_count(2.5, 4), 10)
        self.assertEqual(panel_count(0.0), 1)


class ExceptionTests(SimpleTestCase):
    """异常体系测试"""

    def test_hierarchy(self):
        self.assertTrue(issubclass(DomainError, ValueError))
        self.assertTrue(issubclass(AlphaSingular, FracHeatError))

    def test_structured_fields(self):
        error = CompatibilityError("f(0)=0", 1.0)
        self.assertEqual(error.condition, "f(0)=0")
        self.assertIn("f(0)=0", str(error))
        error = NoConvergence(200, 1e-3)
        self.assertEqual(error.iterations, 200)
