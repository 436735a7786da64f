import json
import tempfile
from io import StringIO
from pathlib import Path

import numpy as np
from django.core.management import call_command
from django.core.management.base import CommandError
from django.test import SimpleTestCase

from bvp_solver.problems import BVProblem, ProblemKind
from bvp_solver.solver import evaluate_grid, solve_bvp
from .base import normalize_config
from .output import csv_text, format_float, json_text
from .serializers import FAMILY_ALIASES


def run(*args):
    """执行管理命令，返回 (stdout, stderr)"""
    out, err = StringIO(), StringIO()
    call_command(*args, stdout=out, stderr=err)
    return out.getvalue(), err.getvalue()


def csv_rows(text):
    lines = text.splitlines()
    return lines[0], [[float(v) for v in line.split(',')] for line in lines[1:]]


class OutputTests(SimpleTestCase):
    """输出格式测试"""

    def test_float_format(self):
        self.assertEqual(format_float(0.1), '0.10000000000000001')
        self.assertEqual(format_float(np.float64(0.75)), '0.75')

    def test_csv_layout(self):
        self.assertEqual(csv_text(['t', 'u'], [(0.0, 1.0)]), 't,u\n0,1\n')

    def test_normalize_config(self):
        self.assertEqual(normalize_config({'t-max': 2, 'lambda': 1}), {'t_max': 2, 'lam': 1})

    def test_family_aliases(self):
        self.assertIn('rootsystem', FAMILY_ALIASES)

    def test_json_floats_match_csv(self):
        text = json_text({'v': 0.1, 'w': [np.float64(1e-5), 2]})
        self.assertIn('"v": 0.10000000000000001', text)
        self.assertIn(format_float(1e-5), text)
        self.assertEqual(json.loads(text)['v'], 0.1)

    def test_json_rejects_nan(self):
        with self.assertRaises(ValueError):
            json_text({'v': float('nan')})


class IvpCommandTests(SimpleTestCase):
    """ivp 命令测试"""

    ARGS = ('ivp', '--alpha', '0.5', '--lambda', '0', '--f', 't', '--t-max', '1', '--t-steps', '4')

    def assertExitCode(self, code, *args):
        with self.assertRaises(CommandError) as ctx:
            run(*args)
        self.assertEqual(ctx.exception.returncode, code)
        return str(ctx.exception)

    def test_example_rows(self):
        out, _ = run(*self.ARGS)
        header, rows = csv_rows(out)
        self.assertEqual(header, 't,u')
        self.assertEqual([row[0] for row in rows], [0.0, 0.25, 0.5, 0.75, 1.0])
        self.assertEqual(rows[0][1], 0.0)
        self.assertAlmostEqual(rows[-1][1], 0.75, delta=1e-12)

    def test_zero_forcing(self):
        out, _ = run('ivp', '--alpha', '0.3', '--lambda', '-2', '--f', '0')
        _, rows = csv_rows(out)
        self.assertEqual(len(rows), 101)
        self.assertTrue(all(row[1] == 0.0 for row in rows))

    def test_incompatible_forcing(self):
        message = self.assertExitCode(2, 'ivp', '--alpha', '0.5', '--lambda', '0', '--f', '1')
        self.assertIn('f(0)=0', message)

    def test_parse_error(self):
        self.assertExitCode(1, 'ivp', '--alpha', '0.5', '--lambda', '0', '--f', 't+')

    def test_errors_aggregated(self):
        message = self.assertExitCode(1, 'ivp', '--alpha', '2', '--lambda', '0', '--f', 't', '--t-max', '-1')
        self.assertIn('alpha', message)
        self.assertIn('t_max', message)

    def test_byte_determinism(self):
        first, _ = run(*self.ARGS, '--format', 'json')
        second, _ = run(*self.ARGS, '--format', 'json')
        self.assertEqual(first, second)
        with tempfile.TemporaryDirectory() as tmp:
            path = Path(tmp) / 'u.json'
            out, _ = run(*self.ARGS, '--format', 'json', '--out', str(path))
            self.assertEqual(out, '')
            self.assertEqual(path.read_bytes(), first.encode('utf-8'))

    def test_json_and_csv_agree(self):
        csv_out, _ = run(*self.ARGS)
        json_out, _ = run(*self.ARGS, '--format', 'json')
        for line in csv_out.splitlines()[1:]:
            _, u = line.split(',')
            self.assertIn(f'"u": {u}', json_out)

    def test_json_document(self):
        out, _ = run(*self.ARGS, '--format', 'json')
        document = json.loads(out)
        self.assertEqual(document['schema'], 1)
        self.assertEqual(document['branch'], 'LambdaZero')
        self.assertEqual(document['params']['lambda'], 0.0)
        self.assertEqual(len(document['samples']), 5)
        self.assertNotIn('oracle_max_dev', document)

    def test_oracle(self):
        out, _ = run('ivp', '--alpha', '0.5', '--lambda', '-1', '--f', 't', '--format', 'json', '--oracle')
        document = json.loads(out)
        self.assertEqual(document['branch'], 'Generic')
        self.assertLess(document['oracle_max_dev'], 1e-6)

    def test_oracle_csv_reports_on_stderr(self):
        _, err = run(*self.ARGS, '--oracle', '--oracle-steps', '256')
        self.assertIn('oracle_max_dev=', err)

    def test_oracle_needs_zero_initial_value(self):
        self.assertExitCode(1, *self.ARGS, '--u0', '1', '--oracle')

    def test_config_file(self):
        with tempfile.TemporaryDirectory() as tmp:
            path = Path(tmp) / 'cfg.json'
            path.write_text(json.dumps({'alpha': 0.5, 'lambda': 0, 'f': 't', 't-steps': 2}))
            out, _ = run('ivp', '--config', str(path))
            self.assertEqual(len(csv_rows(out)[1]), 3)
            # 命令行参数优先
            out, _ = run('ivp', '--config', str(path), '--t-steps', '4')
            self.assertEqual(len(csv_rows(out)[1]), 5)

    def test_config_unknown_key(self):
        with tempfile.TemporaryDirectory() as tmp:
            path = Path(tmp) / 'cfg.json'
            path.write_text(json.dumps({'alpha': 0.5, 'lambda': 0, 'f': 't', 'colour': 'red'}))
            message = self.assertExitCode(1, 'ivp', '--config', str(path))
            self.assertIn('colour', message)

    def test_missing_config_file(self):
        self.assertExitCode(1, 'ivp', '--config', '/nonexistent/cfg.json')


class BvpCommandTests(SimpleTestCase):
    """bvp 命令测试"""

    ARGS = ('bvp', '--problem', '1', '--alpha', '0.5', '--g', 't*sin(pi*x)', '--modes', '8',
            '--x-steps', '4', '--t-steps', '4')

    def test_grid_matches_solver(self):
        out, _ = run(*self.ARGS)
        header, rows = csv_rows(out)
        self.assertEqual(header, 'x,t,u')
        self.assertEqual(len(rows), 25)
        # t 在外层
        self.assertEqual([row[1] for row in rows[:5]], [0.0] * 5)
        self.assertEqual([row[0] for row in rows[:5]], [0.0, 0.25, 0.5, 0.75, 1.0])

        s = solve_bvp(BVProblem(ProblemKind.P1_DIRICHLET, 0.5, 't*sin(pi*x)', 1.0, 8))
        x = np.linspace(0.0, 1.0, 5)
        t = np.linspace(0.0, 1.0, 5)
        expected = evaluate_grid(s, x, t)
        actual = np.array([row[2] for row in rows]).reshape(5, 5)
        np.testing.assert_allclose(actual, expected, rtol=0, atol=1e-15)
        self.assertGreater(actual[-1, 2], 0.0)

    def test_zero_grid(self):
        out, _ = run('bvp', '--problem', '3', '--alpha', '0.5', '--g', '0', '--x-steps', '4', '--t-steps', '2')
        _, rows = csv_rows(out)
        self.assertTrue(all(row[2] == 0.0 for row in rows))

    def test_hypothesis_failure(self):
        with self.assertRaises(CommandError) as ctx:
            run('bvp', '--problem', '1', '--alpha', '0.5', '--g', 't*x', '--check-hypotheses')
        self.assertEqual(ctx.exception.returncode, 2)
        self.assertIn('g(0,t)=g(1,t)=0', str(ctx.exception))

    def test_alpha_one_rejected(self):
        with self.assertRaises(CommandError) as ctx:
            run('bvp', '--problem', '2', '--alpha', '1', '--g', 't*cos(pi*x)')
        self.assertEqual(ctx.exception.returncode, 1)

    def test_json_with_reports(self):
        out, _ = run(*self.ARGS, '--format', 'json', '--check-hypotheses', '--residual')
        document = json.loads(out)
        self.assertEqual(document['schema'], 1)
        self.assertEqual(document['config']['problem_kind'], 'P1_Dirichlet')
        self.assertTrue(document['hypothesis_report']['passed'])
        self.assertEqual(document['residual_report']['grid_spec'], {'x_count': 5, 't_count': 5, 'T': 1.0})
        self.assertEqual(np.shape(document['grid']['u']), (5, 5))

    def test_coupled_problem_byte_determinism(self):
        args = ('bvp', '--problem', '4', '--alpha', '0.5', '--g', 't*x*sin(2*pi*x)', '--modes', '4',
                '--x-steps', '8', '--t-steps', '8', '--format', 'csv')
        first, _ = run(*args)
        second, _ = run(*args)
        self.assertEqual(first.encode('utf-8'), second.encode('utf-8'))
        self.assertTrue(any(row[2] != 0.0 for row in csv_rows(first)[1]))

    def test_residual_csv_on_stderr(self):
        _, err = run(*self.ARGS, '--residual')
        self.assertIn('residual max_abs=', err)


class VerifyCommandTests(SimpleTestCase):
    """verify 命令测试"""

    @classmethod
    def setUpClass(cls):
        super().setUpClass()
        cls.tmp = tempfile.TemporaryDirectory()
        cls.solution = Path(cls.tmp.name) / 'solution.json'
        run('bvp', '--problem', '1', '--alpha', '0.5', '--g', 't*sin(pi*x)', '--modes', '8',
            '--format', 'json', '--out', str(cls.solution))

    @classmethod
    def tearDownClass(cls):
        cls.tmp.cleanup()
        super().tearDownClass()

    def verify(self, path):
        out, _ = run('verify', '--input', str(path))
        return json.loads(out)

    def test_round_trip(self):
        report = self.verify(self.solution)
        self.assertLess(report['data_defect']['max_abs'], 1e-12)
        self.assertLess(report['residual_report']['max_abs'], 1e-4)
        self.assertTrue(report['hypothesis_report']['passed'])
        self.assertTrue(report['passed'])

    def test_tampered_grid(self):
        document = json.loads(self.solution.read_text(encoding='utf-8'))
        document['grid']['u'] = (np.array(document['grid']['u']) + 0.01).tolist()
        path = Path(self.tmp.name) / 'tampered.json'
        path.write_text(json.dumps(document), encoding='utf-8')
        report = self.verify(path)
        self.assertGreater(report['data_defect']['max_abs'], 1e-3)
        # 残差在重新求解的级数解上计算，不受存储网格影响
        self.assertLess(report['residual_report']['max_abs'], 1e-4)
        self.assertFalse(report['passed'])

    def test_malformed_input(self):
        path = Path(self.tmp.name) / 'broken.json'
        path.write_text('{"config": ', encoding='utf-8')
        with self.assertRaises(CommandError) as ctx:
            self.verify(path)
        self.assertEqual(ctx.exception.returncode, 1)

        path.write_text(json.dumps({'config': {}}), encoding='utf-8')
        with self.assertRaises(CommandError) as ctx:
            self.verify(path)
        self.assertEqual(ctx.exception.returncode, 1)

    def test_zero_solution(self):
        out, _ = run('verify', '--problem', '2', '--alpha', '0.5', '--g', '0', '--x-steps', '8', '--t-steps', '8')
        report = json.loads(out)
        self.assertLess(report['residual_report']['max_abs'], 1e-14)
        self.assertNotIn('data_defect', report)
        self.assertTrue(report['passed'])

    def test_needs_problem_without_input(self):
        with self.assertRaises(CommandError) as ctx:
            run('verify', '--alpha', '0.5')
        self.assertEqual(ctx.exception.returncode, 1)
        self.assertIn('problem', str(ctx.exception))


class BasesCommandTests(SimpleTestCase):
    """bases 命令测试"""

    def test_root_system(self):
        out, _ = run('bases', '--family', 'rootsystem', '--k-max', '4')
        document = json.loads(out)
        self.assertEqual(document['family'], 'RootSystemX')
        self.assertEqual(len(document['modes']), len(document['matrix']))
        self.assertLess(document['max_off_identity'], 1e-10)

    def test_sine_family(self):
        out, _ = run('bases', '--family', 'dirichlet', '--k-max', '3')
        document = json.loads(out)
        self.assertEqual(len(document['modes']), 3)
        self.assertLess(document['max_off_identity'], 1e-10)

    def test_unknown_family(self):
        with self.assertRaises(CommandError) as ctx:
            run('bases', '--family', 'chebyshev')
        self.assertEqual(ctx.exception.returncode, 1)

    def test_csv_table(self):
        out, err = run('bases', '--family', 'neumann', '--k-max', '2', '--format', 'csv')
        lines = out.splitlines()
        self.assertEqual(lines[0], 'NeumannCosine:Primary0:0,NeumannCosine:Cos:1,NeumannCosine:Cos:2')
        self.assertEqual(len(lines), 4)
        self.assertIn('max_off_identity=', err)

    def test_basis_table_csv(self):
        out, err = run('bases', '--family', 'dirichlet', '--k-max', '2', '--table', 'basis',
                       '--x-steps', '4', '--format', 'csv')
        header, rows = csv_rows(out)
        self.assertEqual(header, 'x,DirichletSine:Sin:1,DirichletSine:Sin:2')
        self.assertEqual(len(rows), 5)
        self.assertEqual(rows[2][0], 0.5)
        self.assertAlmostEqual(rows[2][1], 1.0, delta=1e-15)
        self.assertAlmostEqual(rows[2][2], 0.0, delta=1e-15)
        self.assertTrue(err.startswith('eigenvalues=' + format_float(np.pi ** 2)))

    def test_basis_table_json(self):
        out, _ = run('bases', '--family', 'rootsystem', '--k-max', '1', '--table', 'basis', '--x-steps', '2')
        document = json.loads(out)
        self.assertEqual(document['modes'], ['RootSystemX:Primary0:0', 'RootSystemX:Cos:1', 'RootSystemX:AssocXSin:1'])
        self.assertEqual(document['x'], [0.0, 0.5, 1.0])
        self.assertEqual(np.shape(document['values']), (3, 3))
        self.assertAlmostEqual(document['values'][1][1], -1.0, delta=1e-15)
        self.assertAlmostEqual(document['eigenvalues'][1], (2 * np.pi) ** 2, delta=1e-12)
