import math

import numpy as np
from django.test import SimpleTestCase

from core.exceptions import DomainError, ParameterError
from forcing_dsl.forcing import FieldForcing
from .bases import (
    BasisFamily, ModeIndex, Slot, basis_second_derivative, biorthogonality_matrix, coefficient,
    coefficient_table, dual_mode, eigenvalue, eval_basis, expansion_matrix, family_modes, gram_matrix,
    synthesize,
)


def mode(family, slot, k):
    return ModeIndex(family, slot, k)


class ModeIndexTests(SimpleTestCase):
    """模态编号合法性测试"""

    def test_illegal_combinations(self):
        with self.assertRaises(ParameterError):
            mode(BasisFamily.DIRICHLET_SINE, Slot.COS, 1)
        with self.assertRaises(ParameterError):
            mode(BasisFamily.DIRICHLET_SINE, Slot.SIN, 0)
        with self.assertRaises(ParameterError):
            mode(BasisFamily.NEUMANN_COSINE, Slot.PRIMARY0, 2)
        with self.assertRaises(ParameterError):
            mode(BasisFamily.ROOT_SYSTEM_X, Slot.SIN, 1)
        with self.assertRaises(ParameterError):
            mode(BasisFamily.ADJOINT_SYSTEM_Y, Slot.ASSOC_X_SIN, 1)

    def test_accepts_plain_strings(self):
        m = mode('RootSystemX', 'AssocXSin', 3)
        self.assertEqual(m.slot, Slot.ASSOC_X_SIN)
        self.assertEqual(m, mode(BasisFamily.ROOT_SYSTEM_X, Slot.ASSOC_X_SIN, 3))

    def test_dual_pairing(self):
        x_sin = mode(BasisFamily.ROOT_SYSTEM_X, Slot.ASSOC_X_SIN, 2)
        self.assertEqual(dual_mode(x_sin), mode(BasisFamily.ADJOINT_SYSTEM_Y, Slot.SIN, 2))
        self.assertEqual(dual_mode(dual_mode(x_sin)), x_sin)

    def test_canonical_order(self):
        modes = family_modes(BasisFamily.ROOT_SYSTEM_X, 2)
        self.assertEqual([(m.slot, m.k) for m in modes], [
            (Slot.PRIMARY0, 0), (Slot.COS, 1), (Slot.ASSOC_X_SIN, 1), (Slot.COS, 2), (Slot.ASSOC_X_SIN, 2),
        ])
        self.assertEqual(len(family_modes(BasisFamily.DIRICHLET_SINE, 8)), 8)
        self.assertEqual(len(family_modes(BasisFamily.NEUMANN_COSINE, 8)), 9)
        self.assertEqual(len(family_modes(BasisFamily.PERIODIC_FOURIER, 8)), 17)


class EvalBasisTests(SimpleTestCase):
    """基函数求值测试"""

    def test_examples(self):
        self.assertEqual(eval_basis(mode(BasisFamily.DIRICHLET_SINE, Slot.SIN, 1), 0.5), 1.0)
        self.assertEqual(eval_basis(mode(BasisFamily.ROOT_SYSTEM_X, Slot.ASSOC_X_SIN, 1), 0.25), 0.25)
        self.assertEqual(eval_basis(mode(BasisFamily.ADJOINT_SYSTEM_Y, Slot.PRIMARY0, 0), 0.0), 2.0)

    def test_domain(self):
        with self.assertRaises(DomainError):
            eval_basis(mode(BasisFamily.DIRICHLET_SINE, Slot.SIN, 1), 1.5)

    def test_eigenvalues(self):
        self.assertAlmostEqual(eigenvalue(mode(BasisFamily.DIRICHLET_SINE, Slot.SIN, 1)), math.pi ** 2, places=12)
        self.assertEqual(eigenvalue(mode(BasisFamily.NEUMANN_COSINE, Slot.PRIMARY0, 0)), 0.0)
        self.assertAlmostEqual(eigenvalue(mode(BasisFamily.ROOT_SYSTEM_X, Slot.COS, 2)), (4 * math.pi) ** 2, places=10)
        self.assertAlmostEqual(eigenvalue(mode(BasisFamily.PERIODIC_FOURIER, Slot.SIN, 1)), (2 * math.pi) ** 2, places=12)

    def test_cosine_ode(self):
        h = 1e-3
        x = np.linspace(h, 1.0 - h, 101)
        for k in (1, 2, 3):
            m = mode(BasisFamily.ROOT_SYSTEM_X, Slot.COS, k)
            second = (eval_basis(m, x + h) - 2 * eval_basis(m, x) + eval_basis(m, x - h)) / h ** 2
            self.assertLess(np.max(np.abs(second + eigenvalue(m) * eval_basis(m, x))), 1e-4 * eigenvalue(m) ** 2)

    def test_associate_function_ode_converges(self):
        m = mode(BasisFamily.ROOT_SYSTEM_X, Slot.ASSOC_X_SIN, 1)
        w = 2 * math.pi
        x = np.linspace(0.1, 0.9, 41)
        errors = []
        for h in (1e-2, 5e-3):
            second = (eval_basis(m, x + h) - 2 * eval_basis(m, x) + eval_basis(m, x - h)) / h ** 2
            errors.append(np.max(np.abs(second + w * w * eval_basis(m, x) - 2 * w * np.cos(w * x))))
        self.assertLess(errors[1], errors[0] / 3.5)

    def test_second_derivatives_match_differences(self):
        h = 1e-4
        x = np.linspace(0.05, 0.95, 19)
        for family in BasisFamily:
            for m in family_modes(family, 2):
                second = (eval_basis(m, x + h) - 2 * eval_basis(m, x) + eval_basis(m, x - h)) / h ** 2
                exact = basis_second_derivative(m, x)
                self.assertLess(np.max(np.abs(second - exact)), 1e-3, str(m))


class CoefficientTests(SimpleTestCase):
    """系数求积测试"""

    def test_single_sine(self):
        g = FieldForcing.from_expression("sin(pi*x)")
        m = mode(BasisFamily.DIRICHLET_SINE, Slot.SIN, 1)
        # 合成归一化后系数为 2 · 1/2
        self.assertAlmostEqual(coefficient(g, m, 0.3), 1.0, delta=1e-12)
        self.assertAlmostEqual(coefficient(g, mode(BasisFamily.DIRICHLET_SINE, Slot.SIN, 2), 0.3), 0.0, delta=1e-12)

    def test_zero_forcing(self):
        g = FieldForcing.zero()
        modes = family_modes(BasisFamily.ROOT_SYSTEM_X, 4)
        table = coefficient_table(g, modes, np.linspace(0.0, 1.0, 5))
        self.assertEqual(table.shape, (5, 9))
        self.assertTrue(np.all(table == 0.0))

    def test_root_system_constant_mode(self):
        g = FieldForcing.from_expression("1")
        self.assertAlmostEqual(coefficient(g, mode(BasisFamily.ROOT_SYSTEM_X, Slot.PRIMARY0, 0), 0.0), 1.0, delta=1e-12)

    def test_time_dependence(self):
        g = FieldForcing.from_expression("t*x*sin(2*pi*x)")
        m = mode(BasisFamily.ROOT_SYSTEM_X, Slot.ASSOC_X_SIN, 1)
        values = coefficient(g, m, np.array([0.0, 0.5, 1.0]))
        self.assertLess(np.max(np.abs(values - np.array([0.0, 0.5, 1.0]))), 1e-12)

    def test_parseval_reconstruction(self):
        g = FieldForcing.from_expression("sin(pi*x)")
        m = mode(BasisFamily.DIRICHLET_SINE, Slot.SIN, 1)
        self.assertAlmostEqual(synthesize([coefficient(g, m, 0.0)], [m], 0.5), 1.0, delta=1e-10)

    def test_root_system_reconstruction(self):
        # 根函数系中的有限组合应被精确还原
        g = FieldForcing.from_expression("0.5 + cos(2*pi*x) - 3*x*sin(4*pi*x)")
        modes = family_modes(BasisFamily.ROOT_SYSTEM_X, 3)
        coeffs = coefficient_table(g, modes, [0.0])[0]
        expected = np.zeros(7)
        expected[[0, 1, 4]] = [0.5, 1.0, -3.0]
        self.assertLess(np.max(np.abs(coeffs - expected)), 1e-10)


class OrthogonalityTests(SimpleTestCase):
    """正交性与双正交性测试"""

    def test_biorthogonality(self):
        matrix = biorthogonality_matrix(16)
        self.assertEqual(matrix.shape, (33, 33))
        self.assertLess(np.max(np.abs(matrix - np.eye(33))), 1e-10)

    def test_biorthogonality_entries(self):
        matrix = biorthogonality_matrix(1)
        self.assertAlmostEqual(matrix[0, 0], 1.0, delta=1e-12)
        self.assertAlmostEqual(matrix[1, 2], 0.0, delta=1e-12)
        self.assertAlmostEqual(matrix[2, 2], 1.0, delta=1e-12)

    def test_self_adjoint_orthogonality(self):
        sines = family_modes(BasisFamily.DIRICHLET_SINE, 8)
        self.assertLess(np.max(np.abs(gram_matrix(sines, sines) - 0.5 * np.eye(8))), 1e-10)
        cosines = family_modes(BasisFamily.NEUMANN_COSINE, 8)
        expected = 0.5 * np.eye(9)
        expected[0, 0] = 1.0
        self.assertLess(np.max(np.abs(gram_matrix(cosines, cosines) - expected)), 1e-10)

    def test_expansion_matrix_is_identity(self):
        for family in BasisFamily:
            matrix = expansion_matrix(family, 6)
            self.assertLess(np.max(np.abs(matrix - np.eye(len(matrix)))), 1e-10, family)
