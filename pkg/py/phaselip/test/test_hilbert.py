import unittest

import numpy as np

from phaselip.errors import (DimensionError, FieldError, RangeError,
                             DegenerateError, NumericalError)
from phaselip.hilbert import (ScalarField, Vector, inner, project_head,
                              align_phase, quotient_distance,
                              quotient_distances, random_vector, random_pairs)


class TestHilbert(unittest.TestCase):

    def setUp(self):
        self.gen = np.random.default_rng(123)

    def test_field(self):
        """Fields convert from names and carry a dtype"""
        self.assertIs(ScalarField.get('Complex'), ScalarField.COMPLEX)
        self.assertEqual(str(ScalarField.REAL), 'real')
        self.assertEqual(ScalarField.REAL.dtype, np.float64)
        with self.assertRaises(FieldError):
            ScalarField.get('quaternion')

    def test_vector(self):
        """Basic vector arithmetic"""
        e1 = Vector.basis(1, 3)
        e2 = Vector.basis(2, 3)
        f = 3 * e1 - 4 * e2
        self.assertEqual(f.dim, 3)
        self.assertAlmostEqual(f.norm(), 5.)
        self.assertTrue(Vector.zeros(3).is_zero())
        self.assertTrue(np.all((f / 5).coeffs == [0.6, -0.8, 0.]))
        with self.assertRaises(ValueError):
            f.coeffs[0] = 1.
        with self.assertRaises(RangeError):
            Vector.basis(4, 3)
        with self.assertRaises(DimensionError):
            e1 + Vector.basis(1, 4)
        with self.assertRaises(FieldError):
            e1 + Vector.basis(1, 3, 'complex')
        with self.assertRaises(FieldError):
            Vector([1 + 1j, 0], 'real')
        with self.assertRaises(NumericalError):
            Vector([np.inf, 0.])

    def test_inner(self):
        """Inner product is conjugate-linear in its second argument"""
        f = random_vector(4, 'complex', self.gen)
        g = random_vector(4, 'complex', self.gen)
        a = 0.3 - 2j
        self.assertAlmostEqual(inner(f, a * g), np.conj(a) * inner(f, g))
        self.assertAlmostEqual(inner(a * f, g), a * inner(f, g))
        self.assertAlmostEqual(inner(f, f), f.norm() ** 2)
        self.assertIsInstance(inner(Vector.basis(1, 2), Vector.basis(1, 2)),
                              float)

    def test_project_head(self):
        f = Vector([1., 2., 3., 4.])
        self.assertTrue(np.all(project_head(f, 2).coeffs == [1., 2., 0., 0.]))
        self.assertEqual(project_head(f, 4).dim, 4)
        with self.assertRaises(RangeError):
            project_head(f, 0)

    def test_project_head_contraction(self):
        """P_m is idempotent and never increases the norm"""
        for field in 'real', 'complex':
            for trial in range(20):
                f = random_vector(6, field, self.gen, unit=False)
                m = int(self.gen.integers(1, 7))
                p = project_head(f, m)
                self.assertTrue(np.all(project_head(p, m).coeffs == p.coeffs))
                self.assertLessEqual(p.norm(), f.norm())
                self.assertAlmostEqual((f - p).norm() ** 2 + p.norm() ** 2,
                                       f.norm() ** 2, places=12)

    def test_align_phase(self):
        f = random_vector(3, 'complex', self.gen)
        alpha = np.exp(0.7j)
        self.assertAlmostEqual(align_phase(alpha * f, f), alpha)
        self.assertEqual(align_phase(Vector.basis(1, 2), Vector.basis(2, 2)), 1.)
        self.assertEqual(align_phase(Vector([1., 0.]), Vector([-2., 0.])), -1.)
        with self.assertRaises(DegenerateError):
            align_phase(f, Vector.zeros(3, 'complex'))

    def test_phase_invariance(self):
        """Distance vanishes between a vector and its phase rotations"""
        for field in 'real', 'complex':
            f = random_vector(5, field, self.gen, unit=False)
            g = random_vector(5, field, self.gen, unit=False)
            alpha = -1. if field == 'real' else np.exp(2.1j)
            self.assertLess(quotient_distance(f, alpha * f), 1e-14)
            self.assertAlmostEqual(quotient_distance(f, alpha * g),
                                   quotient_distance(f, g), places=12)
            self.assertAlmostEqual(quotient_distance(f, g),
                                   quotient_distance(g, f), places=12)

    def test_closed_form(self):
        """Distance matches sqrt(|f|^2 + |g|^2 - 2|<f,g>|)"""
        F, G = random_pairs(6, 'complex', self.gen, 50, unit=False)
        expected = np.sqrt(np.sum(np.abs(F) ** 2, axis=1) +
                           np.sum(np.abs(G) ** 2, axis=1) -
                           2 * np.abs(np.sum(F * G.conj(), axis=1)))
        np.testing.assert_allclose(quotient_distances(F, G), expected,
                                   rtol=1e-10)

    def test_mixed_arrays(self):
        """Batch distances reject a real array paired with a complex one"""
        F, _ = random_pairs(4, 'complex', self.gen, 5)
        _, G = random_pairs(4, 'real', self.gen, 5)
        with self.assertRaises(FieldError):
            quotient_distances(F, G)
        with self.assertRaises(FieldError):
            quotient_distances(G, F)
        with self.assertRaises(DimensionError):
            quotient_distances(F, F[:, :3])

    def test_unimodular_grid(self):
        """Distance is the minimum over a fine grid of unimodular scalars"""
        F, G = random_pairs(3, 'complex', self.gen, 200)
        alphas = np.exp(2j * np.pi * np.arange(20000) / 20000.)
        d = quotient_distances(F, G)
        for k in range(len(F)):
            grid = np.linalg.norm(F[k] - alphas[:, np.newaxis] * G[k], axis=1)
            self.assertLessEqual(d[k], grid.min() + 1e-12)
            self.assertAlmostEqual(grid.min() ** 2, d[k] ** 2, delta=1e-6)

    def test_real_distance(self):
        """Real distances only align by a sign"""
        f = Vector([1., 2.])
        g = Vector([-1., -2.5])
        self.assertAlmostEqual(quotient_distance(f, g), 0.5)
        self.assertAlmostEqual(quotient_distance(f, Vector([2., -1.])),
                               np.sqrt(10.))

    def test_precision(self):
        """Nearly equal vectors keep their relative distance"""
        f = Vector([1., 1e-14])
        g = Vector([1., -1e-14])
        self.assertAlmostEqual(quotient_distance(f, g) / 2e-14, 1., places=10)

    def test_dict(self):
        f = random_vector(3, 'complex', self.gen)
        data = f.to_dict()
        self.assertEqual(data['field'], 'complex')
        self.assertEqual(len(data['coeffs'][0]), 2)
        self.assertTrue(np.all(Vector.from_dict(data).coeffs == f.coeffs))
        with self.assertRaises(FieldError):
            Vector.from_dict(dict(field='complex', coeffs=[1., 2.]))


def test_suite():
    """Allows testing of only this module with the command::

        python setup.py test -m <modulename>
    """
    return unittest.defaultTestLoader.loadTestsFromName(__name__)
