import unittest

import numpy as np

from phaselip.errors import (DimensionError, FieldError, EmptyFrameError,
                             RankError)
from phaselip.hilbert import Vector, random_coeffs, random_vector
from phaselip.frames import (Frame, analysis, measure, measurement_distance,
                             measurement_distances, frame_operator,
                             frame_bounds, is_valid, parsevalize)

from phaselip.test.base import Tester


class TestFrames(Tester):

    def setUp(self):
        self.gen = np.random.default_rng(1)

    def test_basis(self):
        """An orthonormal basis is Parseval and measures coefficients"""
        onb = Frame(np.eye(3), labels=['onb:1', 'onb:2', 'onb:3'], name='onb')
        self.assertEqual(len(onb), 3)
        A, B = frame_bounds(onb)
        self.assertAlmostEqual(A, 1.)
        self.assertAlmostEqual(B, 1.)
        self.assertTrue(is_valid(onb))
        f = Vector([1., -2., 0.5])
        self.assertTrue(np.allclose(measure(onb, f), [1., 2., 0.5]))
        self.assertTrue(np.allclose(analysis(onb, f), f.coeffs))

    def test_bounds_oracle(self):
        """Frame bounds agree with the spectrum of the Gram matrix"""
        for trial in range(20):
            field = 'real' if trial % 2 else 'complex'
            dim = self.gen.integers(1, 5)
            size = self.gen.integers(dim, 9)
            frame = Frame(random_coeffs((size, dim), field, self.gen), field)
            gram = frame.matrix.conj() @ frame.matrix.T
            evals = np.sort(np.linalg.eigvalsh(gram))[::-1]
            A, B = frame_bounds(frame)
            self.assertAlmostEqual(B, evals[0], delta=1e-10 * evals[0])
            self.assertAlmostEqual(A, max(evals[dim - 1], 0.),
                                   delta=1e-10 * evals[0])

    def test_frame_inequality(self):
        """A |f|^2 <= sum |<f, phi>|^2 <= B |f|^2 for random f"""
        for field in 'real', 'complex':
            frame = Frame(random_coeffs((9, 4), field, self.gen), field)
            A, B = frame_bounds(frame)
            for trial in range(1000):
                f = random_vector(4, field, self.gen, unit=False)
                energy = np.sum(measure(frame, f) ** 2)
                norm2 = f.norm() ** 2
                self.assertGreaterEqual(energy, A * norm2 * (1 - 1e-10))
                self.assertLessEqual(energy, B * norm2 * (1 + 1e-10))

    def test_measurement_lipschitz(self):
        """Measurement distance is at most sqrt(B) |f - g|"""
        for field in 'real', 'complex':
            frame = Frame(random_coeffs((10, 3), field, self.gen), field)
            _, B = frame_bounds(frame)
            for trial in range(200):
                f = random_vector(3, field, self.gen, unit=False)
                g = random_vector(3, field, self.gen, unit=False)
                if trial % 2:
                    g = f + 1e-3 * g
                self.assertLessEqual(measurement_distance(frame, f, g),
                                     B ** 0.5 * (f - g).norm() * (1 + 1e-10))

    def test_frame_operator(self):
        """S f equals the synthesis of the frame coefficients of f"""
        frame = Frame(random_coeffs((7, 3), 'complex', self.gen))
        f = random_vector(3, 'complex', self.gen)
        S = frame_operator(frame)
        synthesis = analysis(frame, f) @ frame.matrix
        np.testing.assert_allclose(S @ f.coeffs, synthesis, atol=1e-12)
        np.testing.assert_allclose(S, S.conj().T)

    def test_parsevalize(self):
        for field in 'real', 'complex':
            family = Frame(random_coeffs((9, 4), field, self.gen), field)
            frame = parsevalize(family)
            A, B = frame_bounds(frame)
            self.assertAlmostEqual(A, 1., places=10)
            self.assertAlmostEqual(B, 1., places=10)
            self.assertEqual(frame.labels, family.labels)
        with self.assertRaises(RankError):
            parsevalize(Frame(np.array([[1., 0.], [2., 0.]])))

    def test_empty(self):
        empty = Frame(np.zeros((0, 3)), dim=3)
        self.assertEqual(empty.size, 0)
        self.assertFalse(is_valid(empty))
        with self.assertRaises(EmptyFrameError):
            frame_bounds(empty)
        with self.assertRaises(DimensionError):
            Frame(np.zeros((0, 3)))

    def test_measurement_invariance(self):
        """Measurements do not see a global phase"""
        frame = Frame(random_coeffs((12, 4), 'complex', self.gen))
        f = random_vector(4, 'complex', self.gen)
        self.assertLess(measurement_distance(frame, f, np.exp(1.3j) * f), 1e-14)
        g = random_vector(4, 'complex', self.gen)
        naive = np.linalg.norm(measure(frame, f) - measure(frame, g))
        self.assertAlmostEqual(measurement_distance(frame, f, g), naive,
                               places=12)

    def test_measurement_precision(self):
        """Nearly equal vectors keep the relative precision of their distance"""
        frame = Frame(np.array([[1., 0.], [0., 1.], [0.5 ** 0.5, 0.5 ** 0.5]]))
        delta = 1e-14
        f = Vector([1., delta])
        g = Vector([1., -delta])
        self.assertAlmostEqual(measurement_distance(frame, f, g) /
                               (2 ** 0.5 * delta), 1., places=10)
        F = np.array([f.coeffs, g.coeffs])
        np.testing.assert_allclose(measurement_distances(frame, F, F[::-1]),
                                   2 ** 0.5 * delta, rtol=1e-10)

    def test_compatibility(self):
        frame = Frame(np.eye(2))
        with self.assertRaises(DimensionError):
            measure(frame, Vector([1., 0., 0.]))
        with self.assertRaises(FieldError):
            measure(frame, Vector([1j, 0.]))
        with self.assertRaises(FieldError):
            frame.union(Frame(np.eye(2, dtype=complex)))
        with self.assertRaises(DimensionError):
            Frame(np.eye(2), labels=['a'])

    def test_select_union(self):
        a = Frame(np.eye(2), labels=['onb:1', 'onb:2'])
        b = Frame(np.ones((1, 2)), labels=['level:1:1'])
        both = a.union(b, name='both')
        self.assertEqual(both.size, 3)
        self.assertEqual(both.name, 'both')
        self.assertEqual(both.select('onb').size, 2)
        self.assertEqual(both.select('level').labels, ('level:1:1',))

    def test_save_read(self):
        """Save and restore a frame"""
        frame = Frame(random_coeffs((5, 3), 'complex', self.gen),
                      labels=['x:{}'.format(j) for j in range(5)], name='test')
        frame.save('frame.json')
        frame2 = Frame.read('frame.json')
        self.assertEqual(frame2.name, 'test')
        self.assertEqual(frame2.labels, frame.labels)
        self.assertTrue(np.all(frame2.matrix == frame.matrix))
        with self.assertRaises(OSError):
            frame.save('frame.json', overwrite=False)


def test_suite():
    """Allows testing of only this module with the command::

        python setup.py test -m <modulename>
    """
    return unittest.defaultTestLoader.loadTestsFromName(__name__)
