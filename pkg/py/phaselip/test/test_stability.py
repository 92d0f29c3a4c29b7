import unittest

import numpy as np

from phaselip.errors import (DegenerateError, FieldError, FitError,
                             RangeError, SpecError)
from phaselip.hilbert import (Vector, align_phase, inner, random_coeffs,
                              random_vector)
from phaselip.frames import Frame
from phaselip.priors import PriorSet
from phaselip.reports import Verdict, Witness
from phaselip.constructions import default_sequences, real_onedim_frame
from phaselip.stability import (SearchConfig, exponent_restriction,
                                guaranteed_exponent, stability_ratio,
                                worst_pair_search, subspace_constant,
                                real_lipschitz_constant,
                                holder_fit, holder_constant,
                                holder_to_lip_check, certify_lipschitz,
                                certify_holder, orthogonal_reduction_check)

from phaselip.test.base import Tester


class TestStability(Tester):

    def setUp(self):
        self.gen = np.random.default_rng(11)
        self.frame = Frame(random_coeffs((8, 3), 'real', self.gen),
                           name='random')
        self.B = PriorSet(3, [0.5, 0.25], name='test')

    def config(self, **kwargs):
        values = dict(restarts=4, max_iters=150, step_init=0.5,
                      step_shrink=0.5, tol=1e-3, seed=21)
        values.update(kwargs)
        return SearchConfig(**values)

    def test_exponents(self):
        self.assertAlmostEqual(exponent_restriction(2.), 2. / 3)
        self.assertAlmostEqual(guaranteed_exponent(2.), 0.5)
        for gamma in 1.5, 2., 3., 10.:
            self.assertLess(guaranteed_exponent(gamma),
                            exponent_restriction(gamma))

    def test_search_config(self):
        with self.assertRaises(SpecError):
            self.config(seed=None)
        with self.assertRaises(SpecError):
            self.config(step_shrink=1.)
        with self.assertRaises(SpecError):
            self.config(restarts=0)
        cfg = SearchConfig.from_config(5, restarts=3, samples=None)
        self.assertEqual(cfg.restarts, 3)
        self.assertEqual(cfg.samples, 10000)
        self.assertEqual(cfg.threads, 1)
        self.assertEqual(SearchConfig.from_config(5, 'family_search').samples, 0)

    def test_ratio_invariance(self):
        """Stability ratios ignore global phases and common scalings"""
        frame = Frame(random_coeffs((10, 3), 'complex', self.gen))
        f = random_vector(3, 'complex', self.gen)
        g = random_vector(3, 'complex', self.gen)
        ratio = stability_ratio(frame, f, g).ratio
        self.assertAlmostEqual(stability_ratio(frame, f, np.exp(0.4j) * g)
                               .ratio, ratio, places=10)
        self.assertAlmostEqual(stability_ratio(frame, 3. * f, 3. * g).ratio,
                               ratio, places=10)
        self.assertEqual(stability_ratio(frame, f, f).ratio, 0.)
        with self.assertRaises(DegenerateError):
            stability_ratio(frame, Vector.zeros(3, 'complex'),
                            Vector.zeros(3, 'complex'))

    def test_injectivity_violation(self):
        """A basis does not separate real sign flips"""
        onb = Frame(np.eye(2), name='onb')
        dq, dm, ratio = stability_ratio(onb, Vector([1., 1.]),
                                        Vector([1., -1.]))
        self.assertAlmostEqual(dq, 2.)
        self.assertEqual(dm, 0.)
        self.assertEqual(ratio, np.inf)

    def test_worst_pair_search(self):
        report = worst_pair_search(self.frame, self.B, self.config())
        self.assertEqual(len(report.history), 4)
        self.assertTrue(np.all(np.diff(report.history) >= 0))
        self.assertEqual(report.max_ratio, report.history[-1])
        self.assertEqual(report.info['restarts_run'], 4)
        self.assertEqual(report.prior_id, 'test')
        ratios = [w.ratio for w in report.witnesses]
        self.assertEqual(ratios, sorted(ratios, reverse=True))
        with self.assertRaises(SpecError):
            worst_pair_search(self.frame, PriorSet(4, [0.5, 0.2, 0.1]),
                              self.config())

    def test_seed_pairs(self):
        """Seed pairs are evaluated and stop the search when above target"""
        onb = Frame(np.eye(3), name='onb')
        seeds = [(Vector([1., 0.3, 0.]), Vector([1., -0.3, 0.]))]
        report = worst_pair_search(onb, self.B, self.config(), seeds=seeds,
                                   stop_ratio=10.)
        self.assertEqual(report.best.label, 'seed:0')
        self.assertTrue(report.best.injectivity_violation)
        self.assertEqual(report.info['restarts_run'], 0)

    def test_thread_determinism(self):
        """Results do not depend on the number of threads"""
        one = worst_pair_search(self.frame, self.B, self.config(threads=1))
        two = worst_pair_search(self.frame, self.B, self.config(threads=2))
        self.assertEqual(one.max_ratio, two.max_ratio)
        self.assertEqual(one.history, two.history)
        self.assertEqual(one.to_dict(), two.to_dict())

    def test_subspace_constant(self):
        """A real basis is stable on V_1 and not on V_2"""
        onb = Frame(np.eye(2), name='onb')
        cfg = self.config(max_iters=300)
        self.assertAlmostEqual(subspace_constant(onb, 1, cfg), 1.)
        value, witness = subspace_constant(onb, 2, cfg, full_output=True)
        self.assertGreater(value, 100.)
        self.assertAlmostEqual(witness.f.norm(), 1.)
        self.assertLessEqual(witness.g.norm(), 1. + 1e-12)
        self.assertLess(abs(inner(witness.f, witness.g)), 1e-12)
        with self.assertRaises(RangeError):
            subspace_constant(onb, 0, cfg)
        with self.assertRaises(RangeError):
            subspace_constant(onb, 3, cfg)

    def test_real_lipschitz_constant(self):
        """Partition enumeration gives the exact constant of real frames"""
        self.assertAlmostEqual(real_lipschitz_constant(Frame(np.eye(1))), 1.)
        self.assertEqual(real_lipschitz_constant(Frame(np.eye(2))), np.inf)
        three = Frame(np.array([[1., 0.], [0., 1.], [0.5 ** 0.5, 0.5 ** 0.5]]))
        self.assertAlmostEqual(real_lipschitz_constant(three),
                               (1 - 0.5 ** 0.5) ** -0.5, places=10)
        with self.assertRaises(FieldError):
            real_lipschitz_constant(Frame(np.eye(2, dtype=complex)))
        with self.assertRaises(RangeError):
            real_lipschitz_constant(Frame(random_coeffs((21, 3), 'real',
                                                        self.gen)))

    def test_real_constant_bounds_search(self):
        """Searches and random pairs never exceed the exact constant"""
        C = real_lipschitz_constant(self.frame, chunk=16)
        self.assertTrue(np.isfinite(C))
        self.assertLessEqual(subspace_constant(self.frame, 3, self.config()),
                             C * (1 + 1e-9))
        for trial in range(200):
            f = random_vector(3, 'real', self.gen, unit=False)
            g = random_vector(3, 'real', self.gen, unit=False)
            self.assertLessEqual(stability_ratio(self.frame, f, g).ratio,
                                 C * (1 + 1e-9))

    def test_holder_fit(self):
        """The fit recovers the exponent of synthetic power laws"""
        dm = 2. ** -np.arange(1, 11)
        records = [(3. * x ** 0.6, x) for x in dm] + [(0., 1.)]
        fit = holder_fit(records)
        self.assertAlmostEqual(fit.sigma, 0.6, places=10)
        self.assertLess(fit.residual, 1e-10)
        with self.assertRaises(FitError):
            holder_fit(records[:2])

    def test_holder_constant(self):
        e1, e2 = Vector.basis(1, 2), Vector.basis(2, 2)
        witnesses = [Witness(e1, e2, 1., 0.25)]
        self.assertAlmostEqual(holder_constant(witnesses, 1.), 4.)
        self.assertAlmostEqual(holder_constant(witnesses, 0.5), 2. ** 0.5)
        with self.assertRaises(FitError):
            holder_constant([], 0.5)
        with self.assertRaises(RangeError):
            holder_constant(witnesses, 1.5)

    def test_holder_to_lip(self):
        """Hoelder stability on orthogonal pairs implies the Lipschitz bound"""
        frame = Frame(random_coeffs((12, 4), 'real', self.gen))
        witnesses = []
        for k in range(50):
            f = random_vector(4, 'real', self.gen)
            g = random_vector(4, 'real', self.gen, unit=False)
            g = (g - inner(g, f) * f) * self.gen.uniform(0.1, 1.)
            g = g / max(g.norm(), 1.)
            dq, dm, _ = stability_ratio(frame, f, g)
            witnesses.append(Witness(f, g, dq, dm))
        self.assertTrue(holder_to_lip_check(witnesses, 0.5))
        self.assertTrue(holder_to_lip_check(witnesses, 1.))

    def test_holder_to_lip_perturbed_basis(self):
        """Orthogonal pairs of the perturbed real basis pass the check"""
        D = 8
        frame = real_onedim_frame(D, default_sequences('real_onedim', D, 0.1))
        witnesses = []
        for k in range(100):
            f = random_vector(D, 'real', self.gen)
            g = random_vector(D, 'real', self.gen, unit=False)
            g = g - inner(g, f) * f
            g = g * self.gen.uniform(0.05, 1.) / g.norm()
            dq, dm, _ = stability_ratio(frame, f, g)
            witnesses.append(Witness(f, g, dq, dm))
        for sigma in 0.25, 0.5, 0.75, 1.:
            self.assertTrue(holder_to_lip_check(witnesses, sigma))

    def test_holder_to_lip_negative(self):
        """Pairs that are not orthogonal can break the implication"""
        e1, e2 = Vector.basis(1, 2), Vector.basis(2, 2)
        witnesses = [Witness(e1, e2, 1., 1.), Witness(e1, e2, 1e-3, 1e-4)]
        self.assertFalse(holder_to_lip_check(witnesses, 0.5))
        witnesses.append(Witness(e1, e2, 1., 0.))
        self.assertFalse(holder_to_lip_check(witnesses, 1.))

    def test_orthogonal_reduction(self):
        """Every independent pair reduces to an orthogonal pair"""
        for field in 'real', 'complex':
            frame = Frame(random_coeffs((10, 3), field, self.gen))
            for trial in range(10):
                f = random_vector(3, field, self.gen, unit=False)
                g = random_vector(3, field, self.gen, unit=False)
                result = orthogonal_reduction_check(frame, f, g)
                _, dm, _ = stability_ratio(frame, f, g)
                self.assertTrue(result.found)
                self.assertLess(abs(inner(result.f, result.g)),
                                1e-3 * result.f.norm() * result.g.norm())
                self.assertLessEqual(result.dm, dm * (1 + 1e-3))
        f = random_vector(3, 'complex', self.gen)
        with self.assertRaises(DegenerateError):
            orthogonal_reduction_check(frame, f, 1j * f)

    def test_reduction_origin(self):
        """The reduced pair is (r u + v, r u - v) at the grid origin"""
        for field in 'real', 'complex':
            frame = Frame(random_coeffs((10, 3), field, self.gen))
            f = random_vector(3, field, self.gen, unit=False)
            g = random_vector(3, field, self.gen, unit=False)
            h = (align_phase(f, g) * g).coeffs
            u, v = (f.coeffs + h) / 2, (f.coeffs - h) / 2
            r = np.linalg.norm(v) / np.linalg.norm(u)
            result = orthogonal_reduction_check(frame, f, g, grid_size=50)
            self.assertTrue(result.found)
            np.testing.assert_allclose(result.f.coeffs, r * u + v, atol=1e-12)
            np.testing.assert_allclose(result.g.coeffs, r * u - v, atol=1e-12)
            self.assertAlmostEqual(result.dq, stability_ratio(frame, f, g).dq,
                                   places=10)

    def test_certify(self):
        """Certified only when converged, Inconclusive otherwise"""
        report = certify_lipschitz(self.frame, self.B, 1e6,
                                   self.config(max_iters=300, samples=500))
        self.assertIs(report.verdict, Verdict.CERTIFIED)
        self.assertEqual(report.claimed_bound, 1e6)
        self.assertEqual(report.info['samples'], 500)
        report = certify_lipschitz(self.frame, self.B, 1e6,
                                   self.config(max_iters=1, patience=100))
        self.assertIs(report.verdict, Verdict.INCONCLUSIVE)
        self.assertFalse(report.converged)
        with self.assertRaises(SpecError):
            certify_lipschitz(self.frame, self.B, 0., self.config())

    def test_certify_holder(self):
        report = certify_holder(self.frame, self.B, 0.5, 1e6,
                                self.config(max_iters=300))
        self.assertEqual(report.exponent, 0.5)
        self.assertIsNot(report.verdict, Verdict.REFUTED)
        with self.assertRaises(RangeError):
            certify_holder(self.frame, self.B, 0., 1., self.config())


def test_suite():
    """Allows testing of only this module with the command::

        python setup.py test -m <modulename>
    """
    return unittest.defaultTestLoader.loadTestsFromName(__name__)
