from __future__ import print_function, division, absolute_import

import json
import os.path
import unittest

import yaml

import phaselip.config
import phaselip.experiment
import phaselip.scripts.phaselip
from phaselip.errors import SpecError, UsageError
from phaselip.experiment import ExperimentSpec, parse_m
from phaselip.reports import Verdict, read_scan, report_read

from phaselip.test.base import Tester


def run(cmd):
    """Run a phaselip command line and return its exit code."""
    args = phaselip.scripts.phaselip.parse(cmd.split()[1:])
    return phaselip.scripts.phaselip.main(args)


class TestExperimentSpec(unittest.TestCase):

    def test_parse_m(self):
        self.assertEqual(parse_m(5), [5])
        self.assertEqual(parse_m('3..6'), [3, 4, 5, 6])
        with self.assertRaises(SpecError):
            parse_m('6..3')
        with self.assertRaises(SpecError):
            parse_m('a..b')

    def test_defaults(self):
        spec = ExperimentSpec('bounds', 'complex3_2')
        self.assertEqual(spec.construction, 'complex_onedim')
        self.assertEqual(spec.D, phaselip.experiment.DEFAULT_D)
        self.assertEqual(spec.report_path(), 'phaselip_bounds.json')
        spec = ExperimentSpec('bounds', 'real_md', N=3, tail=5, seed=1)
        self.assertEqual(spec.D, 8)
        self.assertEqual(ExperimentSpec('bounds', 'real_md', seed=1).D,
                         phaselip.experiment.DEFAULT_N +
                         phaselip.experiment.DEFAULT_D)
        spec = ExperimentSpec('scan', 'counterexample', seed=1,
                              out='runs/scan.csv')
        self.assertEqual(spec.report_path(), 'runs/scan.json')
        self.assertEqual(spec.depths(), list(range(2, 17)))
        self.assertNotIn('out', spec.to_dict())

    def test_invalid(self):
        with self.assertRaises(SpecError):
            ExperimentSpec('bounds', 'real_md', N=3, tail=5, D=9, seed=1)
        with self.assertRaises(SpecError):
            ExperimentSpec('bounds', 'counterexample')
        with self.assertRaises(SpecError):
            ExperimentSpec('certify', 'counterexample', seed=1)
        with self.assertRaises(SpecError):
            ExperimentSpec('scan', 'real_onedim', seed=1)
        with self.assertRaises(SpecError):
            ExperimentSpec('scan', 'counterexample', seed=1, m='1..4')
        with self.assertRaises(SpecError):
            ExperimentSpec('bounds', 'real_onedim', field='complex')
        with self.assertRaises(SpecError):
            ExperimentSpec('bounds', 'file')
        with self.assertRaises(SpecError):
            ExperimentSpec.from_dict(dict(command='bounds',
                                          construction='real_onedim',
                                          colour=1))
        with self.assertRaises(SpecError):
            ExperimentSpec.from_dict(dict(command='bounds',
                                          construction='real_onedim', D='8'))

    def test_search_config(self):
        spec = ExperimentSpec('refute', 'real_onedim', seed=4, restarts=3)
        cfg = spec.search_config()
        self.assertEqual(cfg.samples, 0)
        self.assertEqual(cfg.restarts, 3)
        self.assertEqual(cfg.seed, 4)


class TestScript(Tester):

    def test_usage(self):
        with self.assertRaises(UsageError):
            run('phaselip verify --construction real_onedim')
        with self.assertRaises(UsageError):
            run('phaselip bounds')
        with self.assertRaises(UsageError):
            run('phaselip scan --construction counterexample --m five')

    def test_bounds(self):
        code = run('phaselip bounds --construction real_onedim --D 8 '
                   '--out bounds.json')
        self.assertEqual(code, 0)
        report = report_read('bounds.json')
        self.assertEqual(report.info['size'], 8)
        self.assertEqual(report.info['command'], 'bounds')
        self.assertLessEqual(report.info['A'], report.info['B'])

    def test_certify_complex(self):
        code = run('phaselip certify --construction complex3_2 --D 8 '
                   '--restarts 2 --samples 200 --seed 7')
        self.assertEqual(code, 0)
        report = report_read('phaselip_certify.json')
        self.assertEqual(report.claimed_bound, 5.)
        self.assertIs(report.verdict, Verdict.CERTIFIED)
        self.assertEqual(report.info['experiment']['construction'],
                         'complex_onedim')

    def test_certify_real_md(self):
        """The real multidimensional frame certifies its claimed bound"""
        code = run('phaselip certify --construction real_md --N 4 --tail 12 '
                   '--epsilon 0.1 --seed 7 --restarts 8 --samples 500 '
                   '--out real_md.json')
        self.assertEqual(code, 0)
        report = report_read('real_md.json')
        self.assertIs(report.verdict, Verdict.CERTIFIED)
        self.assertLessEqual(report.max_ratio, report.claimed_bound)
        params = report.info['params']
        self.assertAlmostEqual(report.claimed_bound,
                               params['C'] / 0.9 ** 0.5, places=10)

    def test_certify_complex_md(self):
        """The complex multidimensional frame certifies its claimed bound"""
        code = run('phaselip certify --construction complex_md --N 4 '
                   '--tail 12 --epsilon 0.1 --seed 7 --restarts 4 '
                   '--samples 500 --out complex_md.json')
        self.assertEqual(code, 0)
        report = report_read('complex_md.json')
        self.assertIs(report.verdict, Verdict.CERTIFIED)
        self.assertLessEqual(report.max_ratio, report.claimed_bound)
        self.assertEqual(len(report.notes), 1)

    def test_refute_counterexample(self):
        """A bound below the witness ratios is refuted with exit code 2"""
        code = run('phaselip certify --construction counterexample --D 10 '
                   '--bound 100 --seed 7 --samples 100 --out refuted.json')
        self.assertEqual(code, 2)
        report = report_read('refuted.json')
        self.assertIs(report.verdict, Verdict.REFUTED)
        self.assertGreater(report.max_ratio, 100.)

    def test_scan(self):
        code = run('phaselip scan --construction counterexample --D 12 '
                   '--m 5..12 --seed 7 --out scan.csv')
        self.assertEqual(code, 0)
        records = read_scan('scan.csv')
        self.assertEqual([r.m for r in records], list(range(5, 13)))
        report = report_read('scan.json')
        self.assertIn('sigma', report.sigma_fit)
        self.assertEqual(len(report.witnesses), 8)
        self.assertAlmostEqual(report.info['exponent_restriction'], 2. / 3)

    def test_reproducible(self):
        """Two runs with the same seed write identical reports"""
        for name in 'a', 'b':
            code = run('phaselip scan --construction counterexample --D 8 '
                       '--seed 3 --out scan_{}.csv'.format(name))
            self.assertEqual(code, 0)
        contents = []
        for name in ('scan_a.json', 'scan_b.json', 'scan_a.csv',
                     'scan_b.csv'):
            with open(name, 'rb') as f:
                contents.append(f.read())
        self.assertEqual(contents[0], contents[1])
        self.assertEqual(contents[2], contents[3])

    def test_sample(self):
        code = run('phaselip sample --construction counterexample --D 6 '
                   '--seed 2 --samples 50')
        self.assertEqual(code, 0)
        report = report_read('phaselip_sample.json')
        self.assertEqual(report.info['members'], 50)
        self.assertGreaterEqual(report.info['min_margin'], 0.)

    def test_subspace(self):
        code = run('phaselip subspace --construction real_onedim --D 4 '
                   '--m 1..2 --seed 1 --restarts 2')
        self.assertEqual(code, 0)
        report = report_read('phaselip_subspace.json')
        self.assertEqual(sorted(report.info['subspace_constants']),
                         ['1', '2'])

    def test_spec_file(self):
        """Experiment files combine with options and report bad input"""
        with open('good.json', 'w') as f:
            json.dump(dict(command='bounds', construction='real_onedim', D=5),
                      f)
        self.assertEqual(run('phaselip bounds --spec good.json --D 6 '
                             '--out good_report.json'), 0)
        self.assertEqual(report_read('good_report.json').info['dim'], 6)
        with open('bad.json', 'w') as f:
            f.write('{"command": "bounds",\n "construction": }\n')
        with self.assertRaises(SpecError) as cm:
            ExperimentSpec.read('bad.json')
        self.assertTrue(str(cm.exception).startswith('bad.json:2:'))
        self.assertEqual(run('phaselip bounds --spec bad.json'), 1)
        with open('unknown.json', 'w') as f:
            json.dump(dict(command='bounds', construction='real_onedim',
                           colour='red'), f)
        self.assertEqual(run('phaselip bounds --spec unknown.json'), 1)
        self.assertEqual(run('phaselip bounds --spec missing.json'), 1)

    def test_errors(self):
        """Invalid experiments exit with code 1"""
        self.assertEqual(run('phaselip certify --construction counterexample '
                             '--bound 10'), 1)
        self.assertEqual(run('phaselip certify --construction counterexample '
                             '--seed 1'), 1)
        self.assertEqual(run('phaselip bounds --construction real_md --N 2 '
                             '--tail 3 --D 9 --seed 1'), 1)

    def test_file_construction(self):
        spec = ExperimentSpec('bounds', 'real_onedim', D=5)
        setup = phaselip.experiment.build(spec)
        setup.frame.save('frame.json')
        with open('prior.json', 'w') as f:
            json.dump(setup.prior.to_dict(), f)
        with open('file.json', 'w') as f:
            json.dump(dict(command='sample', construction='file',
                           frame='frame.json', prior='prior.json', seed=5,
                           samples=20), f)
        self.assertEqual(run('phaselip sample --spec file.json'), 0)
        report = report_read('phaselip_sample.json')
        self.assertEqual(report.info['members'], 20)
        self.assertEqual(report.frame_id, setup.frame.name)


class TestInconclusive(Tester):

    @classmethod
    def setUpClass(cls):
        super(TestInconclusive, cls).setUpClass()
        with open(phaselip.config.Configuration().file_name) as f:
            values = yaml.safe_load(f)
        values['search'].update(max_iters=1, patience=1000)
        cls.config_file = os.path.join(cls.tmpdir, 'short.yaml')
        with open(cls.config_file, 'w') as f:
            yaml.safe_dump(values, f)

    def test_inconclusive(self):
        """Searches stopped before convergence exit with code 3"""
        code = run('phaselip certify --construction real_onedim --D 6 '
                   '--seed 3 --restarts 2 --samples 10 --config-file {}'
                   .format(self.config_file))
        self.assertEqual(code, 3)
        self.assertEqual(phaselip.config.Configuration().file_name,
                         self.config_file)
        report = report_read('phaselip_certify.json')
        self.assertIs(report.verdict, Verdict.INCONCLUSIVE)
        self.assertFalse(report.converged)

    def test_bad_config_file(self):
        self.assertEqual(run('phaselip bounds --construction real_onedim '
                             '--config-file missing.yaml'), 1)


def test_suite():
    """Allows testing of only this module with the command::

        python setup.py test -m <modulename>
    """
    return unittest.defaultTestLoader.loadTestsFromName(__name__)
