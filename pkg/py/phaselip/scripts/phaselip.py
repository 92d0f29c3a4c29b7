"""Script wrapper for stability experiments on phase retrieval frames.

Builds a frame and a prior set, runs one command and writes a JSON report
(plus a CSV table for scans). The exit code tells the verdict:

    0  Certified, or the command completed
    1  usage or experiment error
    2  Refuted
    3  Inconclusive

To run this script from the command line, use the ``phaselip`` script
installed from ``bin/``.
"""
from __future__ import print_function, division, absolute_import

import argparse
import os

import numpy as np

import desiutil.log

import phaselip.config
import phaselip.experiment
from phaselip.errors import PhaseLipError, UsageError, FitError
from phaselip.frames import frame_bounds
from phaselip.priors import membership_margins, sample_batch, witness_pair
from phaselip.reports import (StabilityReport, Verdict, Witness, report_write,
                              write_scan)
from phaselip.stability import (certify_lipschitz, exponent_restriction,
                                guaranteed_exponent, holder_fit, holder_scan,
                                subspace_constant)


EXIT_OK = 0
EXIT_ERROR = 1
EXIT_CODES = {Verdict.CERTIFIED: 0, Verdict.REFUTED: 2,
              Verdict.INCONCLUSIVE: 3}

# Options that map onto ExperimentSpec fields.
SPEC_OPTIONS = ('construction', 'field', 'D', 'N', 'tail', 'gamma', 'R',
                'epsilon', 'seed', 'bound', 'm', 'restarts', 'samples',
                'oversampling', 'out', 'report')


class ArgumentParser(argparse.ArgumentParser):
    """Argument parser that raises UsageError instead of exiting."""

    def error(self, message):
        raise UsageError(message)


def parse(options=None):
    """Parse command-line options for running a stability experiment.
    """
    parser = ArgumentParser(
        prog='phaselip',
        formatter_class=argparse.ArgumentDefaultsHelpFormatter)
    parser.add_argument('command', choices=phaselip.experiment.COMMANDS,
        help='operation to run')
    parser.add_argument('--verbose', action='store_true',
        help='display log messages with severity >= info')
    parser.add_argument('--debug', action='store_true',
        help='display log messages with severity >= debug (implies verbose)')
    parser.add_argument('--spec', default=None, metavar='FILE',
        help='JSON experiment file; other options override its values')
    parser.add_argument('--construction', default=None,
        help='one of {}'.format(', '.join(
            phaselip.experiment.CONSTRUCTIONS[:-1])))
    parser.add_argument('--field', default=None, choices=['real', 'complex'],
        help='scalar field of the counterexample')
    parser.add_argument('--D', type=int, default=None, metavar='D',
        help='truncation dimension')
    parser.add_argument('--N', type=int, default=None, metavar='N',
        help='dimension of V_1 of a multidimensional construction')
    parser.add_argument('--tail', type=int, default=None, metavar='T',
        help='tail basis vectors of a multidimensional construction')
    parser.add_argument('--gamma', type=float, default=None,
        help='decay exponent of the counterexample priors (default 2)')
    parser.add_argument('--R', type=float, default=None,
        help='radius of the counterexample priors (default 1)')
    parser.add_argument('--epsilon', type=float, default=None,
        help='perturbation level of perturbed bases (default 0.1)')
    parser.add_argument('--seed', type=int, default=None,
        help='random number seed, required by randomized commands')
    parser.add_argument('--bound', type=float, default=None,
        help='claimed bound to certify or refute')
    parser.add_argument('--m', default=None, metavar='M',
        help='depth "k" or depth range "a..b" of scan and subspace')
    parser.add_argument('--out', default=None, metavar='PATH',
        help='report path, or CSV path of scan')
    parser.add_argument('--report', default=None, metavar='PATH',
        help='report path overriding the one derived from --out')
    parser.add_argument('--restarts', type=int, default=None,
        help='restarts of searches instead of the configured value')
    parser.add_argument('--samples', type=int, default=None,
        help='sampled pairs of certify, or vectors of sample')
    parser.add_argument('--oversampling', type=int, default=None,
        help='vectors per dimension of random Parseval families')
    parser.add_argument('--output-path', default=None, metavar='PATH',
        help='output path to use instead of config.output_path')
    parser.add_argument('--config-file', default=None, metavar='CONFIG',
        help='input configuration file, relative to the package data '
        'directory unless absolute (default config.yaml)')

    if options is None:
        args = parser.parse_args()
    else:
        args = parser.parse_args(options)

    if args.m is not None:
        try:
            args.m = int(args.m)
        except ValueError:
            if '..' not in args.m:
                raise UsageError('--m expects "k" or "a..b", got "{}"'.format(
                    args.m))
    if args.spec is None and args.construction is None:
        raise UsageError('one of --construction or --spec is required')

    return args


def experiment(args):
    """The ExperimentSpec described by parsed options."""
    overrides = dict((key, getattr(args, key)) for key in SPEC_OPTIONS)
    overrides['command'] = args.command
    if args.spec is not None:
        return phaselip.experiment.ExperimentSpec.read(args.spec, overrides)
    values = dict((k, v) for k, v in overrides.items() if v is not None)
    return phaselip.experiment.ExperimentSpec.from_dict(values, source='options')


def _certify(spec, setup):
    if setup.prior is None:
        raise UsageError('{} needs a prior set'.format(spec.command))
    return certify_lipschitz(setup.frame, setup.prior, setup.claimed_bound,
                             spec.search_config())


def _scan(spec, setup):
    log = desiutil.log.get_logger()
    frame, C = setup.frame, setup.growth.C
    records = holder_scan(frame, spec.gamma, spec.R, C, spec.depths())
    write_scan(records, spec.scan_path())
    witnesses = []
    for record in records:
        x, y = witness_pair(record.m, spec.gamma, spec.R, C, frame.dim,
                            frame.field)
        witnesses.append(Witness(x, y, record.dq, record.dm, record.ratio,
                                 'witness:m={}'.format(record.m)))
    report = StabilityReport(frame.name, setup.prior.name, witnesses)
    try:
        fit = holder_fit(records)
        report.sigma_fit = dict(sigma=fit.sigma, residual=fit.residual)
        log.info('Fitted exponent {:.4f} against restriction {:.4f}.'.format(
            fit.sigma, exponent_restriction(spec.gamma)))
    except FitError as e:
        report.notes.append('no exponent fit: {}'.format(e))
        log.warning(report.notes[-1])
    report.info.update(exponent_restriction=exponent_restriction(spec.gamma),
                       guaranteed_exponent=guaranteed_exponent(spec.gamma))
    return report


def _bounds(spec, setup):
    A, B = frame_bounds(setup.frame)
    report = StabilityReport(setup.frame.name,
                             '' if setup.prior is None else setup.prior.name)
    report.info.update(A=A, B=B, size=setup.frame.size, dim=setup.frame.dim)
    return report


def _sample(spec, setup):
    if setup.prior is None:
        raise UsageError('sample needs a prior set')
    count = spec.samples or phaselip.experiment.DEFAULT_SAMPLE_COUNT
    rng = spec.rng(phaselip.experiment.SAMPLE_STREAM)
    F = sample_batch(setup.prior, rng, count, setup.frame.field)
    ok, margin = membership_margins(setup.prior, F)
    report = StabilityReport(setup.frame.name, setup.prior.name)
    report.info.update(count=count, members=int(np.count_nonzero(ok)),
                       min_margin=float(np.min(margin)),
                       prior=setup.prior.to_dict())
    return report


def _subspace(spec, setup):
    head_dim = 1 if setup.prior is None else setup.prior.head_dim
    depths = spec.depths(head_dim)
    cfg = spec.search_config()
    witnesses, constants = [], {}
    for m in depths:
        value, witness = subspace_constant(setup.frame, m, cfg,
                                           full_output=True)
        witnesses.append(witness)
        constants[str(m)] = value
    report = StabilityReport(setup.frame.name, '', witnesses)
    report.info.update(subspace_constants=constants)
    return report


COMMANDS = dict(certify=_certify, refute=_certify, scan=_scan, bounds=_bounds,
                sample=_sample, subspace=_subspace)


def run(spec):
    """Execute one experiment and write its report.

    Parameters
    ----------
    spec : ExperimentSpec
        A validated experiment.

    Returns
    -------
    int
        Exit code 0 (Certified or completed), 2 (Refuted) or 3
        (Inconclusive).
    """
    log = desiutil.log.get_logger()
    setup = phaselip.experiment.build(spec)
    report = COMMANDS[spec.command](spec, setup)
    info = dict(setup.info)
    info.update(report.info)
    info['experiment'] = spec.to_dict()
    info['command'] = spec.command
    report.info = info
    report.notes.extend(setup.notes)
    report_write(report, spec.report_path())
    if report.verdict is None:
        return EXIT_OK
    if report.verdict is Verdict.REFUTED:
        best = report.best
        log.info('Refuting witness {} with ratio {:.6g} > {:.6g}.'.format(
            best.label, best.ratio, report.claimed_bound))
    return EXIT_CODES[report.verdict]


def main(args):
    """Command-line driver for stability experiments.
    """
    # Set up the logger
    if args.debug:
        os.environ['DESI_LOGLEVEL'] = 'DEBUG'
        args.verbose = True
    elif args.verbose:
        os.environ['DESI_LOGLEVEL'] = 'INFO'
    else:
        os.environ['DESI_LOGLEVEL'] = 'WARNING'
    log = desiutil.log.get_logger()

    # Freeze the configuration, from the requested file if any.
    try:
        if args.config_file is not None:
            phaselip.config.Configuration.reset()
        config = phaselip.config.Configuration(file_name=args.config_file)
    except (ValueError, OSError) as e:
        log.error(str(e))
        return EXIT_ERROR
    # Set the output path if requested.
    if args.output_path is not None:
        config.set_output_path(args.output_path)

    try:
        spec = experiment(args)
        return run(spec)
    except (PhaseLipError, OSError) as e:
        log.error(str(e))
        return EXIT_ERROR
