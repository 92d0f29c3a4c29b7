"""Experiment descriptions and the frames and priors they build.

An experiment names a command, a construction and its parameters. It is
read from a JSON file, from command-line options, or both, with options
taking precedence over the file::

    {"command": "scan", "construction": "counterexample",
     "gamma": 2, "R": 1, "D": 40, "m": "5..20", "seed": 7}

Runs are reproducible: all randomness derives from ``seed``, so two runs
of the same experiment write the same reports.
"""
from __future__ import print_function, division, absolute_import

import collections
import json
import os.path

import numpy as np

import desiutil.log

from phaselip.errors import PhaseLipError, SpecError
from phaselip.hilbert import ScalarField
from phaselip.frames import Frame, frame_bounds
from phaselip.priors import PriorSet, envelope_from_G, envelope_from_beta
from phaselip.stability import SearchConfig
import phaselip.constructions as cons


CONSTRUCTIONS = ('counterexample', 'real_onedim', 'complex_onedim',
                 'real_md', 'complex_md', 'file')

ALIASES = {'real3_1': 'real_onedim', 'complex3_2': 'complex_onedim'}

COMMANDS = ('certify', 'refute', 'scan', 'bounds', 'sample', 'subspace')

# Accepted keys of an experiment file and the JSON types of their values.
FIELDS = collections.OrderedDict([
    ('command', (str,)), ('construction', (str,)), ('field', (str,)),
    ('D', (int,)), ('N', (int,)), ('tail', (int,)), ('copies', (int,)),
    ('gamma', (int, float)), ('R', (int, float)), ('epsilon', (int, float)),
    ('c', (int, float)), ('seed', (int,)), ('bound', (int, float)),
    ('m', (int, str)), ('restarts', (int,)), ('samples', (int,)),
    ('oversampling', (int,)), ('frame', (str,)), ('prior', (str,)),
    ('out', (str,)), ('report', (str,)),
])

DEFAULT_D = 16
DEFAULT_N = 4
DEFAULT_SAMPLE_COUNT = 10

# Independent random streams derived from the seed.
CONSTRUCTION_STREAM = 0
SAMPLE_STREAM = 1


Setup = collections.namedtuple(
    'Setup', ['frame', 'prior', 'claimed_bound', 'growth', 'info', 'notes'])


def parse_m(value):
    """Parse a depth "k" or an inclusive depth range "a..b".

    Returns
    -------
    list of int
        The depths.
    """
    if isinstance(value, int) and not isinstance(value, bool):
        return [value]
    text = str(value).strip()
    try:
        if '..' in text:
            lo, hi = text.split('..')
            lo, hi = int(lo), int(hi)
            if hi < lo:
                raise SpecError('m: empty range "{}"'.format(text))
            return list(range(lo, hi + 1))
        return [int(text)]
    except ValueError:
        raise SpecError('m: expected "k" or "a..b", got "{}"'.format(text))


class ExperimentSpec(object):
    """One command applied to one construction.

    Parameters
    ----------
    command : str
        One of certify, refute, scan, bounds, sample, subspace.
    construction : str
        Construction identifier, or "file" to read ``frame`` and ``prior``.
    D : int or None
        Truncation dimension. Multidimensional constructions use N + tail.
    N : int or None
        Dimension of V_1 of a multidimensional construction.
    tail : int or None
        Number of tail basis vectors of a multidimensional construction.
    field : str or None
        Scalar field. Fixed by every construction except the counterexample.
    gamma, R : float
        Decay exponent and radius of the counterexample priors.
    epsilon : float
        Perturbation level of the perturbed basis constructions.
    seed : int or None
        Seed of every random stream, required by randomized commands.
    bound : float or None
        Claimed bound, replacing the construction's own.
    m : int, str or None
        Depth or depth range "a..b" of scan and subspace.
    restarts, samples : int or None
        Overrides of the configured search settings.
    oversampling : int or None
        Vectors per dimension of random Parseval families.
    copies : int
        Rotated bases in the flat frame of a multidimensional construction.
    c : float or None
        Flatness level of a multidimensional construction.
    frame, prior : str or None
        JSON files written by :meth:`Frame.save` and
        :meth:`PriorSet.to_dict` for the "file" construction.
    out, report : str or None
        Output paths.
    """
    def __init__(self, command, construction, D=None, N=None, tail=None,
                 field=None, gamma=2., R=1., epsilon=0.1, seed=None,
                 bound=None, m=None, restarts=None, samples=None,
                 oversampling=None, copies=2, c=None, frame=None, prior=None,
                 out=None, report=None):
        self.command = command
        self.construction = ALIASES.get(construction, construction)
        self.D = D
        self.N = N
        self.tail = tail
        self.field = field
        self.gamma = gamma
        self.R = R
        self.epsilon = epsilon
        self.seed = seed
        self.bound = bound
        self.m = m
        self.restarts = restarts
        self.samples = samples
        self.oversampling = oversampling
        self.copies = copies
        self.c = c
        self.frame = frame
        self.prior = prior
        self.out = out
        self.report = report
        self.validate()

    @classmethod
    def from_dict(cls, data, source='experiment'):
        """Build from a dict, checking every key and value type."""
        values = {}
        for key, value in data.items():
            if key not in FIELDS:
                raise SpecError('{}: unknown field "{}"'.format(source, key))
            types = FIELDS[key]
            if value is None:
                continue
            if isinstance(value, bool) or not isinstance(value, types):
                raise SpecError('{}: field "{}" expects {}, got {!r}'.format(
                    source, key, ' or '.join(t.__name__ for t in types),
                    value))
            values[key] = value
        for key in 'command', 'construction':
            if key not in values:
                raise SpecError('{}: missing field "{}"'.format(source, key))
        return cls(**values)

    @classmethod
    def read(cls, path, overrides=None):
        """Read an experiment file and apply overrides.

        Parameters
        ----------
        path : str
            JSON experiment file.
        overrides : dict or None
            Values replacing those of the file. None values are ignored.

        Raises
        ------
        SpecError
            With the line and column of a syntax error, or the offending
            field.
        """
        if not os.path.exists(path):
            raise SpecError('spec: no such file {}'.format(path))
        with open(path) as f:
            text = f.read()
        try:
            data = json.loads(text)
        except ValueError as e:
            raise SpecError('{}:{}:{}: {}'.format(
                path, getattr(e, 'lineno', '?'), getattr(e, 'colno', '?'),
                getattr(e, 'msg', str(e))))
        if not isinstance(data, dict):
            raise SpecError('{}:1:1: expected a JSON object'.format(path))
        data.update({k: v for k, v in (overrides or {}).items()
                     if v is not None})
        return cls.from_dict(data, source=path)

    @property
    def multidim(self):
        return self.construction in ('real_md', 'complex_md')

    @property
    def randomized(self):
        """True when the command or the construction draws random numbers."""
        return (self.construction in ('counterexample', 'real_md', 'complex_md')
                or self.command in ('certify', 'refute', 'sample', 'subspace'))

    @property
    def scalar_field(self):
        if self.construction in ('real_onedim', 'real_md'):
            return ScalarField.REAL
        if self.construction in ('complex_onedim', 'complex_md'):
            return ScalarField.COMPLEX
        return ScalarField.get(self.field or 'real')

    def validate(self):
        """Raise SpecError naming the first invalid field."""
        if self.command not in COMMANDS:
            raise SpecError('command: expected one of {}, got "{}"'.format(
                ', '.join(COMMANDS), self.command))
        if self.construction not in CONSTRUCTIONS:
            raise SpecError('construction: expected one of {}, got "{}"'.format(
                ', '.join(CONSTRUCTIONS[:-1]), self.construction))
        if self.field is not None:
            try:
                field = ScalarField.get(self.field)
            except PhaseLipError:
                raise SpecError('field: expected real or complex, got "{}"'
                                .format(self.field))
            if field is not self.scalar_field:
                raise SpecError('field: {} is a {} construction'.format(
                    self.construction, self.scalar_field))
        if self.multidim:
            if self.N is None:
                self.N = DEFAULT_N
            if self.N < 1:
                raise SpecError('N: expected N >= 1, got {}'.format(self.N))
            if self.tail is not None:
                if self.tail < 1:
                    raise SpecError('tail: expected tail >= 1, got {}'.format(
                        self.tail))
                if self.D is not None and self.D != self.N + self.tail:
                    raise SpecError('D: {} != N + tail = {}'.format(
                        self.D, self.N + self.tail))
                self.D = self.N + self.tail
            if self.D is None:
                self.D = self.N + DEFAULT_D
            if self.D <= self.N:
                raise SpecError('D: expected D > N = {}, got {}'.format(
                    self.N, self.D))
            if self.copies < 1:
                raise SpecError('copies: expected copies >= 1, got {}'.format(
                    self.copies))
            if self.c is not None and not self.c > 0:
                raise SpecError('c: expected c > 0, got {}'.format(self.c))
        elif self.N is not None or self.tail is not None:
            raise SpecError('N: only multidimensional constructions take N '
                            'and tail')
        if self.construction == 'file':
            if self.frame is None:
                raise SpecError('frame: required by the file construction')
            for key in 'frame', 'prior':
                path = getattr(self, key)
                if path is not None and not os.path.exists(path):
                    raise SpecError('{}: no such file {}'.format(key, path))
            if self.prior is None and self.command in (
                    'certify', 'refute', 'sample'):
                raise SpecError('prior: required by {}'.format(self.command))
        elif self.D is None:
            self.D = DEFAULT_D
        if self.D is not None and self.D < 2:
            raise SpecError('D: expected D >= 2, got {}'.format(self.D))
        if not self.gamma > 1:
            raise SpecError('gamma: expected gamma > 1, got {}'.format(
                self.gamma))
        if not self.R >= 0:
            raise SpecError('R: expected R >= 0, got {}'.format(self.R))
        if not self.epsilon > 0:
            raise SpecError('epsilon: expected epsilon > 0, got {}'.format(
                self.epsilon))
        if self.seed is None and self.randomized:
            raise SpecError('seed: required for {} on {}'.format(
                self.command, self.construction))
        if self.seed is not None and self.seed < 0:
            raise SpecError('seed: expected seed >= 0, got {}'.format(
                self.seed))
        if self.bound is not None and not self.bound > 0:
            raise SpecError('bound: expected bound > 0, got {}'.format(
                self.bound))
        if self.command in ('certify', 'refute') and self.bound is None and \
                self.construction in ('counterexample', 'file'):
            raise SpecError('bound: {} on {} needs a claimed bound'.format(
                self.command, self.construction))
        if self.command == 'scan' and self.construction != 'counterexample':
            raise SpecError('construction: scan needs the counterexample '
                            'witness pairs, got {}'.format(self.construction))
        if self.m is not None:
            depths = parse_m(self.m)
            lowest = 2 if self.command == 'scan' else 1
            if self.D is not None and (min(depths) < lowest or
                                       max(depths) > self.D):
                raise SpecError('m: {} outside {}..{}'.format(
                    self.m, lowest, self.D))
        for key in 'restarts', 'oversampling':
            value = getattr(self, key)
            if value is not None and value < 1:
                raise SpecError('{}: expected {} >= 1, got {}'.format(
                    key, key, value))
        if self.samples is not None and self.samples < 0:
            raise SpecError('samples: expected samples >= 0, got {}'.format(
                self.samples))

    def depths(self, head_dim=1):
        """Depths of scan and subspace, with their defaults."""
        if self.m is not None:
            return parse_m(self.m)
        if self.command == 'scan':
            return list(range(2, self.D + 1))
        return [head_dim]

    def rng(self, stream):
        """Generator of one of the independent streams of this seed."""
        seed = 0 if self.seed is None else self.seed
        return np.random.default_rng(np.random.SeedSequence([seed, stream]))

    def search_config(self):
        """Search settings from the configuration and the overrides.

        refute runs the worst pair search only, unless samples is given.
        """
        samples = self.samples
        if samples is None and self.command == 'refute':
            samples = 0
        return SearchConfig.from_config(0 if self.seed is None else self.seed,
                                        restarts=self.restarts,
                                        samples=samples)

    def report_path(self):
        if self.report is not None:
            return self.report
        if self.command == 'scan':
            if self.out is not None:
                return os.path.splitext(self.out)[0] + '.json'
        elif self.out is not None:
            return self.out
        return 'phaselip_{}.json'.format(self.command)

    def scan_path(self):
        return self.out if self.out is not None else 'phaselip_scan.csv'

    def to_dict(self):
        """Parameters of the experiment, without output paths."""
        data = dict((key, getattr(self, key)) for key in FIELDS
                    if key not in ('out', 'report'))
        data['construction'] = self.construction
        return data


def _counterexample(spec, rng):
    field = spec.scalar_field
    counter = cons.CounterexampleSpec.generate(
        spec.D, spec.gamma, spec.R, rng, field, spec.oversampling)
    frame, G = cons.counterexample_frame(counter)
    prior = envelope_from_G(G, spec.gamma, spec.R, spec.D,
                            name='decay:gamma={:g},R={:g}'.format(spec.gamma,
                                                                  spec.R))
    info = dict(C=counter.C, gamma=spec.gamma, R=spec.R,
                upper_frame_bound_limit=1 + (1 - 4. ** -spec.D) / 3)
    return Setup(frame, prior, spec.bound, G, info, [])


def _onedim(spec):
    if spec.construction == 'real_onedim':
        kind = cons.ConstraintKind.REAL_ONEDIM
        env = cons.default_sequences(kind, spec.D, spec.epsilon)
        frame = cons.real_onedim_frame(spec.D, env)
        claimed = (1 - spec.epsilon) ** -0.5
    else:
        kind = cons.ConstraintKind.COMPLEX_ONEDIM
        env = cons.default_sequences(kind, spec.D)
        frame = cons.complex_onedim_frame(spec.D, env)
        claimed = 5.
    prior = envelope_from_beta(env.beta, spec.D, name='beta:' + kind.value)
    info = dict(epsilon=env.epsilon, margins=env.margins())
    bound = claimed if spec.bound is None else spec.bound
    return Setup(frame, prior, bound, None, info, [])


def _multidim(spec, rng):
    field = spec.scalar_field
    setup = cons.md_experiment(spec.N, spec.D, field, rng, spec.epsilon,
                               spec.copies, spec.c, spec.oversampling)
    build = cons.real_md_frame if field is ScalarField.REAL \
        else cons.complex_md_frame
    frame = build(setup.psi, setup.phi, setup.params, setup.env, spec.D, rng)
    prior = envelope_from_beta(setup.env.beta, spec.D, head_dim=spec.N,
                               name='beta:' + setup.env.kind.value)
    claimed = cons.md_claimed_bound(setup.params, spec.epsilon, field)
    lo, hi = cons.md_bounds_window(setup.params.A, spec.epsilon)
    info = dict(params=setup.params.to_dict(), margins=setup.env.margins(),
                epsilon=spec.epsilon, frame_bound_window=[lo, hi])
    bound = claimed if spec.bound is None else spec.bound
    return Setup(frame, prior, bound, None, info, list(setup.notes))


def _from_files(spec):
    frame = Frame.read(os.path.abspath(spec.frame))
    prior = None
    if spec.prior is not None:
        with open(spec.prior) as f:
            prior = PriorSet.from_dict(json.load(f))
        if prior.D != frame.dim:
            raise SpecError('prior: dimension {} != frame dimension {}'.format(
                prior.D, frame.dim))
    return Setup(frame, prior, spec.bound, None, {}, [])


def build(spec):
    """Build the frame, prior and claimed bound of an experiment.

    Parameters
    ----------
    spec : ExperimentSpec
        A validated experiment.

    Returns
    -------
    Setup
        (frame, prior, claimed_bound, growth, info, notes). ``growth`` is
        the dyadic growth function of the counterexample, else None.
    """
    log = desiutil.log.get_logger()
    rng = spec.rng(CONSTRUCTION_STREAM)
    if spec.construction == 'counterexample':
        setup = _counterexample(spec, rng)
    elif spec.construction in ('real_onedim', 'complex_onedim'):
        setup = _onedim(spec)
    elif spec.multidim:
        setup = _multidim(spec, rng)
    else:
        setup = _from_files(spec)
    A, B = frame_bounds(setup.frame)
    setup.info['frame_bounds'] = [A, B]
    log.info('Built {} with {} vectors in dim {} and frame bounds '
             '({:.9g}, {:.9g}).'.format(setup.frame.name, setup.frame.size,
                                        setup.frame.dim, A, B))
    return setup
