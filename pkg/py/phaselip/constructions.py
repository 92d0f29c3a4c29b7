"""Generate the frames and sequence families of the stability experiments.

Four families of frames are built here:

* the counterexample frame, the union of an orthonormal basis and
  scaled stable Parseval frames of the nested spaces V_n, which is not
  Lipschitz stable on the sets of decaying vectors;
* perturbed bases with a one-dimensional core, e_1 and alpha_n e_1 + e_n,
  (real) or alpha_n e_1 + e_n and alpha_n e_1 + i e_n (complex);
* multidimensional versions where a frame psi of V_1 is joined by flat
  frames phi of V_1 perturbing a tail basis.

The perturbation sizes alpha_n and the tail envelopes beta_n are held by a
:class:`SequenceEnvelope` that knows the inequalities they must satisfy.
"""
from __future__ import print_function, division, absolute_import

import collections
import enum

import numpy as np

import scipy.stats

import desiutil.log

import phaselip.config
from phaselip.errors import (ConstraintError, SpecError, FlatnessError,
                             RankError)
from phaselip.hilbert import ScalarField, random_coeffs
from phaselip.frames import Frame, frame_bounds, parsevalize
from phaselip.priors import DyadicGrowth
from phaselip.stability import (MAX_PARTITION_SIZE, SearchConfig,
                                real_lipschitz_constant, subspace_constant)


# Tolerance for level families to count as Parseval.
PARSEVAL_TOL = 1e-8

# Tolerance of the frame bound windows of the multidimensional frames.
BOUNDS_TOL = 1e-6

# Factor applied to search estimates of stability constants used in bounds.
ESTIMATE_INFLATION = 1.25


FlatnessResult = collections.namedtuple('FlatnessResult',
                                        ['passed', 'worst_density'])

MDSetup = collections.namedtuple('MDSetup',
                                 ['psi', 'phi', 'params', 'env', 'notes'])


class ConstraintKind(enum.Enum):
    """Inequality system a sequence envelope has to satisfy."""
    REAL_ONEDIM = 'real_onedim'
    COMPLEX_ONEDIM = 'complex_onedim'
    REAL_MULTIDIM = 'real_md'
    COMPLEX_MULTIDIM = 'complex_md'

    @property
    def field(self):
        if self in (ConstraintKind.REAL_ONEDIM, ConstraintKind.REAL_MULTIDIM):
            return ScalarField.REAL
        return ScalarField.COMPLEX

    @property
    def multidim(self):
        return self in (ConstraintKind.REAL_MULTIDIM,
                        ConstraintKind.COMPLEX_MULTIDIM)


class MDParams(object):
    """Constants of a multidimensional construction.

    Parameters
    ----------
    N : int
        Dimension of V_1.
    C : float
        Lipschitz stability constant of psi on V_1. The complex
        construction uses the squared-distance constant C^2.
    A, B : float
        Common frame bounds of the psi and phi families.
    c : float
        Flatness level.
    kappa : float
        Flatness density constant.
    J_size, I_size : int
        Number of phi and psi vectors.
    """
    def __init__(self, N, C, A, B, c, kappa, J_size, I_size):
        self.N = int(N)
        self.C = float(C)
        self.A = float(A)
        self.B = float(B)
        self.c = float(c)
        self.kappa = float(kappa)
        self.J_size = int(J_size)
        self.I_size = int(I_size)
        self.check()

    def check(self):
        if not 0 < self.A <= self.B <= 1 + PARSEVAL_TOL:
            raise SpecError('Expected 0 < A <= B <= 1, got A={}, B={}.'.format(
                self.A, self.B))
        if not self.c > 0:
            raise SpecError('Expected c > 0, got {}.'.format(self.c))
        if not self.kappa >= 1:
            raise SpecError('Expected kappa >= 1, got {}.'.format(self.kappa))
        if not self.C >= 1:
            raise SpecError('Expected C >= 1, got {}.'.format(self.C))
        if self.N < 1 or self.J_size < 1 or self.I_size < 1:
            raise SpecError('N, |J| and |I| must be positive.')

    @property
    def squared_constant(self):
        return self.C ** 2

    def to_dict(self):
        return dict(N=self.N, C=self.C, A=self.A, B=self.B, c=self.c,
                    kappa=self.kappa, J_size=self.J_size, I_size=self.I_size)


class SequenceEnvelope(object):
    """Sequences alpha_n and beta_n, n >= 2, of a construction.

    Parameters
    ----------
    epsilon : float or None
        Perturbation level, unused by the complex one-dimensional kind.
    alpha, beta : array_like
        Values for n = 2, 3, ...; ``alpha[0]`` is alpha_2.
    kind : ConstraintKind
        Inequality system to check.
    params : MDParams or None
        Constants of a multidimensional kind.
    check : bool
        Validate the inequalities. Only tests of degenerate envelopes
        should pass False.
    """
    def __init__(self, epsilon, alpha, beta, kind, params=None, check=True):
        self.epsilon = None if epsilon is None else float(epsilon)
        self.alpha = np.array(alpha, dtype=float)
        self.beta = np.array(beta, dtype=float)
        self.kind = ConstraintKind(kind)
        self.params = params
        if len(self.alpha) != len(self.beta):
            raise ConstraintError('alpha and beta lengths differ.')
        if self.kind.multidim and params is None:
            raise ConstraintError('{} needs MDParams.'.format(self.kind.value))
        if check:
            self.check()

    @property
    def n_max(self):
        """Largest index n covered by the sequences."""
        return len(self.alpha) + 1

    def alpha_at(self, n):
        return self.alpha[n - 2]

    def beta_at(self, n):
        return self.beta[n - 2]

    def bounds(self):
        """Bounds on sum(alpha) (or sum(alpha^2)) and on each beta_n.

        Returns
        -------
        tuple
            (sum_bound, beta_bounds, strict) where ``strict`` tells whether
            the sum inequality is strict.
        """
        eps, alpha = self.epsilon, self.alpha
        if self.kind is ConstraintKind.REAL_ONEDIM:
            return eps / 2, alpha / 2, True
        if self.kind is ConstraintKind.COMPLEX_ONEDIM:
            return 1. / 200, alpha ** 2 / 2, True
        p = self.params
        if self.kind is ConstraintKind.REAL_MULTIDIM:
            return (eps / (4 * p.C * np.sqrt(p.J_size)),
                    2. ** -6 * p.c ** 2 * alpha, True)
        bound = (eps ** 2 / (11. * p.J_size * p.c ** 2) *
                 min(1. / p.squared_constant, p.c ** 2 / (64. * p.kappa)))
        return bound, 2. ** -6 * p.c ** 2 / np.sqrt(p.N) * alpha, False

    def sums(self):
        if self.kind is ConstraintKind.COMPLEX_MULTIDIM:
            return float(np.sum(self.alpha ** 2))
        return float(np.sum(self.alpha))

    def check(self):
        """Raise ConstraintError unless every inequality holds."""
        if len(self.alpha) == 0:
            raise ConstraintError('Empty sequences.')
        for name, seq in (('alpha', self.alpha), ('beta', self.beta)):
            if not np.all(seq > 0) or np.any(np.diff(seq) >= 0):
                raise ConstraintError(
                    '{} must be positive and strictly decreasing.'.format(name))
        if self.kind is not ConstraintKind.COMPLEX_ONEDIM:
            upper = 1. / 8
            if self.kind is ConstraintKind.COMPLEX_MULTIDIM:
                upper = min(upper, self.params.A)
            if self.epsilon is None or not 0 < self.epsilon < upper:
                raise ConstraintError('epsilon={} outside (0, {:.6g})'.format(
                    self.epsilon, upper))
        sum_bound, beta_bounds, strict = self.bounds()
        total = self.sums()
        if total > sum_bound or (strict and total == sum_bound):
            raise ConstraintError('{} sum {:.6g} violates bound {:.6g}.'.format(
                self.kind.value, total, sum_bound))
        bad = np.flatnonzero(self.beta >= beta_bounds)
        if len(bad):
            raise ConstraintError('beta_{} = {:.6g} violates bound {:.6g}.'.format(
                bad[0] + 2, self.beta[bad[0]], beta_bounds[bad[0]]))

    def margins(self):
        """Smallest ratio of each bound to the value it constrains."""
        sum_bound, beta_bounds, _ = self.bounds()
        return dict(sum=sum_bound / self.sums(),
                    beta=float(np.min(beta_bounds / self.beta)))

    def to_dict(self):
        return dict(epsilon=self.epsilon, kind=self.kind.value,
                    alpha=[float(a) for a in self.alpha],
                    beta=[float(b) for b in self.beta],
                    params=None if self.params is None
                    else self.params.to_dict())


def default_sequences(kind, n_max, epsilon=None, params=None):
    """Geometric sequences meeting each inequality with a factor 2 margin.

    alpha_n = a 2^(-(n-2)) with a chosen so that the infinite sum is half of
    its bound, and beta_n is half of its bound.

    Parameters
    ----------
    kind : ConstraintKind or str
        Inequality system.
    n_max : int
        Largest index n to generate, n_max >= 2.
    epsilon : float or None
        Perturbation level in (0, 1/8), not used by the complex
        one-dimensional kind.
    params : MDParams or None
        Constants of a multidimensional kind.

    Returns
    -------
    SequenceEnvelope
        A checked envelope.

    Raises
    ------
    ConstraintError
        For infeasible parameters.
    """
    kind = ConstraintKind(kind)
    if n_max < 2:
        raise ConstraintError('n_max={} must be >= 2.'.format(n_max))
    if kind is not ConstraintKind.COMPLEX_ONEDIM:
        if epsilon is None or not 0 < epsilon < 1. / 8:
            raise ConstraintError('epsilon={} outside (0, 1/8)'.format(epsilon))
    if kind.multidim and params is None:
        raise ConstraintError('{} needs MDParams.'.format(kind.value))
    decay = 2. ** -np.arange(n_max - 1)
    if kind is ConstraintKind.REAL_ONEDIM:
        alpha = epsilon / 8 * decay
        beta = alpha / 4
    elif kind is ConstraintKind.COMPLEX_ONEDIM:
        alpha = 1. / 800 * decay
        beta = alpha ** 2 / 4
    elif kind is ConstraintKind.REAL_MULTIDIM:
        alpha = epsilon / (16 * params.C * np.sqrt(params.J_size)) * decay
        beta = 2. ** -7 * params.c ** 2 * alpha
    else:
        if not epsilon < params.A:
            raise ConstraintError('epsilon={} must be below A={}.'.format(
                epsilon, params.A))
        bound = (epsilon ** 2 / (11. * params.J_size * params.c ** 2) *
                 min(1. / params.squared_constant,
                     params.c ** 2 / (64. * params.kappa)))
        alpha = np.sqrt(3 * bound / 8) * decay
        beta = 2. ** -7 * params.c ** 2 / np.sqrt(params.N) * alpha
    return SequenceEnvelope(epsilon, alpha, beta, kind, params)


def _family_config(rng, cfg):
    if cfg is not None:
        return cfg
    return SearchConfig.from_config(int(rng.integers(2 ** 31)), 'family_search')


def stable_parseval_family(n, oversampling, rng, field=ScalarField.REAL,
                           cfg=None):
    """Random Parseval frame of dimension n and its estimated constant.

    Draws oversampling * n Gaussian vectors and applies :func:`parsevalize`.

    Parameters
    ----------
    n : int
        Dimension.
    oversampling : int
        Vectors per dimension. Phase retrieval needs oversampling * n at
        least 2n - 1 (real) or 4n (complex).
    rng : numpy.random.Generator
        Source of randomness.
    field : str or ScalarField
        Scalar field.
    cfg : SearchConfig or None
        Settings of the constant estimate. Uses the ``family_search``
        configuration seeded from ``rng`` when None.

    Returns
    -------
    tuple
        (frame, C) with C the lower estimate of the stability constant.

    Raises
    ------
    RankError
        When three draws in a row do not span.
    """
    log = desiutil.log.get_logger()
    field = ScalarField.get(field)
    if n < 1 or oversampling < 1:
        raise SpecError('Expected n >= 1 and oversampling >= 1.')
    count = oversampling * n
    needed = 2 * n - 1 if field is ScalarField.REAL else 4 * n
    if count < needed:
        raise SpecError('{} vectors cannot do phase retrieval in dim {}, '
                        'need {}.'.format(count, n, needed))
    for attempt in range(3):
        family = Frame(random_coeffs((count, n), field, rng), field,
                       ['x:{}'.format(j + 1) for j in range(count)],
                       name='parseval-{}'.format(n))
        try:
            frame = parsevalize(family)
            break
        except RankError:
            log.warning('Rank deficient draw {} in dim {}.'.format(attempt, n))
    else:
        raise RankError('Three rank deficient draws in dim {}.'.format(n))
    C = subspace_constant(frame, n, _family_config(rng, cfg))
    log.debug('Parseval family in dim {} with {} vectors: C ~ {:.4g}.'.format(
        n, count, C))
    return frame, C


class CounterexampleSpec(object):
    """Ingredients of the counterexample frame.

    Parameters
    ----------
    D : int
        Truncation dimension.
    C : float
        Uniform stability constant of the level families, C >= 1.
    gamma : float
        Decay exponent, gamma > 1.
    R : float
        Radius, R >= 0.
    levels : list of Frame
        Parseval frame of V_n for n = 1, ..., D (level n has dim n).
    """
    def __init__(self, D, C, gamma, R, levels):
        self.D = int(D)
        self.C = float(C)
        self.gamma = float(gamma)
        self.R = float(R)
        self.levels = list(levels)

    @property
    def field(self):
        return self.levels[0].field

    def check(self):
        """Raise SpecError unless every level is Parseval on V_n."""
        if len(self.levels) != self.D:
            raise SpecError('Expected {} levels, got {}.'.format(
                self.D, len(self.levels)))
        if not self.gamma > 1 or not self.R >= 0 or not self.C >= 1:
            raise SpecError('Expected gamma > 1, R >= 0 and C >= 1.')
        for n, level in enumerate(self.levels, 1):
            if level.dim != n or level.field is not self.field:
                raise SpecError('Level {} has dim {} and field {}.'.format(
                    n, level.dim, level.field))
            A, B = frame_bounds(level)
            if abs(A - 1) > PARSEVAL_TOL or abs(B - 1) > PARSEVAL_TOL:
                raise SpecError('Level {} is not Parseval: ({}, {}).'.format(
                    n, A, B))

    @classmethod
    def generate(cls, D, gamma, R, rng, field=ScalarField.REAL,
                 oversampling=None, cfg=None):
        """Draw the level families and estimate their uniform constant.

        C is the largest estimate over the levels, and at least 1.
        """
        field = ScalarField.get(field)
        if oversampling is None:
            oversampling = phaselip.config.Configuration().oversampling(field)
        levels, C = [], 1.
        for n in range(1, D + 1):
            level, estimate = stable_parseval_family(n, oversampling, rng,
                                                     field, cfg)
            levels.append(level)
            C = max(C, estimate)
        if not np.isfinite(C):
            raise SpecError('A level family does not do phase retrieval.')
        log = desiutil.log.get_logger()
        log.info('Generated {} level families with uniform C ~ {:.4g}.'.format(
            D, C))
        return cls(D, C, gamma, R, levels)


def counterexample_frame(spec):
    """Union of e_1..e_D and the scaled level families 2^(-n) x_(j,n).

    Returns
    -------
    tuple
        (frame, G) with G the growth function G(m) = 2^m C.

    Raises
    ------
    SpecError
        When a level family is not Parseval.
    """
    spec.check()
    D, field = spec.D, spec.field
    rows = [np.eye(D, dtype=field.dtype)]
    labels = ['onb:{}'.format(n) for n in range(1, D + 1)]
    for n, level in enumerate(spec.levels, 1):
        block = np.zeros((level.size, D), field.dtype)
        block[:, :n] = 2. ** -n * level.matrix
        rows.append(block)
        labels.extend('level:{}:{}'.format(n, j + 1) for j in range(level.size))
    frame = Frame(np.concatenate(rows), field, labels, dim=D,
                  name='counterexample')
    A, B = frame_bounds(frame)
    log = desiutil.log.get_logger()
    log.info('Counterexample frame: {} vectors in dim {}, bounds ({:.9g}, {:.9g}).'
             .format(frame.size, D, A, B))
    return frame, DyadicGrowth(spec.C)


def _check_kind(env, kind, D, needed):
    if env.kind is not kind:
        raise SpecError('Expected a {} envelope, got {}.'.format(
            kind.value, env.kind.value))
    if env.n_max < needed:
        raise SpecError('Envelope covers n <= {}, need {} for D={}.'.format(
            env.n_max, needed, D))


def real_onedim_frame(D, env):
    """The basis e_1 and alpha_n e_1 + e_n, n = 2..D, of a real truncation."""
    _check_kind(env, ConstraintKind.REAL_ONEDIM, D, D)
    matrix = np.eye(D)
    matrix[1:, 0] = env.alpha[:D - 1]
    labels = ['onb:1'] + ['phi:{}'.format(n) for n in range(2, D + 1)]
    frame = Frame(matrix, ScalarField.REAL, labels, name='real_onedim')
    log = desiutil.log.get_logger()
    log.info('Real one-dimensional core frame with {} vectors, bounds {}.'
             .format(frame.size, tuple(frame_bounds(frame))))
    return frame


def complex_onedim_frame(D, env):
    """e_1 with alpha_n e_1 + e_n and alpha_n e_1 + i e_n, n = 2..D."""
    _check_kind(env, ConstraintKind.COMPLEX_ONEDIM, D, D)
    matrix = np.zeros((2 * D - 1, D), np.complex128)
    matrix[0, 0] = 1
    labels = ['onb:1']
    for n in range(2, D + 1):
        k = 2 * n - 3
        matrix[k:k + 2, 0] = env.alpha_at(n)
        matrix[k, n - 1] = 1
        matrix[k + 1, n - 1] = 1j
        labels.extend(['phi:{}:1'.format(n), 'phi:{}:i'.format(n)])
    frame = Frame(matrix, ScalarField.COMPLEX, labels, name='complex_onedim')
    log = desiutil.log.get_logger()
    log.info('Complex one-dimensional core frame with {} vectors, bounds {}.'
             .format(frame.size, tuple(frame_bounds(frame))))
    return frame


def flatness_check(phi, c, kappa, mode, samples, rng, points=None):
    """Estimate by sampling how flat the coefficients of a frame of V_1 are.

    Real mode measures the fraction of indices j with |<x, phi_j>| >= c ||x||
    for unit x and requires its minimum to be at least 1 / kappa. Complex
    mode measures the fraction of indices where both
    c <= sqrt(N) |<x, phi_j>| / ||x|| <= 1 / c and the same for y hold, over
    pairs (x, y), and requires at least 1 / kappa.

    Parameters
    ----------
    phi : Frame
        Frame of V_1.
    c, kappa : float
        Flatness level and density constant.
    mode : str
        'real' or 'complex'.
    samples : int
        Number of random points (real) or pairs (complex).
    rng : numpy.random.Generator
        Source of randomness.
    points : array or tuple of arrays or None
        Explicit points (real) or pair of point arrays (complex) to use
        instead of random ones.

    Returns
    -------
    FlatnessResult
        (passed, worst_density).
    """
    N = phi.dim
    required = 1. / kappa

    def good(X):
        X = np.atleast_2d(X)
        size = np.abs(X @ phi.matrix.conj().T)
        norm = np.linalg.norm(X, axis=1, keepdims=True)
        if mode == 'real':
            return size >= c * norm
        scaled = np.sqrt(N) * size
        return (scaled >= c * norm) & (scaled <= norm / c)

    if mode == 'real':
        X = points if points is not None else \
            random_coeffs((samples, N), phi.field, rng)
        mask = good(X)
    elif mode == 'complex':
        if points is not None:
            X, Y = points
        else:
            X = random_coeffs((samples, N), phi.field, rng)
            Y = random_coeffs((samples, N), phi.field, rng)
        mask = good(X) & good(Y)
    else:
        raise SpecError('Invalid flatness mode "{}".'.format(mode))
    worst = float(np.min(np.mean(mask, axis=1)))
    return FlatnessResult(worst >= required * (1 - 1e-12), worst)


def rotated_onb_frame(N, copies, rng, field=ScalarField.REAL):
    """Union of ``copies`` random orthonormal bases scaled to be Parseval.

    Bases are Haar distributed orthogonal (real) or unitary (complex)
    matrices, each scaled by copies^(-1/2).
    """
    field = ScalarField.get(field)
    if N < 1 or copies < 1:
        raise SpecError('Expected N >= 1 and copies >= 1.')
    blocks = []
    for _ in range(copies):
        if N == 1:
            block = random_coeffs((1, 1), field, rng)
            block /= np.abs(block)
        elif field is ScalarField.REAL:
            block = scipy.stats.ortho_group.rvs(N, random_state=rng)
        else:
            block = scipy.stats.unitary_group.rvs(N, random_state=rng)
        blocks.append(block / np.sqrt(copies))
    labels = ['phi:{}'.format(j + 1) for j in range(N * copies)]
    return Frame(np.concatenate(blocks), field, labels, dim=N,
                 name='rotated-onb-{}x{}'.format(copies, N))


def _embed(frame, D, prefix):
    block = np.zeros((frame.size, D), frame.field.dtype)
    block[:, :frame.dim] = frame.matrix
    labels = ['{}:{}'.format(prefix, j + 1) for j in range(frame.size)]
    return block, labels


def md_bounds_window(A, epsilon):
    return ((1 - np.sqrt(epsilon / A)) ** 2 * A - BOUNDS_TOL,
            (1 + np.sqrt(epsilon)) ** 2 + BOUNDS_TOL)


def _log_md_bounds(frame, params, env):
    log = desiutil.log.get_logger()
    A, B = frame_bounds(frame)
    if env.epsilon is None:
        return
    lo, hi = md_bounds_window(params.A, env.epsilon)
    log.info('{} frame with {} vectors in dim {}, bounds ({:.6g}, {:.6g}) in '
             'window [{:.6g}, {:.6g}].'.format(frame.name, frame.size,
                                               frame.dim, A, B, lo, hi))
    if A < lo or B > hi:
        log.warning('Frame bounds of "{}" outside [{:.6g}, {:.6g}].'.format(
            frame.name, lo, hi))


def _check_md_inputs(psi, phi, params, env, D, kind):
    N = params.N
    if psi.dim != N or phi.dim != N:
        raise SpecError('psi and phi must be frames of V_1 with dim {}.'.format(N))
    if psi.field is not kind.field or phi.field is not kind.field:
        raise SpecError('{} frames need the {} field.'.format(
            kind.value, kind.field))
    if D <= N:
        raise SpecError('D={} leaves no tail beyond N={}.'.format(D, N))
    _check_kind(env, kind, D, D - N + 1)


def real_md_frame(psi, phi, params, env, D, rng, samples=None):
    """psi_j with alpha_n phi_j + |J|^(-1/2) e_n, j in J, n = 2..D-N+1.

    V_1 occupies coordinates 1..N and the tail vector e_n coordinate
    N + n - 1.

    Raises
    ------
    FlatnessError
        When phi fails the sampled flatness test with density 1 / C.
    """
    kind = ConstraintKind.REAL_MULTIDIM
    _check_md_inputs(psi, phi, params, env, D, kind)
    if samples is None:
        samples = phaselip.config.Configuration().flatness_samples
    flat = flatness_check(phi, params.c, params.C, 'real', samples, rng)
    if not flat.passed:
        raise FlatnessError('phi density {:.4g} below 1/C={:.4g}.'.format(
            flat.worst_density, 1 / params.C))
    N, J = params.N, phi.size
    rows, labels = _embed(psi, D, 'psi')
    rows = [rows]
    for n in range(2, D - N + 2):
        block, _ = _embed(phi, D, 'phi')
        block *= env.alpha_at(n)
        block[:, N + n - 2] = J ** -0.5
        rows.append(block)
        labels.extend('phi:{}:{}'.format(j + 1, n) for j in range(J))
    frame = Frame(np.concatenate(rows), ScalarField.REAL, labels, dim=D,
                  name='real_md')
    _log_md_bounds(frame, params, env)
    return frame


def complex_md_frame(psi, phi, params, env, D, rng, samples=None):
    """psi_j with alpha_n phi_j +/- (2|J|)^(-1/2) e_n and the -i companion.

    The companions are alpha_n phi_j + (2|J|)^(-1/2) e_n and
    alpha_n phi_j - i (2|J|)^(-1/2) e_n for j in J and n = 2..D-N+1.

    Raises
    ------
    FlatnessError
        When phi fails the sampled two-sided flatness test with kappa.
    """
    kind = ConstraintKind.COMPLEX_MULTIDIM
    _check_md_inputs(psi, phi, params, env, D, kind)
    if samples is None:
        samples = phaselip.config.Configuration().flatness_samples
    flat = flatness_check(phi, params.c, params.kappa, 'complex', samples, rng)
    if not flat.passed:
        raise FlatnessError('phi density {:.4g} below 1/kappa={:.4g}.'.format(
            flat.worst_density, 1 / params.kappa))
    N, J = params.N, phi.size
    rows, labels = _embed(psi, D, 'psi')
    rows = [rows]
    scale = (2. * J) ** -0.5
    for n in range(2, D - N + 2):
        block, _ = _embed(phi, D, 'phi')
        block *= env.alpha_at(n)
        plain, rotated = block.copy(), block.copy()
        plain[:, N + n - 2] = scale
        rotated[:, N + n - 2] = -1j * scale
        rows.extend([plain, rotated])
        labels.extend('phi:{}:{}:1'.format(j + 1, n) for j in range(J))
        labels.extend('phi:{}:{}:i'.format(j + 1, n) for j in range(J))
    frame = Frame(np.concatenate(rows), ScalarField.COMPLEX, labels, dim=D,
                  name='complex_md')
    _log_md_bounds(frame, params, env)
    return frame


def md_claimed_bound(params, epsilon, field):
    """Lipschitz bound of the multidimensional frames on their prior set.

    Real: sqrt(1 / (1 - eps)) C. Complex: sqrt(max(C^2, 64 kappa / c^2) /
    (1 - eps)).
    """
    field = ScalarField.get(field)
    if field is ScalarField.REAL:
        return float(np.sqrt(1. / (1 - epsilon)) * params.C)
    return float(np.sqrt(max(params.squared_constant,
                             64 * params.kappa / params.c ** 2) /
                         (1 - epsilon)))


def psi_constant(psi, estimate, rng, cfg=None):
    """Stability constant of psi on V_1 that the claimed bounds rely on.

    Real families small enough to enumerate get their exact constant from
    :func:`~phaselip.stability.real_lipschitz_constant`. Otherwise the
    larger of ``estimate`` and a subspace search with the certification
    settings is inflated by :data:`ESTIMATE_INFLATION`.

    Parameters
    ----------
    psi : Frame
        Frame of V_1.
    estimate : float
        Constant already estimated for psi.
    rng : numpy.random.Generator
        Seeds the search when ``cfg`` is None.
    cfg : SearchConfig or None
        Settings of the search. Uses the ``search`` configuration when None.

    Returns
    -------
    tuple
        (C, method) with method 'exact' or 'search'.
    """
    log = desiutil.log.get_logger()
    if psi.field is ScalarField.REAL and psi.size <= MAX_PARTITION_SIZE:
        C, method = real_lipschitz_constant(psi), 'exact'
    else:
        if cfg is None:
            cfg = SearchConfig.from_config(int(rng.integers(2 ** 31)),
                                           samples=0)
        found = subspace_constant(psi, psi.dim, cfg)
        C, method = ESTIMATE_INFLATION * max(estimate, found), 'search'
    log.info('Constant of "{}" on V_1: {:.6g} ({}).'.format(psi.name, C,
                                                           method))
    return C, method


def md_experiment(N, D, field, rng, epsilon, copies=2, c=None,
                  oversampling=None, cfg=None, samples=None):
    """Assemble psi, phi, the constants and the default envelope.

    psi is a random stable Parseval family of V_1 and phi a union of
    rotated bases. C is the constant of psi from :func:`psi_constant`, and
    in the real case also covers 1 / density of phi. In the complex case
    kappa = |J| is the only density a sampled test can support.

    Returns
    -------
    MDSetup
        (psi, phi, params, env, notes).
    """
    log = desiutil.log.get_logger()
    field = ScalarField.get(field)
    config = phaselip.config.Configuration()
    if oversampling is None:
        oversampling = config.oversampling(field)
    if samples is None:
        samples = config.flatness_samples
    psi, estimate = stable_parseval_family(N, oversampling, rng, field, cfg)
    psi_C, _ = psi_constant(psi, estimate, rng, cfg)
    if not np.isfinite(psi_C):
        raise SpecError('psi does not do phase retrieval on V_1.')
    phi = rotated_onb_frame(N, copies, rng, field)
    bounds = [frame_bounds(psi), frame_bounds(phi)]
    A = min(b.A for b in bounds)
    B = min(1., max(b.B for b in bounds))
    notes = []
    if field is ScalarField.REAL:
        kind = ConstraintKind.REAL_MULTIDIM
        if c is None:
            c = 0.5 / np.sqrt(N * copies)
        flat = flatness_check(phi, c, np.inf, 'real', samples, rng)
        if flat.worst_density == 0:
            raise FlatnessError('phi is not flat at level c={:.4g}.'.format(c))
        if c <= (N * copies) ** -0.5:
            # Every rotated basis holds a coefficient >= (N copies)^(-1/2) ||x||.
            floor = float(N)
        else:
            floor = ESTIMATE_INFLATION / flat.worst_density
        C = max(1., psi_C, floor)
        kappa = C
    else:
        kind = ConstraintKind.COMPLEX_MULTIDIM
        if c is None:
            c = 0.1
        kappa = float(phi.size)
        C = max(1., psi_C)
        notes.append('psi hypothesis taken as plain C-stable phase retrieval '
                     'on V_1; the stated hypothesis sums over J_c while psi '
                     'is indexed by I')
        log.warning(notes[-1])
    params = MDParams(N, C, A, B, c, kappa, phi.size, psi.size)
    env = default_sequences(kind, D - N + 1, epsilon, params)
    log.info('Multidimensional setup N={} C={:.4g} c={:.4g} kappa={:.4g}.'
             .format(N, C, c, kappa))
    return MDSetup(psi, phi, params, env, notes)
