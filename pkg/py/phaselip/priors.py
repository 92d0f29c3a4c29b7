"""Nonlinear prior sets defined by relative tail envelopes.

A prior set B over a D-dimensional truncation is described by a head space
V_1 spanned by the first ``head_dim`` = N coordinates, the nested spaces
V_m = V_1 + span{e_2, ..., e_m} of dimension N + m - 1, and an envelope
t_1 >= t_2 >= ... of admissible relative tails::

    B = {f : ||f - P_m f|| <= t_m ||f|| for m = 1, ..., D - N}

The envelope either comes from a growth function G, t_m = G(m+1)^(-gamma) R,
or directly from a sequence beta, t_m = beta_(m+1).
"""
from __future__ import print_function, division, absolute_import

import enum

import numpy as np

import desiutil.log

from phaselip.errors import (DimensionError, RangeError, DegenerateError,
                             SpecError)
from phaselip.hilbert import ScalarField, Vector


# Relative slack of the membership test at the envelope boundary.
MEMBERSHIP_SLACK = 1e-12


class Provenance(enum.Enum):
    """How the envelope of a prior set was obtained."""
    FROM_G = 'FromG'
    DIRECT = 'Direct'


class DyadicGrowth(object):
    """The growth function G(m) = 2^m C.

    Parameters
    ----------
    C : float
        Uniform stability constant of the level families, C >= 1.
    """
    def __init__(self, C):
        if not C > 0:
            raise SpecError('Expected C > 0, got {}.'.format(C))
        self.C = float(C)

    def __call__(self, m):
        return 2. ** np.asarray(m, dtype=float) * self.C

    def __repr__(self):
        return 'DyadicGrowth(C={})'.format(self.C)


class PriorSet(object):
    """Envelope description of a prior set.

    Parameters
    ----------
    D : int
        Truncation dimension.
    envelope : array_like
        Relative tails t_m for m = 1, ..., D - head_dim.
    head_dim : int
        Dimension N of V_1.
    provenance : Provenance
        Origin of the envelope.
    gamma, R : float or None
        Decay exponent and radius of a FromG envelope.
    C : float or None
        Constant of the dyadic growth function of a FromG envelope.
    name : str
        Identifier used in reports.
    """
    def __init__(self, D, envelope, head_dim=1, provenance=Provenance.DIRECT,
                 gamma=None, R=None, C=None, name=''):
        if not 1 <= head_dim <= D:
            raise SpecError('head_dim={} outside 1..{}'.format(head_dim, D))
        envelope = np.array(envelope, dtype=float).reshape(-1)
        if len(envelope) != D - head_dim:
            raise SpecError('Expected {} envelope values, got {}.'.format(
                D - head_dim, len(envelope)))
        if not np.all(np.isfinite(envelope)) or np.any(envelope < 0):
            raise SpecError('Envelope values must be finite and >= 0.')
        if np.any(envelope >= 1):
            raise SpecError('Envelope values must be < 1, got max {}.'.format(
                envelope.max()))
        if np.any(np.diff(envelope) > 0):
            raise SpecError('Envelope must be nonincreasing.')
        envelope.setflags(write=False)
        self.D = int(D)
        self.head_dim = int(head_dim)
        self.envelope = envelope
        self.provenance = Provenance(provenance)
        self.gamma = gamma
        self.R = R
        self.C = C
        self.name = name

    @property
    def depth(self):
        """Number of envelope constraints, D - head_dim."""
        return len(self.envelope)

    def __repr__(self):
        return 'PriorSet(name="{}", D={}, head_dim={}, provenance={})'.format(
            self.name, self.D, self.head_dim, self.provenance.value)

    def level_bounds(self):
        """Largest coefficient magnitude of each tail coordinate.

        The coordinate of level n = 2, ..., D - N + 1 may use at most
        sqrt(t_(n-1)^2 - t_n^2), with t = 0 beyond the envelope, so that the
        tails telescope below every t_m.
        """
        t = np.append(self.envelope, 0.)
        return np.sqrt(np.maximum(0., t[:-1] ** 2 - t[1:] ** 2))

    def coordinate_scales(self):
        """Natural step size for each coordinate of a vector in this set."""
        return np.concatenate([np.ones(self.head_dim), self.envelope])

    def to_dict(self):
        return dict(provenance=self.provenance.value, gamma=self.gamma,
                    R=self.R, C=self.C, D=self.D, head_dim=self.head_dim,
                    name=self.name,
                    envelope=[float(t) for t in self.envelope])

    @classmethod
    def from_dict(cls, data):
        return cls(data['D'], data['envelope'], data.get('head_dim', 1),
                   Provenance(data['provenance']), data.get('gamma'),
                   data.get('R'), data.get('C'), data.get('name', ''))


def envelope_from_G(G, gamma, R, D, head_dim=1, name=''):
    """Build the prior set with envelope t_m = G(m+1)^(-gamma) R.

    Parameters
    ----------
    G : callable
        Increasing growth function of the level index.
    gamma : float
        Decay exponent, gamma > 1.
    R : float
        Radius, R >= 0. R = 0 restricts the set to V_1.
    D : int
        Truncation dimension.
    head_dim : int
        Dimension of V_1.

    Returns
    -------
    PriorSet
        Prior with FromG provenance.

    Raises
    ------
    SpecError
        When G is not increasing, gamma <= 1, R < 0 or some t_m >= 1.
    """
    if not gamma > 1:
        raise SpecError('Expected gamma > 1, got {}.'.format(gamma))
    if not R >= 0:
        raise SpecError('Expected R >= 0, got {}.'.format(R))
    m = np.arange(1, D - head_dim + 2)
    values = np.asarray(G(m), dtype=float)
    if np.any(values <= 0) or np.any(np.diff(values) <= 0):
        raise SpecError('Growth function must be positive and increasing.')
    envelope = values[1:] ** (-float(gamma)) * R
    return PriorSet(D, envelope, head_dim, Provenance.FROM_G, float(gamma),
                    float(R), getattr(G, 'C', None), name=name)


def envelope_from_beta(beta, D, head_dim=1, name=''):
    """Build the prior set with envelope t_m = beta_(m+1).

    ``beta`` is indexed from n = 2, so ``beta[0]`` is beta_2.
    """
    beta = np.asarray(beta, dtype=float)
    if len(beta) < D - head_dim:
        raise SpecError('Need {} beta values, got {}.'.format(
            D - head_dim, len(beta)))
    return PriorSet(D, beta[:D - head_dim], head_dim, Provenance.DIRECT,
                    name=name)


def _check_coeffs(B, F):
    if isinstance(F, Vector):
        F = F.coeffs
    F = np.asarray(F)
    if F.shape[-1] != B.D:
        raise DimensionError('Dimension mismatch: {} != {}.'.format(
            F.shape[-1], B.D))
    return F


def tail_norms(B, F):
    """Norms ||f - P_m f|| for m = 1, ..., depth.

    Parameters
    ----------
    B : PriorSet
        Prior set defining the nested spaces.
    F : array
        Coefficients of shape (..., D).

    Returns
    -------
    array
        Array of shape (..., depth).
    """
    F = _check_coeffs(B, F)
    power = np.abs(F) ** 2
    # Reverse cumulative sums give the mass beyond each coordinate.
    beyond = np.cumsum(power[..., ::-1], axis=-1)[..., ::-1]
    return np.sqrt(beyond[..., B.head_dim:])


def membership_margins(B, F):
    """Vectorized membership test.

    Returns
    -------
    tuple
        Boolean array ``ok`` and float array ``margin`` of shape (...).
    """
    F = _check_coeffs(B, F)
    norms = np.linalg.norm(F, axis=-1)
    if np.any(norms == 0):
        raise DegenerateError('The zero vector is not in any prior set.')
    if B.depth == 0:
        return np.ones(norms.shape, bool), np.ones(norms.shape)
    tails = tail_norms(B, F)
    limit = B.envelope * norms[..., np.newaxis]
    ok = np.all(tails <= limit * (1 + MEMBERSHIP_SLACK), axis=-1)
    margin = np.min(limit - tails, axis=-1) / norms
    return ok, margin


def membership(B, f):
    """Test whether f belongs to B.

    Parameters
    ----------
    B : PriorSet
        Prior set.
    f : Vector
        Nonzero vector of dimension B.D.

    Returns
    -------
    tuple
        (ok, margin) where margin is the smallest relative distance
        (t_m ||f|| - ||f - P_m f||) / ||f|| to the envelope.
    """
    ok, margin = membership_margins(B, f)
    return bool(ok), float(margin)


def sample_batch(B, rng, count, field=ScalarField.REAL):
    """Draw ``count`` members of B as a (count, D) array.

    The head is a random unit vector of V_1 and level n gets a coefficient
    of random sign or phase and magnitude u * sqrt(t_(n-1)^2 - t_n^2) with
    u uniform in [0, 1].
    """
    field = ScalarField.get(field)
    head = rng.standard_normal((count, B.head_dim))
    if field is ScalarField.COMPLEX:
        head = head + 1j * rng.standard_normal((count, B.head_dim))
    head /= np.linalg.norm(head, axis=1, keepdims=True)
    size = rng.uniform(0., 1., (count, B.depth)) * B.level_bounds()
    if field is ScalarField.COMPLEX:
        phase = np.exp(2j * np.pi * rng.uniform(0., 1., (count, B.depth)))
    else:
        phase = rng.choice([-1., 1.], (count, B.depth))
    F = np.concatenate([head, size * phase], axis=1).astype(field.dtype)
    ok, _ = membership_margins(B, F)
    if not np.all(ok):
        raise SpecError('Sampled {} vectors outside of "{}".'.format(
            np.count_nonzero(~ok), B.name))
    return F


def sample(B, rng, field=ScalarField.REAL):
    """Draw one member of B."""
    return Vector(sample_batch(B, rng, 1, field)[0], field)


def repair_batch(B, F):
    """Map each row of F into B by shrinking tail blocks.

    Levels are scanned from the deepest to the first, and the block beyond
    V_m is scaled by the smallest factor restoring its constraint. Rows
    already in B are returned unchanged.
    """
    F = np.array(np.atleast_2d(_check_coeffs(B, F)))
    N = B.head_dim
    if np.any(np.all(F[..., :N] == 0, axis=-1)):
        raise DegenerateError('Cannot repair a vector with P_1 f = 0.')
    for m in range(B.depth, 0, -1):
        t = B.envelope[m - 1]
        split = N + m - 1
        H = np.linalg.norm(F[..., :split], axis=-1)
        T = np.linalg.norm(F[..., split:], axis=-1)
        bad = T > t * np.hypot(H, T) * (1 + MEMBERSHIP_SLACK)
        if np.any(bad):
            scale = t * H[bad] / (T[bad] * np.sqrt(1 - t ** 2))
            F[bad, split:] *= scale[:, np.newaxis]
    return F


def repair(B, f):
    """Map f into B by minimal shrinking of its tails.

    Parameters
    ----------
    B : PriorSet
        Target set.
    f : Vector
        Vector whose head P_1 f is nonzero.

    Returns
    -------
    Vector
        f itself when it already belongs to B, else the repaired vector.

    Raises
    ------
    DegenerateError
        When P_1 f = 0.
    """
    if np.any(f.coeffs[:B.head_dim]) and membership(B, f)[0]:
        return f
    return Vector(repair_batch(B, f.coeffs[np.newaxis])[0], f.field)


def witness_pair(m, gamma, R, C, D, field=ScalarField.REAL):
    """Pair x, y = e_1 +/- delta e_m with delta = R 2^(-m gamma) C^(-gamma).

    The pair lies in the prior set of the dyadic growth G(m) = 2^m C and
    its measurements under the matching counterexample frame nearly
    coincide.

    Raises
    ------
    RangeError
        When m < 2 or m > D.
    """
    if not 2 <= m <= D:
        raise RangeError('m={} outside 2..{}'.format(m, D))
    delta = R * 2. ** (-m * gamma) * C ** (-gamma)
    field = ScalarField.get(field)
    x = np.zeros(D, field.dtype)
    x[0] = 1.
    y = x.copy()
    x[m - 1] = delta
    y[m - 1] = -delta
    log = desiutil.log.get_logger()
    log.debug('Witness pair at m={} with delta={:.6g}.'.format(m, delta))
    return Vector(x, field), Vector(y, field)
