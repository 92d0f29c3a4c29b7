"""Finite truncations of a separable Hilbert space.

Vectors hold their coefficients against the fixed orthonormal basis
e_1, ..., e_D of a D-dimensional truncation, over either the real or the
complex numbers. Besides the inner product and the head projections P_m this
module provides the metric of the quotient space modulo a global phase,
which is the metric every stability statement is made in.

All functions are pure and vectors are immutable, so everything here is
safe to call from concurrent workers.
"""
from __future__ import print_function, division, absolute_import

import enum

import numpy as np

from phaselip.errors import (DimensionError, FieldError, RangeError,
                             DegenerateError, NumericalError)


class ScalarField(enum.Enum):
    """Scalar field of a vector or frame."""
    REAL = 'real'
    COMPLEX = 'complex'

    def __str__(self):
        return self.value

    @property
    def dtype(self):
        """The numpy dtype used for coefficients over this field."""
        return np.float64 if self is ScalarField.REAL else np.complex128

    @classmethod
    def get(cls, field):
        """Convert a field name or member to a member.

        Parameters
        ----------
        field : str or ScalarField
            One of 'real', 'complex' or a member.
        """
        if isinstance(field, cls):
            return field
        try:
            return cls(str(field).lower())
        except ValueError:
            raise FieldError('Invalid scalar field "{}".'.format(field))


def as_field_array(values, field):
    """Return a new coefficient array of the dtype of ``field``.

    Imaginary parts are only accepted for the complex field.
    """
    field = ScalarField.get(field)
    values = np.asarray(values)
    if field is ScalarField.REAL and np.iscomplexobj(values):
        if np.any(values.imag != 0):
            raise FieldError('Complex coefficients given for a real vector.')
        values = values.real
    values = np.array(values, dtype=field.dtype)
    if not np.all(np.isfinite(values)):
        raise NumericalError('Coefficients must all be finite.')
    return values


class Vector(object):
    """An element of a D-dimensional truncation.

    Parameters
    ----------
    coeffs : array_like
        The D coefficients a_n of f = sum_n a_n e_n.
    field : str or ScalarField or None
        Scalar field. Inferred from the coefficient dtype when None.
    """
    # Make numpy scalars defer to __rmul__.
    __array_ufunc__ = None

    def __init__(self, coeffs, field=None):
        if field is None:
            field = (ScalarField.COMPLEX if np.iscomplexobj(coeffs)
                     else ScalarField.REAL)
        self._field = ScalarField.get(field)
        coeffs = as_field_array(coeffs, self._field)
        if coeffs.ndim != 1 or len(coeffs) < 1:
            raise DimensionError(
                'Expected a non-empty 1D coefficient array, got shape {}.'
                .format(coeffs.shape))
        coeffs.setflags(write=False)
        self._coeffs = coeffs

    @property
    def field(self):
        return self._field

    @property
    def coeffs(self):
        """Read-only array of coefficients."""
        return self._coeffs

    @property
    def dim(self):
        return len(self._coeffs)

    def norm(self):
        return float(np.linalg.norm(self._coeffs))

    def is_zero(self):
        return not np.any(self._coeffs)

    @classmethod
    def basis(cls, k, dim, field=ScalarField.REAL):
        """Return the basis vector e_k, using 1-based indexing."""
        if not 1 <= k <= dim:
            raise RangeError('k={} outside 1..{}'.format(k, dim))
        field = ScalarField.get(field)
        coeffs = np.zeros(dim, field.dtype)
        coeffs[k - 1] = 1
        return cls(coeffs, field)

    @classmethod
    def zeros(cls, dim, field=ScalarField.REAL):
        field = ScalarField.get(field)
        return cls(np.zeros(dim, field.dtype), field)

    def _other(self, other):
        check_compatible(self, other)
        return other._coeffs

    def __add__(self, other):
        return Vector(self._coeffs + self._other(other), self._field)

    def __sub__(self, other):
        return Vector(self._coeffs - self._other(other), self._field)

    def __neg__(self):
        return Vector(-self._coeffs, self._field)

    def __mul__(self, scalar):
        if isinstance(scalar, Vector):
            return NotImplemented
        return Vector(self._coeffs * as_field_array(scalar, self._field),
                      self._field)

    __rmul__ = __mul__

    def __truediv__(self, scalar):
        return Vector(self._coeffs / as_field_array(scalar, self._field),
                      self._field)

    def __repr__(self):
        return 'Vector(field={}, dim={}, norm={:.6g})'.format(
            self._field, self.dim, self.norm())

    def to_dict(self):
        """Return a JSON-serializable dict.

        Complex scalars are stored as [re, im] pairs.
        """
        if self._field is ScalarField.REAL:
            coeffs = [float(a) for a in self._coeffs]
        else:
            coeffs = [[float(a.real), float(a.imag)] for a in self._coeffs]
        return dict(field=self._field.value, coeffs=coeffs)

    @classmethod
    def from_dict(cls, data):
        field = ScalarField.get(data['field'])
        coeffs = np.asarray(data['coeffs'], dtype=float)
        if field is ScalarField.COMPLEX:
            if coeffs.ndim != 2 or coeffs.shape[1] != 2:
                raise FieldError('Complex coefficients must be [re, im] pairs.')
            coeffs = coeffs[:, 0] + 1j * coeffs[:, 1]
        return cls(coeffs, field)


def check_compatible(f, g):
    """Raise unless f and g share their dimension and scalar field."""
    if f.field is not g.field:
        raise FieldError('Cannot combine {} and {} vectors.'.format(
            f.field, g.field))
    if f.dim != g.dim:
        raise DimensionError('Dimension mismatch: {} != {}.'.format(
            f.dim, g.dim))


def inner(f, g):
    """Inner product sum_n f_n conj(g_n), conjugate-linear in g.

    Returns a float for the real field and a complex otherwise.
    """
    check_compatible(f, g)
    value = np.vdot(g.coeffs, f.coeffs)
    if f.field is ScalarField.REAL:
        return float(np.real(value))
    return complex(value)


def project_head(f, m):
    """Orthogonal projection P_m onto span{e_1, ..., e_m}.

    Parameters
    ----------
    f : Vector
        Vector to project.
    m : int
        Head dimension, 1 <= m <= f.dim.

    Returns
    -------
    Vector
        Vector with the first m coefficients of f and zeros elsewhere.
    """
    if not 1 <= m <= f.dim:
        raise RangeError('m={} outside 1..{}'.format(m, f.dim))
    coeffs = np.array(f.coeffs)
    coeffs[m:] = 0
    return Vector(coeffs, f.field)


def _unimodular(ip):
    """Phases of an array of inner products, with 1 where they vanish."""
    ip = np.asarray(ip)
    size = np.abs(ip)
    safe = np.where(size > 0, size, 1.)
    return np.where(size > 0, ip / safe, 1.)


def align_phase(f, g):
    """Unimodular alpha minimizing ||f - alpha g||.

    Parameters
    ----------
    f : Vector
        Reference vector.
    g : Vector
        Vector to align, must be nonzero.

    Returns
    -------
    float or complex
        The phase of <f, g>, or 1 when <f, g> = 0 (every alpha minimizes).

    Raises
    ------
    DegenerateError
        When g = 0.
    """
    check_compatible(f, g)
    if g.is_zero():
        raise DegenerateError('Cannot align the phase of a zero vector.')
    alpha = _unimodular(inner(f, g))[()]
    if f.field is ScalarField.REAL:
        return float(np.real(alpha))
    return complex(alpha)


def quotient_distance(f, g):
    """Distance inf_{|alpha|=1} ||f - alpha g|| modulo a global phase.

    The minimizing phase is taken from <f, g> and the difference evaluated
    directly. This equals sqrt(max(0, |f|^2 + |g|^2 - 2|<f,g>|)) but keeps
    full relative precision when f and g nearly coincide.
    """
    check_compatible(f, g)
    return float(quotient_distances(f.coeffs, g.coeffs)[()])


def quotient_distances(F, G):
    """Quotient distances between corresponding rows of two arrays.

    Parameters
    ----------
    F, G : array
        Arrays of coefficients with the same shape (..., D).

    Returns
    -------
    array
        Array of shape (...) of distances.

    Raises
    ------
    FieldError
        When one array is complex and the other real.
    """
    F, G = np.asarray(F), np.asarray(G)
    if F.shape != G.shape:
        raise DimensionError('Shape mismatch: {} != {}.'.format(
            F.shape, G.shape))
    if np.iscomplexobj(F) != np.iscomplexobj(G):
        raise FieldError('Cannot compare real and complex coefficients.')
    ip = np.sum(F * np.conj(G), axis=-1)
    alpha = _unimodular(ip)
    if not np.iscomplexobj(F):
        alpha = np.real(alpha)
    return np.linalg.norm(F - alpha[..., np.newaxis] * G, axis=-1)


def random_coeffs(shape, field, rng):
    """Standard Gaussian coefficients over a field.

    Complex coefficients have independent real and imaginary parts.
    """
    field = ScalarField.get(field)
    values = rng.standard_normal(shape)
    if field is ScalarField.COMPLEX:
        values = values + 1j * rng.standard_normal(shape)
    return values


def random_vector(dim, field, rng, unit=True):
    """Draw a random vector with a rotation-invariant distribution.

    Parameters
    ----------
    dim : int
        Truncation dimension.
    field : str or ScalarField
        Scalar field.
    rng : numpy.random.Generator
        Source of randomness.
    unit : bool
        Normalize to unit norm when True.
    """
    coeffs = random_coeffs(dim, field, rng)
    if unit:
        coeffs /= np.linalg.norm(coeffs)
    return Vector(coeffs, field)


def random_pairs(dim, field, rng, count, unit=True):
    """Draw ``count`` random pairs as two (count, dim) arrays."""
    F = random_coeffs((count, dim), field, rng)
    G = random_coeffs((count, dim), field, rng)
    if unit:
        F /= np.linalg.norm(F, axis=1, keepdims=True)
        G /= np.linalg.norm(G, axis=1, keepdims=True)
    return F, G
