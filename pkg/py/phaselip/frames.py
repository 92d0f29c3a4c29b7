"""Frames of a finite truncation and their phaseless measurement map.
"""
from __future__ import print_function, division, absolute_import

import collections
import json

import numpy as np

import scipy.linalg

import desiutil.log

import phaselip.config
from phaselip.errors import (DimensionError, FieldError, EmptyFrameError,
                             RankError, NumericalError)
from phaselip.hilbert import ScalarField, Vector, as_field_array, check_compatible


# Smallest lower frame bound of a frame that is considered valid.
VALID_LOWER_BOUND = 1e-10

# Eigenvalue floor for the inverse square root of a frame operator.
EIGENVALUE_FLOOR = 1e-12


FrameBounds = collections.namedtuple('FrameBounds', ['A', 'B'])


class Frame(object):
    """An ordered finite family of vectors sharing a dimension and field.

    Parameters
    ----------
    vectors : array_like or list of :class:`Vector`
        Either a (K, dim) array whose rows are the frame vectors or a
        list of vectors.
    field : str or ScalarField or None
        Scalar field. Taken from the vectors or the array dtype when None.
    labels : list of str or None
        Documentary tag for each vector, e.g. "onb:3" or "level:4:2".
    dim : int or None
        Dimension, only required for an empty frame.
    name : str
        Identifier used in reports.
    """
    def __init__(self, vectors, field=None, labels=None, dim=None, name=''):
        if isinstance(vectors, (list, tuple)) and len(vectors) > 0 and all(
                isinstance(v, Vector) for v in vectors):
            first = vectors[0]
            for v in vectors[1:]:
                check_compatible(first, v)
            if field is None:
                field = first.field
            vectors = np.array([v.coeffs for v in vectors])
        if field is None:
            field = (ScalarField.COMPLEX if np.iscomplexobj(vectors)
                     else ScalarField.REAL)
        self._field = ScalarField.get(field)
        matrix = as_field_array(vectors, self._field)
        if matrix.size == 0:
            if dim is None:
                raise DimensionError('An empty frame needs an explicit dim.')
            matrix = matrix.reshape(0, dim)
        if matrix.ndim != 2:
            raise DimensionError('Expected a 2D array of frame vectors, got '
                                 'shape {}.'.format(matrix.shape))
        if dim is not None and matrix.shape[1] != dim:
            raise DimensionError('Frame vectors have dim {} != {}.'.format(
                matrix.shape[1], dim))
        if matrix.shape[1] < 1:
            raise DimensionError('Frame dimension must be positive.')
        if labels is None:
            labels = [''] * len(matrix)
        labels = [str(label) for label in labels]
        if len(labels) != len(matrix):
            raise DimensionError('Got {} labels for {} vectors.'.format(
                len(labels), len(matrix)))
        matrix.setflags(write=False)
        self._matrix = matrix
        self._labels = tuple(labels)
        self.name = name

    @property
    def field(self):
        return self._field

    @property
    def dim(self):
        return self._matrix.shape[1]

    @property
    def size(self):
        """Number of frame vectors."""
        return self._matrix.shape[0]

    @property
    def matrix(self):
        """Read-only (size, dim) array whose rows are the frame vectors."""
        return self._matrix

    @property
    def labels(self):
        return self._labels

    @property
    def vectors(self):
        return [Vector(row, self._field) for row in self._matrix]

    def __len__(self):
        return self.size

    def __repr__(self):
        return 'Frame(name="{}", field={}, dim={}, size={})'.format(
            self.name, self._field, self.dim, self.size)

    def select(self, prefix):
        """Return the sub-family whose labels start with ``prefix``."""
        keep = [i for i, label in enumerate(self._labels)
                if label.startswith(prefix)]
        return Frame(self._matrix[keep], self._field,
                     [self._labels[i] for i in keep], dim=self.dim,
                     name=self.name)

    def union(self, other, name=None):
        """Concatenate the vectors of two frames of the same space."""
        if other.field is not self._field:
            raise FieldError('Cannot combine {} and {} frames.'.format(
                self._field, other.field))
        if other.dim != self.dim:
            raise DimensionError('Dimension mismatch: {} != {}.'.format(
                self.dim, other.dim))
        return Frame(np.concatenate([self._matrix, other.matrix]),
                     self._field, self._labels + other.labels, dim=self.dim,
                     name=self.name if name is None else name)

    def to_dict(self):
        """Return a JSON-serializable dict."""
        return dict(field=self._field.value, dim=self.dim, name=self.name,
                    vectors=[v.to_dict()['coeffs'] for v in self.vectors],
                    labels=list(self._labels))

    @classmethod
    def from_dict(cls, data):
        field = ScalarField.get(data['field'])
        dim = int(data['dim'])
        rows = [Vector.from_dict(dict(field=field.value, coeffs=c)).coeffs
                for c in data['vectors']]
        matrix = np.array(rows) if rows else np.zeros((0, dim), field.dtype)
        return cls(matrix, field, data.get('labels'), dim=dim,
                   name=data.get('name', ''))

    def save(self, name, overwrite=True):
        """Save this frame as a JSON file.

        Parameters
        ----------
        name : str
            File name to write. Will be located in the configuration
            output path unless it is an absolute path.
        overwrite : bool
            Silently overwrite any existing file when True.
        """
        config = phaselip.config.Configuration()
        fullname = config.get_path(name)
        mode = 'w' if overwrite else 'x'
        with open(fullname, mode) as f:
            json.dump(self.to_dict(), f, sort_keys=True)
        log = desiutil.log.get_logger()
        log.info('Saved frame "{}" with {} vectors to {}.'.format(
            self.name, self.size, fullname))

    @classmethod
    def read(cls, name):
        """Read a frame saved with :meth:`save`."""
        config = phaselip.config.Configuration()
        fullname = config.get_path(name)
        with open(fullname) as f:
            frame = cls.from_dict(json.load(f))
        log = desiutil.log.get_logger()
        log.info('Restored frame "{}" from {}.'.format(frame.name, fullname))
        return frame


def _coeffs(frame, f):
    """Coefficient array of f after checking it against the frame."""
    if isinstance(f, Vector):
        check_compatible(Vector.zeros(frame.dim, frame.field), f)
        return f.coeffs
    F = np.asarray(f)
    if F.shape[-1] != frame.dim:
        raise DimensionError('Dimension mismatch: {} != {}.'.format(
            F.shape[-1], frame.dim))
    return F


def analysis(frame, f):
    """Frame coefficients <f, phi_k> of f.

    Parameters
    ----------
    frame : Frame
        The frame.
    f : Vector or array
        A vector, or an array of shape (..., dim) of coefficients.

    Returns
    -------
    array
        Array of shape (..., frame.size).
    """
    return _coeffs(frame, f) @ frame.matrix.conj().T


def measure(frame, f):
    """Phaseless measurements |<f, phi_k>| of f."""
    return np.abs(analysis(frame, f))


def measurement_distances(frame, F, G):
    """Euclidean distances between the measurements of corresponding rows.

    Entry differences are evaluated as Re((a - b) conj(a + b)) / (|a| + |b|)
    with a - b = <f - g, phi_k>, which keeps full relative precision when
    f and g nearly coincide.
    """
    F, G = _coeffs(frame, F), _coeffs(frame, G)
    if F.shape != G.shape:
        raise DimensionError('Shape mismatch: {} != {}.'.format(
            F.shape, G.shape))
    Ta = analysis(frame, F)
    Tb = analysis(frame, G)
    Td = analysis(frame, F - G)
    den = np.abs(Ta) + np.abs(Tb)
    num = np.real(Td * np.conj(Ta + Tb))
    diff = np.where(den > 0, num / np.where(den > 0, den, 1.), 0.)
    return np.linalg.norm(diff, axis=-1)


def measurement_distance(frame, f, g):
    """Distance ||A(f) - A(g)|| between the measurements of two vectors."""
    if isinstance(f, Vector) and isinstance(g, Vector):
        check_compatible(f, g)
    return float(measurement_distances(frame, f, g)[()])


def frame_operator(frame):
    """The Hermitian (dim, dim) matrix S = sum_k phi_k phi_k^*."""
    Phi = frame.matrix
    return Phi.T @ Phi.conj()


def frame_bounds(frame):
    """Optimal frame bounds from the spectrum of the frame operator.

    Returns
    -------
    FrameBounds
        Named tuple (A, B) of the smallest and largest eigenvalue.

    Raises
    ------
    EmptyFrameError
        When the frame has no vectors.
    NumericalError
        When the eigensolver fails.
    """
    if frame.size == 0:
        raise EmptyFrameError('Frame "{}" has no vectors.'.format(frame.name))
    try:
        evals = scipy.linalg.eigh(frame_operator(frame), eigvals_only=True)
    except (scipy.linalg.LinAlgError, ValueError) as e:
        raise NumericalError('Eigensolver failed: {}'.format(e))
    return FrameBounds(float(max(evals[0], 0.)), float(evals[-1]))


def is_valid(frame):
    """True when the lower frame bound exceeds the validity threshold."""
    return frame.size > 0 and frame_bounds(frame).A > VALID_LOWER_BOUND


def parsevalize(family):
    """Canonical Parseval frame {S^(-1/2) phi_k} of a spanning family.

    Raises
    ------
    RankError
        When the family does not span its space.
    """
    if family.size == 0:
        raise EmptyFrameError('Frame "{}" has no vectors.'.format(family.name))
    try:
        evals, evecs = scipy.linalg.eigh(frame_operator(family))
    except (scipy.linalg.LinAlgError, ValueError) as e:
        raise NumericalError('Eigensolver failed: {}'.format(e))
    if evals[0] <= max(EIGENVALUE_FLOOR, VALID_LOWER_BOUND):
        raise RankError('Family "{}" does not span dim {} (lambda_min={:.3g}).'
                        .format(family.name, family.dim, evals[0]))
    S_inv_half = (evecs / np.sqrt(evals)) @ evecs.conj().T
    return Frame(family.matrix @ S_inv_half.T, family.field, family.labels,
                 dim=family.dim, name=family.name)
