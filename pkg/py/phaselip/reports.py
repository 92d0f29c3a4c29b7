"""Stability reports, witness pairs and scan tables.

Reports are written as JSON documents with sorted keys, so two runs with
identical inputs produce identical bytes. Scans are written as CSV tables
with columns m, dq, dm, ratio.
"""
from __future__ import print_function, division, absolute_import

import collections
import enum
import json
import math

import numpy as np

import astropy.table

import desiutil.log

import phaselip.config
from phaselip.hilbert import Vector


SCHEMA_VERSION = 1


ScanRecord = collections.namedtuple('ScanRecord', ['m', 'dq', 'dm', 'ratio'])


class Verdict(enum.Enum):
    CERTIFIED = 'Certified'
    REFUTED = 'Refuted'
    INCONCLUSIVE = 'Inconclusive'


def ratio_of(dq, dm):
    """dq / dm with the conventions inf for dm = 0 < dq and 0 for 0 / 0."""
    if dm > 0:
        return dq / dm
    return math.inf if dq > 0 else 0.


class Witness(object):
    """A pair (f, g) with its quotient and measurement distances.

    Parameters
    ----------
    f, g : Vector
        The pair.
    dq : float
        Quotient distance of the pair.
    dm : float
        Measurement distance of the pair.
    ratio : float or None
        Stability quotient of the pair. Defaults to dq / dm. Hoelder
        searches store dq / (dm^sigma (|f| + |g|)^(1 - sigma)) instead.
    label : str
        Where the pair came from, e.g. "witness:m=5" or "restart:3".
    """
    def __init__(self, f, g, dq, dm, ratio=None, label=''):
        self.f = f
        self.g = g
        self.dq = float(dq)
        self.dm = float(dm)
        self.ratio = ratio_of(self.dq, self.dm) if ratio is None else float(ratio)
        self.label = label

    @property
    def injectivity_violation(self):
        return self.dm == 0 and self.dq > 0

    def __repr__(self):
        return 'Witness(label="{}", dq={:.6g}, dm={:.6g}, ratio={:.6g})'.format(
            self.label, self.dq, self.dm, self.ratio)

    def _key(self):
        return (-self.ratio, -self.dq, self.dm, self.label)

    def to_dict(self):
        return dict(f=self.f.to_dict(), g=self.g.to_dict(), dq=self.dq,
                    dm=self.dm, ratio=self.ratio, label=self.label,
                    injectivity_violation=self.injectivity_violation)

    @classmethod
    def from_dict(cls, data):
        return cls(Vector.from_dict(data['f']), Vector.from_dict(data['g']),
                   data['dq'], data['dm'], data['ratio'], data.get('label', ''))


class StabilityReport(object):
    """Outcome of a stability search, certification or scan.

    Parameters
    ----------
    frame_id : str
        Name of the frame that was examined.
    prior_id : str
        Name of the prior set, or '' for linear subspaces.
    witnesses : list of :class:`Witness`
        Retained witness pairs.
    claimed_bound : float or None
        Bound the search was certifying.
    verdict : Verdict or None
        Certification outcome, None for scans and searches.
    sigma_fit : dict or None
        Fitted Hoelder exponent with keys ``sigma`` and ``residual``.
    history : list of float
        Running maximum of the stability quotient after each restart.
    converged : bool
        True when every restart of the search converged.
    exponent : float
        Exponent of the examined inequality, 1 for Lipschitz stability.
    notes : list of str
        Free-form remarks.
    info : dict
        Additional named values, e.g. constants of a construction.
    """
    def __init__(self, frame_id, prior_id='', witnesses=(), claimed_bound=None,
                 verdict=None, sigma_fit=None, history=(), converged=True,
                 exponent=1., notes=(), info=None,
                 schema_version=SCHEMA_VERSION):
        self.frame_id = frame_id
        self.prior_id = prior_id
        self.witnesses = sorted(witnesses, key=Witness._key)
        self.claimed_bound = claimed_bound
        self.verdict = None if verdict is None else Verdict(verdict)
        self.sigma_fit = sigma_fit
        self.history = [float(h) for h in history]
        self.converged = bool(converged)
        self.exponent = float(exponent)
        self.notes = list(notes)
        self.info = dict(info or {})
        self.schema_version = schema_version

    @property
    def max_ratio(self):
        if not self.witnesses:
            return 0.
        return self.witnesses[0].ratio

    @property
    def best(self):
        """The witness with the largest ratio, or None."""
        return self.witnesses[0] if self.witnesses else None

    def merge(self, other):
        """Combine with another report on the same frame and prior.

        Witness lists are united and histories merged, so the result does
        not depend on the order of the two reports.
        """
        history = sorted(set(self.history) | set(other.history))
        notes = sorted(set(self.notes) | set(other.notes))
        info = dict(other.info)
        info.update(self.info)
        return StabilityReport(
            self.frame_id, self.prior_id, self.witnesses + other.witnesses,
            self.claimed_bound, self.verdict, self.sigma_fit or other.sigma_fit,
            history, self.converged and other.converged, self.exponent, notes,
            info)

    def to_dict(self):
        return dict(
            schema_version=self.schema_version, frame_id=self.frame_id,
            prior_id=self.prior_id, max_ratio=self.max_ratio,
            claimed_bound=self.claimed_bound,
            verdict=None if self.verdict is None else self.verdict.value,
            sigma_fit=self.sigma_fit, history=self.history,
            converged=self.converged, exponent=self.exponent,
            notes=self.notes, info=self.info,
            witnesses=[w.to_dict() for w in self.witnesses])

    @classmethod
    def from_dict(cls, data):
        if data.get('schema_version') != SCHEMA_VERSION:
            raise ValueError('Unsupported report schema_version {}.'.format(
                data.get('schema_version')))
        return cls(data['frame_id'], data['prior_id'],
                   [Witness.from_dict(w) for w in data['witnesses']],
                   data['claimed_bound'], data['verdict'], data['sigma_fit'],
                   data['history'], data['converged'], data['exponent'],
                   data['notes'], data['info'], data['schema_version'])

    def save(self, name='report.json'):
        """Save this report in the configured output path.

        Parameters
        ----------
        name : str
            File name to write, relative to the output path unless absolute.
        """
        report_write(self, name)


def report_write(report, path):
    """Write a report as a deterministic JSON document.

    Raises
    ------
    OSError
        When the file cannot be written, with the path in the message.
    """
    config = phaselip.config.Configuration()
    fullname = config.get_path(path)
    text = json.dumps(report.to_dict(), sort_keys=True, indent=1)
    try:
        with open(fullname, 'w') as f:
            f.write(text + '\n')
    except OSError as e:
        raise OSError(e.errno, 'Unable to write report to {}: {}'.format(
            fullname, e.strerror))
    log = desiutil.log.get_logger()
    log.info('Saved report for "{}" to {}.'.format(report.frame_id, fullname))


def report_read(path):
    """Read a report written by :func:`report_write`."""
    config = phaselip.config.Configuration()
    fullname = config.get_path(path)
    try:
        with open(fullname) as f:
            data = json.load(f)
    except OSError as e:
        raise OSError(e.errno, 'Unable to read report from {}: {}'.format(
            fullname, e.strerror))
    return StabilityReport.from_dict(data)


def write_scan(records, path):
    """Write scan records as CSV rows m,dq,dm,ratio with 17 digit floats."""
    config = phaselip.config.Configuration()
    fullname = config.get_path(path)
    table = astropy.table.Table()
    table['m'] = np.array([r.m for r in records], dtype=int)
    for name in 'dq', 'dm', 'ratio':
        table[name] = np.array([getattr(r, name) for r in records], dtype=float)
        table[name].format = '%.17g'
    try:
        table.write(fullname, format='ascii.csv', overwrite=True)
    except OSError as e:
        raise OSError(e.errno, 'Unable to write scan to {}: {}'.format(
            fullname, e.strerror))
    log = desiutil.log.get_logger()
    log.info('Saved {} scan rows to {}.'.format(len(records), fullname))


def read_scan(path):
    """Read scan records written by :func:`write_scan`."""
    config = phaselip.config.Configuration()
    table = astropy.table.Table.read(config.get_path(path), format='ascii.csv')
    return [ScanRecord(int(row['m']), float(row['dq']), float(row['dm']),
                       float(row['ratio'])) for row in table]
