"""Measure, search for and certify stability constants of phase retrieval.

The stability quotient of a pair (f, g) under a frame is the ratio of the
quotient distance dq = inf_|alpha|=1 ||f - alpha g|| to the measurement
distance dm = || |T f| - |T g| ||. Lipschitz stability on a set bounds this
ratio over all pairs of the set. The searches here maximize the ratio with
a derivative-free coordinate ascent, so they produce lower estimates of the
true constants and explicit witness pairs.

Hoelder stability with exponent sigma bounds the quotient
dq / (dm^sigma (||f|| + ||g||)^(1 - sigma)) instead, which reduces to the
Lipschitz ratio for sigma = 1.
"""
from __future__ import print_function, division, absolute_import

import collections
import concurrent.futures
import math

import numpy as np

import desiutil.log

import phaselip.config
from phaselip.errors import (DegenerateError, FieldError, FitError,
                             RangeError, SearchError, SpecError)
from phaselip.hilbert import (ScalarField, Vector, check_compatible, inner,
                              align_phase, quotient_distance,
                              quotient_distances)
from phaselip.frames import measurement_distance, measurement_distances
from phaselip.priors import (Provenance, repair_batch, sample_batch,
                             witness_pair)
from phaselip.reports import (ScanRecord, StabilityReport, Verdict, Witness,
                              ratio_of)


# Floor of the measurement distance inside search objectives.
TINY = 1e-300

# Restarts are run in groups of this size between checks for early stopping.
# It does not depend on the number of threads so results do not either.
RESTART_GROUP = 4

# Largest real frame whose partitions are enumerated.
MAX_PARTITION_SIZE = 20

# Relative floor of the partition eigenvalue sums below which a frame is
# not injective.
PARTITION_TOL = 1e-12


StabilityRatio = collections.namedtuple('StabilityRatio', ['dq', 'dm', 'ratio'])

HolderFit = collections.namedtuple('HolderFit', ['sigma', 'residual'])

ReductionResult = collections.namedtuple(
    'ReductionResult', ['found', 'f', 'g', 'dq', 'dm'])


class SearchConfig(object):
    """Settings of a multi-start coordinate ascent.

    Parameters
    ----------
    restarts : int
        Number of independent starts.
    max_iters : int
        Iteration limit of each start.
    step_init : float
        Initial step, relative to each coordinate's natural scale.
    step_shrink : float
        Factor in (0, 1) applied to the step when no move improves.
    tol : float
        Relative tolerance of verdicts and of the stall test.
    seed : int
        Seed from which every random stream is derived.
    min_step : float
        A start stops once its step falls below this value.
    patience : int
        A start stops when its best value gained less than ``tol``
        (relative) over this many iterations.
    samples : int
        Number of sampled pairs examined before certification searches.
    threads : int or None
        Worker threads for restarts. Uses the configured value when None.
    """
    def __init__(self, restarts, max_iters, step_init, step_shrink, tol, seed,
                 min_step=1e-9, patience=20, samples=0, threads=None):
        if threads is None:
            threads = phaselip.config.Configuration().threads
        if seed is None or int(seed) != seed or seed < 0:
            raise SpecError('A nonnegative integer seed is required, got {}.'
                            .format(seed))
        for name, value in (('restarts', restarts), ('max_iters', max_iters),
                            ('step_init', step_init), ('tol', tol),
                            ('min_step', min_step), ('patience', patience),
                            ('threads', threads)):
            if not value > 0:
                raise SpecError('Expected {} > 0, got {}.'.format(name, value))
        if not 0 < step_shrink < 1:
            raise SpecError('Expected 0 < step_shrink < 1, got {}.'.format(
                step_shrink))
        if samples < 0:
            raise SpecError('Expected samples >= 0, got {}.'.format(samples))
        self.restarts = int(restarts)
        self.max_iters = int(max_iters)
        self.step_init = float(step_init)
        self.step_shrink = float(step_shrink)
        self.tol = float(tol)
        self.seed = int(seed)
        self.min_step = float(min_step)
        self.patience = int(patience)
        self.samples = int(samples)
        self.threads = int(threads)

    @classmethod
    def from_config(cls, seed, section='search', **overrides):
        """Build from a section of the configuration plus overrides.

        Overrides with a value of None are ignored.
        """
        config = phaselip.config.Configuration()
        values = config.family_search() if section == 'family_search' \
            else config.search()
        values.update({k: v for k, v in overrides.items() if v is not None})
        return cls(seed=seed, **values)

    def to_dict(self):
        return dict(restarts=self.restarts, max_iters=self.max_iters,
                    step_init=self.step_init, step_shrink=self.step_shrink,
                    tol=self.tol, seed=self.seed, min_step=self.min_step,
                    patience=self.patience, samples=self.samples)

    def seed_sequences(self, count):
        """Independent seeds for ``count`` streams derived from the seed."""
        return np.random.SeedSequence(self.seed).spawn(count)


def exponent_restriction(gamma):
    """Largest Hoelder exponent gamma / (1 + gamma) the counterexample allows."""
    return gamma / (1. + gamma)


def guaranteed_exponent(gamma):
    """Hoelder exponent (gamma - 1) / gamma guaranteed on sets with decay gamma."""
    return (gamma - 1.) / gamma


def stability_ratio(frame, f, g):
    """Quotient distance, measurement distance and their ratio for a pair.

    Parameters
    ----------
    frame : Frame
        Frame defining the measurements.
    f, g : Vector
        The pair, not both zero.

    Returns
    -------
    StabilityRatio
        (dq, dm, ratio) with ratio = inf for an injectivity violation
        dm = 0 < dq, and 0 when dq = dm = 0.
    """
    check_compatible(f, g)
    if f.is_zero() and g.is_zero():
        raise DegenerateError('Stability ratio of two zero vectors.')
    dq = quotient_distance(f, g)
    dm = measurement_distance(frame, f, g)
    ratio = ratio_of(dq, dm)
    if math.isinf(ratio):
        log = desiutil.log.get_logger()
        log.warning('Injectivity violation: dq={:.6g} with dm=0 for "{}".'
                    .format(dq, frame.name))
    return StabilityRatio(dq, dm, ratio)


def _exact_scores(dq, dm, size, sigma):
    """Stability quotients with the exact conventions used in reports."""
    dq, dm, size = np.broadcast_arrays(dq, dm, size)
    out = np.zeros(dq.shape)
    pos = dm > 0
    out[pos] = dq[pos] / (dm[pos] ** sigma * size[pos] ** (1 - sigma))
    out[~pos & (dq > 0)] = np.inf
    return out


def _search_scores(dq, dm, size, sigma):
    """Regularized quotients used inside the ascent."""
    with np.errstate(divide='ignore', invalid='ignore', over='ignore'):
        score = dq / (np.maximum(dm, TINY) ** sigma * size ** (1 - sigma))
    return np.where(np.isfinite(score) | (score == np.inf), score, -np.inf)


def _pack(F, G, field):
    if field is ScalarField.REAL:
        return np.concatenate([F, G], axis=-1)
    return np.concatenate([F.real, F.imag, G.real, G.imag], axis=-1)


def _unpack(P, D, field):
    if field is ScalarField.REAL:
        return P[..., :D], P[..., D:]
    return (P[..., :D] + 1j * P[..., D:2 * D],
            P[..., 2 * D:3 * D] + 1j * P[..., 3 * D:])


def _coordinate_ascent(p, objective, scales, cfg, project=None, target=None):
    """Maximize ``objective`` by coordinate moves from the start ``p``.

    Every iteration evaluates all +/- step moves along the coordinates, each
    scaled by ``scales``, then takes the best single move or the combined
    move of all improving coordinates. The step shrinks when nothing
    improves.

    Returns
    -------
    tuple
        Final parameters, their objective value, and whether the start
        converged.
    """
    if project is not None:
        p = project(p[np.newaxis])[0]
    best = objective(p[np.newaxis])[0]
    step = cfg.step_init
    refined = cfg.step_init * cfg.step_shrink ** 3
    converged = False
    checkpoint = best
    n = len(p)
    basis = np.diag(scales)
    for iteration in range(1, cfg.max_iters + 1):
        if target is not None and best > target:
            break
        candidates = p + step * np.concatenate([basis, -basis])
        if project is not None:
            candidates = project(candidates)
        values = objective(candidates)
        k = int(np.argmax(values))
        if values[k] > best:
            up, down = values[:n] - best, values[n:] - best
            improving = np.maximum(up, down) > 0
            start = p
            p, best = candidates[k], values[k]
            if np.count_nonzero(improving) > 1:
                sign = np.where(up >= down, 1., -1.)
                combined = start + step * sign * scales * improving
                if project is not None:
                    combined = project(combined[np.newaxis])[0]
                value = objective(combined[np.newaxis])[0]
                if value > best:
                    p, best = combined, value
        else:
            step *= cfg.step_shrink
            if step <= refined:
                converged = True
            if step < cfg.min_step:
                break
        if iteration % cfg.patience == 0:
            if np.isfinite(checkpoint) and best <= checkpoint + cfg.tol * abs(
                    checkpoint):
                converged = True
                break
            checkpoint = best
    return p, best, converged


def _run_restarts(run, count, threads, stop=None):
    """Run ``run(index)`` for each restart and return results in index order.

    Restarts are dispatched in groups of :data:`RESTART_GROUP`; after each
    group ``stop(results)`` may end the search early.
    """
    results = []
    with concurrent.futures.ThreadPoolExecutor(max_workers=threads) as pool:
        for first in range(0, count, RESTART_GROUP):
            indices = range(first, min(count, first + RESTART_GROUP))
            results.extend(pool.map(run, indices))
            if stop is not None and stop(results):
                break
    return results


def _repair_rows(B, F):
    """Repair the rows of F that have a nonzero head, leave the others."""
    F = np.array(F)
    ok = np.any(F[:, :B.head_dim] != 0, axis=1)
    if np.any(ok):
        F[ok] = repair_batch(B, F[ok])
    return F


def _pair_witness(frame, f, g, sigma, label):
    """Witness for coefficient arrays f, g with exact distances."""
    f = Vector(f, frame.field)
    g = Vector(g, frame.field)
    dq = quotient_distance(f, g)
    dm = measurement_distance(frame, f, g)
    score = _exact_scores(dq, dm, f.norm() + g.norm(), sigma)[()]
    return Witness(f, g, dq, dm, score, label)


def _growth_witnesses(frame, B):
    """Witness pairs of the dyadic growth for every depth of a FromG prior."""
    if B.provenance is not Provenance.FROM_G or B.C is None:
        return []
    return [witness_pair(m, B.gamma, B.R, B.C, B.D, frame.field)
            for m in range(2, B.D + 1)]


def worst_pair_search(frame, B, cfg, seeds=None, stop_ratio=None, sigma=1.):
    """Search for the pair of B with the largest stability quotient.

    Each restart starts from a pair sampled from B, either independent or a
    small perturbation of each other, and runs a coordinate ascent over the
    coefficients of both vectors, repairing both back into B after every
    move. Given seed pairs, and for FromG priors the witness pairs of every
    depth, are evaluated as they are.

    Parameters
    ----------
    frame : Frame
        Frame defining the measurements.
    B : PriorSet
        Prior set of the same dimension.
    cfg : SearchConfig
        Search settings.
    seeds : list of (Vector, Vector) or None
        Additional pairs to evaluate.
    stop_ratio : float or None
        Stop as soon as a quotient above this value is found.
    sigma : float
        Exponent of the quotient, 1 for the Lipschitz ratio.

    Returns
    -------
    StabilityReport
        Report retaining every witness that raised the running maximum,
        with the running maximum after each restart in ``history``.

    Raises
    ------
    SearchError
        When no pair with a finite distance was found.
    """
    log = desiutil.log.get_logger()
    if frame.dim != B.D:
        raise SpecError('Frame dim {} != prior dim {}.'.format(frame.dim, B.D))
    field, D = frame.field, frame.dim
    pairs = list(seeds or []) + _growth_witnesses(frame, B)
    candidates = []
    for i, (f, g) in enumerate(pairs):
        label = 'seed:{}'.format(i) if i < len(seeds or []) else \
            'witness:m={}'.format(i - len(seeds or []) + 2)
        candidates.append(_pair_witness(frame, f.coeffs, g.coeffs, sigma, label))

    scales = np.tile(B.coordinate_scales(), 2 if field is ScalarField.REAL else 4)
    target = None if stop_ratio is None else float(stop_ratio)

    def project(P):
        F, G = _unpack(P, D, field)
        F, G = _repair_rows(B, F), _repair_rows(B, G)
        size = np.maximum(np.linalg.norm(F, axis=1), np.linalg.norm(G, axis=1))
        size = np.where(size > 0, size, 1.)[:, np.newaxis]
        return _pack(F / size, G / size, field)

    def objective(P):
        F, G = _unpack(P, D, field)
        nf, ng = np.linalg.norm(F, axis=1), np.linalg.norm(G, axis=1)
        valid = (np.any(F[:, :B.head_dim] != 0, axis=1) &
                 np.any(G[:, :B.head_dim] != 0, axis=1))
        score = _search_scores(quotient_distances(F, G),
                               measurement_distances(frame, F, G), nf + ng,
                               sigma)
        return np.where(valid, score, -np.inf)

    seed_best = max([w.ratio for w in candidates] + [-np.inf])
    streams = cfg.seed_sequences(cfg.restarts)

    def run(index):
        rng = np.random.default_rng(streams[index])
        F = sample_batch(B, rng, 2, field)
        f, g = F[0], F[1]
        if index % 2 == 1:
            noise = rng.standard_normal(D) * B.coordinate_scales() * 1e-2
            g = _repair_rows(B, (f + noise.astype(field.dtype))[np.newaxis])[0]
        p, value, converged = _coordinate_ascent(
            _pack(f, g, field), objective, scales, cfg, project, target)
        F, G = _unpack(p, D, field)
        witness = _pair_witness(frame, F, G, sigma, 'restart:{}'.format(index))
        log.debug('Restart {} ended at {:.6g} (converged={}).'.format(
            index, witness.ratio, converged))
        return witness, converged

    def stop(results):
        if target is None:
            return False
        return max([seed_best] + [w.ratio for w, _ in results]) > target

    if target is not None and seed_best > target:
        results = []
        log.info('Seed pairs already exceed {:.6g}, skipping restarts.'.format(
            target))
    else:
        results = _run_restarts(run, cfg.restarts, cfg.threads, stop)

    retained, history = [], []
    running = -np.inf
    for witness in candidates:
        if witness.ratio > running:
            retained.append(witness)
            running = witness.ratio
    for witness, _ in results:
        if witness.ratio > running:
            retained.append(witness)
            running = witness.ratio
        history.append(running)
    if not retained or not np.isfinite(retained[-1].dq):
        raise SearchError('No valid pair found for "{}" on "{}".'.format(
            frame.name, B.name))
    converged = all(c for _, c in results)
    report = StabilityReport(
        frame.name, B.name, retained, history=history, converged=converged,
        exponent=sigma, info=dict(restarts_run=len(results),
                                  seed_pairs=len(candidates)))
    log.info('Worst pair search on "{}" over "{}": max quotient {:.6g} after '
             '{} restarts.'.format(frame.name, B.name, report.max_ratio,
                                   len(results)))
    return report


def subspace_constant(frame, m, cfg, full_output=False):
    """Lower estimate of the stability constant of a frame on V_m.

    Pairs are restricted to the extremal regime ||f|| = 1, ||g|| <= 1 and
    <f, g> = 0 and the ratio is maximized by a multi-start coordinate ascent.

    Parameters
    ----------
    frame : Frame
        Frame defining the measurements.
    m : int
        Dimension of the head space V_m = span{e_1, ..., e_m}.
    cfg : SearchConfig
        Search settings.
    full_output : bool
        Also return the best witness when True.

    Returns
    -------
    float or tuple
        The estimate, inf when a pair with dm = 0 < dq was found.

    Raises
    ------
    RangeError
        When m is outside 1..frame.dim.
    SearchError
        When no valid pair was found.
    """
    log = desiutil.log.get_logger()
    if not 1 <= m <= frame.dim:
        raise RangeError('m={} outside 1..{}'.format(m, frame.dim))
    field, D = frame.field, frame.dim

    def pairs(P):
        U, V = _unpack(P, m, field)
        norm_u = np.linalg.norm(U, axis=1, keepdims=True)
        valid = norm_u[:, 0] > 0
        U = U / np.where(norm_u > 0, norm_u, 1.)
        V = V - np.sum(V * np.conj(U), axis=1, keepdims=True) * U
        norm_v = np.linalg.norm(V, axis=1, keepdims=True)
        V = V / np.maximum(norm_v, 1.)
        F = np.zeros((len(P), D), field.dtype)
        G = np.zeros((len(P), D), field.dtype)
        F[:, :m], G[:, :m] = U, V
        return F, G, valid

    def objective(P):
        F, G, valid = pairs(P)
        score = _search_scores(quotient_distances(F, G),
                               measurement_distances(frame, F, G), 1., 1.)
        return np.where(valid, score, -np.inf)

    scales = np.ones(2 * m if field is ScalarField.REAL else 4 * m)
    streams = cfg.seed_sequences(cfg.restarts)

    def run(index):
        rng = np.random.default_rng(streams[index])
        p = rng.standard_normal(len(scales))
        return _coordinate_ascent(p, objective, scales, cfg)

    results = _run_restarts(run, cfg.restarts, cfg.threads)
    values = [value for _, value, _ in results]
    k = int(np.argmax(values))
    if not values[k] > -np.inf:
        raise SearchError('No valid pair found on V_{} of "{}".'.format(
            m, frame.name))
    F, G, _ = pairs(results[k][0][np.newaxis])
    witness = _pair_witness(frame, F[0], G[0], 1., 'subspace:m={}'.format(m))
    if witness.injectivity_violation:
        log.warning('Frame "{}" does not do phase retrieval on V_{}.'.format(
            frame.name, m))
    log.debug('Stability constant estimate on V_{}: {:.6g}.'.format(
        m, witness.ratio))
    if full_output:
        return witness.ratio, witness
    return witness.ratio


def real_lipschitz_constant(frame, chunk=4096):
    """Exact Lipschitz constant of phase retrieval by a small real frame.

    With u = f - g and v = f + g the measurement distance of a real pair is
    sum_j min(<u, phi_j>^2, <v, phi_j>^2) and the quotient distance is
    min(|u|, |v|), so the squared inverse constant is the smallest value of
    lambda_min(S_I) + lambda_min(S_Ic) over the partitions of the frame
    into I and its complement, with S_I the frame operator of phi_j, j in I.
    Every partition is enumerated.

    Parameters
    ----------
    frame : Frame
        Real frame with at most :data:`MAX_PARTITION_SIZE` vectors.
    chunk : int
        Partitions handled per batch.

    Returns
    -------
    float
        The constant, inf when the frame does not do phase retrieval.

    Raises
    ------
    FieldError
        When the frame is complex.
    RangeError
        When the frame has too many vectors to enumerate.
    """
    log = desiutil.log.get_logger()
    if frame.field is not ScalarField.REAL:
        raise FieldError('Partitions only characterize real frames.')
    M, D = frame.size, frame.dim
    if not 1 <= M <= MAX_PARTITION_SIZE:
        raise RangeError('{} vectors outside 1..{}'.format(
            M, MAX_PARTITION_SIZE))
    outer = np.einsum('mi,mj->mij', frame.matrix, frame.matrix)
    total = outer.sum(axis=0)
    scale = max(float(np.linalg.eigvalsh(total)[-1]), TINY)
    # The last vector stays in the complement; I and Ic are symmetric.
    bits = np.arange(M - 1)
    count = 2 ** (M - 1)
    lowest = np.inf
    for first in range(0, count, chunk):
        codes = np.arange(first, min(count, first + chunk))
        mask = ((codes[:, np.newaxis] >> bits) & 1).astype(float)
        S = np.tensordot(mask, outer[:-1], axes=1)
        value = (np.linalg.eigvalsh(S)[:, 0] +
                 np.linalg.eigvalsh(total - S)[:, 0])
        lowest = min(lowest, float(value.min()))
    if lowest <= PARTITION_TOL * scale:
        log.warning('Frame "{}" does not do phase retrieval.'.format(
            frame.name))
        return np.inf
    C = float(lowest ** -0.5)
    log.debug('Exact constant of "{}" over {} partitions: {:.6g}.'.format(
        frame.name, count, C))
    return C


def holder_scan(frame, gamma, R, C, m_range):
    """Evaluate the witness pairs of the dyadic growth at several depths.

    Parameters
    ----------
    frame : Frame
        Frame defining the measurements.
    gamma, R, C : float
        Parameters of the witness pairs.
    m_range : iterable of int
        Depths to evaluate, each within 2..frame.dim.

    Returns
    -------
    list of ScanRecord
        Exact (m, dq, dm, ratio) per depth.
    """
    records = []
    for m in m_range:
        if not 2 <= m <= frame.dim:
            raise RangeError('m={} outside 2..{}'.format(m, frame.dim))
        x, y = witness_pair(m, gamma, R, C, frame.dim, frame.field)
        dq, dm, ratio = stability_ratio(frame, x, y)
        records.append(ScanRecord(int(m), dq, dm, ratio))
    return records


def holder_fit(records):
    """Fit log dq against log dm by least squares.

    Parameters
    ----------
    records : list
        ScanRecord or (dq, dm) tuples. Records without dq, dm > 0 are
        ignored.

    Returns
    -------
    HolderFit
        Slope ``sigma`` and the largest absolute deviation ``residual`` of
        log dq from the fitted line.

    Raises
    ------
    FitError
        When fewer than 3 records are usable.
    """
    pairs = []
    for record in records:
        if hasattr(record, 'dq'):
            pairs.append((record.dq, record.dm))
        else:
            pairs.append(tuple(record)[:2])
    data = np.array(pairs, dtype=float).reshape(-1, 2)
    usable = np.all(np.isfinite(data) & (data > 0), axis=1)
    if np.count_nonzero(usable) < 3:
        raise FitError('Need 3 records with dq, dm > 0, got {}.'.format(
            np.count_nonzero(usable)))
    log_dq, log_dm = np.log(data[usable, 0]), np.log(data[usable, 1])
    slope, intercept = np.polyfit(log_dm, log_dq, 1)
    residual = np.max(np.abs(log_dq - (slope * log_dm + intercept)))
    return HolderFit(float(slope), float(residual))


def _witness_norms(witnesses):
    return np.array([w.f.norm() + w.g.norm() for w in witnesses])


def holder_constant(witnesses, sigma):
    """Largest dq / (dm^sigma (||f|| + ||g||)^(1 - sigma)) over witnesses."""
    if not witnesses:
        raise FitError('Empty witness list.')
    if not 0 < sigma <= 1:
        raise RangeError('sigma={} outside (0, 1]'.format(sigma))
    dq = np.array([w.dq for w in witnesses])
    dm = np.array([w.dm for w in witnesses])
    return float(np.max(_exact_scores(dq, dm, _witness_norms(witnesses),
                                      sigma)))


def holder_to_lip_check(witnesses, sigma, tol=1e-3):
    """Check that sampled Hoelder stability implies the Lipschitz bound.

    With C the Hoelder constant of the witnesses, every witness has to
    satisfy dq <= (4 C)^(1 / sigma) dm (1 + tol).

    Parameters
    ----------
    witnesses : list of Witness
        Witness pairs, e.g. from a linear subspace.
    sigma : float
        Hoelder exponent in (0, 1].
    tol : float
        Relative tolerance.

    Returns
    -------
    bool
        False when some witness violates the bound or dm = 0 < dq.
    """
    C = holder_constant(witnesses, sigma)
    if not np.isfinite(C):
        return False
    lipschitz = (4 * C) ** (1. / sigma)
    for w in witnesses:
        if w.dq > lipschitz * w.dm * (1 + tol):
            return False
    return True


def _sampled_witness(frame, B, cfg, rng, sigma, chunk=2000):
    """Best of ``cfg.samples`` pairs drawn from B.

    Half of the pairs are independent, the others are small repaired
    perturbations of each other.
    """
    best = None
    field, D = frame.field, frame.dim
    done = 0
    while done < cfg.samples:
        count = min(chunk, cfg.samples - done)
        F = sample_batch(B, rng, count, field)
        G = sample_batch(B, rng, count, field)
        near = np.arange(count) % 2 == 1
        if np.any(near):
            noise = (rng.standard_normal((np.count_nonzero(near), D)) *
                     B.coordinate_scales() * 1e-2)
            G[near] = _repair_rows(B, F[near] + noise)
        dq = quotient_distances(F, G)
        dm = measurement_distances(frame, F, G)
        size = np.linalg.norm(F, axis=1) + np.linalg.norm(G, axis=1)
        scores = _exact_scores(dq, dm, size, sigma)
        k = int(np.argmax(scores))
        if best is None or scores[k] > best.ratio:
            best = _pair_witness(frame, F[k], G[k], sigma,
                                 'sample:{}'.format(done + k))
        done += count
    return best


def _certify(frame, B, claimed_bound, cfg, sigma):
    log = desiutil.log.get_logger()
    if not claimed_bound > 0:
        raise SpecError('Expected claimed_bound > 0, got {}.'.format(
            claimed_bound))
    limit = claimed_bound * (1 + cfg.tol)
    sampled = []
    if cfg.samples > 0:
        stream = cfg.seed_sequences(cfg.restarts + 1)[-1]
        witness = _sampled_witness(frame, B, cfg, np.random.default_rng(stream),
                                   sigma)
        sampled.append(witness)
        log.info('Best of {} sampled pairs: {:.6g}.'.format(
            cfg.samples, witness.ratio))
    if sampled and sampled[0].ratio > limit:
        report = StabilityReport(frame.name, B.name, sampled,
                                 history=[sampled[0].ratio], exponent=sigma)
    else:
        report = worst_pair_search(frame, B, cfg, stop_ratio=limit,
                                   sigma=sigma)
        if sampled:
            report = report.merge(StabilityReport(
                frame.name, B.name, sampled, history=[sampled[0].ratio],
                exponent=sigma))
    report.claimed_bound = float(claimed_bound)
    if report.max_ratio > limit:
        report.verdict = Verdict.REFUTED
        best = report.best
        if best.injectivity_violation:
            report.notes.append('injectivity violation: dm = 0 < dq')
        if sigma == 1:
            check = stability_ratio(frame, best.f, best.g)
            log.info('Refuting witness re-evaluates to ratio {:.6g}.'.format(
                check.ratio))
    elif report.converged:
        report.verdict = Verdict.CERTIFIED
    else:
        report.verdict = Verdict.INCONCLUSIVE
        log.warning('Search on "{}" did not converge.'.format(frame.name))
    report.info['samples'] = cfg.samples
    log.info('Verdict for "{}" against {:.6g}: {} (max {:.6g}).'.format(
        frame.name, claimed_bound, report.verdict.value, report.max_ratio))
    return report


def certify_lipschitz(frame, B, claimed_bound, cfg):
    """Test a claimed Lipschitz bound of the inverse measurement map on B.

    ``cfg.samples`` sampled pairs are examined first, then a worst pair
    search that stops once the bound is exceeded. Bounds stated for squared
    distances are compared through their square root.

    Returns
    -------
    StabilityReport
        Report with verdict Refuted when a witness exceeds
        ``claimed_bound * (1 + cfg.tol)``, Certified when no witness does and
        the search converged, Inconclusive otherwise.
    """
    return _certify(frame, B, claimed_bound, cfg, 1.)


def certify_holder(frame, B, sigma, claimed_bound, cfg):
    """Test a claimed Hoelder constant with exponent sigma on B.

    Same protocol as :func:`certify_lipschitz` applied to the quotient
    dq / (dm^sigma (||f|| + ||g||)^(1 - sigma)).
    """
    if not 0 < sigma <= 1:
        raise RangeError('sigma={} outside (0, 1]'.format(sigma))
    return _certify(frame, B, claimed_bound, cfg, float(sigma))


def _symmetric_grid(count, half_width):
    """Odd symmetric grid of about ``count`` points, sorted by |value|."""
    count = max(1, int(count) // 2 * 2 + 1)
    grid = np.linspace(-half_width, half_width, count)
    return grid[np.argsort(np.abs(grid), kind='stable')]


def orthogonal_reduction_check(frame, f, g, grid_size=1000, tol=1e-3):
    """Search span{f, g} for an orthogonal pair that is at least as unstable.

    After aligning the phase of g, write f = u + v and alpha g = u - v.
    The grid covers x = ||v|| e^(i phi) (cos(theta) u/||u|| + sin(theta) w)
    with w the unit vector of span{u, v} orthogonal to u, and the pairs
    (x + v, x - v). At theta = phi = 0 this is the pair (r u + v, r u - v)
    with r = ||v|| / ||u||, which is orthogonal, has the same quotient
    distance and no larger measurement distance. The origin therefore
    always qualifies up to roundoff, and ``found`` confirms that
    numerically; the rest of the grid only matters when ``tol`` is
    too strict for the roundoff of the origin pair.

    Parameters
    ----------
    frame : Frame
        Frame defining the measurements.
    f, g : Vector
        Linearly independent pair.
    grid_size : int
        Total number of grid points.
    tol : float
        Relative tolerance of the orthogonality, distance and measurement
        tests.

    Returns
    -------
    ReductionResult
        ``found`` and the qualifying pair nearest to the grid origin, or the
        pair with the smallest measurement distance when none qualifies.

    Raises
    ------
    DegenerateError
        When f and g are linearly dependent.
    """
    check_compatible(f, g)
    nf, ng = f.norm(), g.norm()
    if nf == 0 or ng == 0 or abs(inner(f, g)) >= nf * ng * (1 - 1e-12):
        raise DegenerateError('Expected linearly independent f and g.')
    dq = quotient_distance(f, g)
    dm = measurement_distance(frame, f, g)
    h = (align_phase(f, g) * g).coeffs
    u = (f.coeffs + h) / 2
    v = (f.coeffs - h) / 2
    nu, nv = np.linalg.norm(u), np.linalg.norm(v)
    u_hat = u / nu
    w = v - np.vdot(u_hat, v) * u_hat
    w_hat = w / np.linalg.norm(w)
    if f.field is ScalarField.REAL:
        thetas = _symmetric_grid(grid_size // 2, np.pi / 2)
        phis = np.array([0., np.pi])
    else:
        side = int(np.sqrt(grid_size))
        thetas = _symmetric_grid(side, np.pi / 2)
        phis = _symmetric_grid(side, np.pi)
    theta, phi = [a.reshape(-1) for a in np.meshgrid(thetas, phis,
                                                        indexing='ij')]
    order = np.argsort(np.abs(theta) + np.abs(phi), kind='stable')
    theta, phi = theta[order], phi[order]
    rotation = np.exp(1j * phi) if f.field is ScalarField.COMPLEX \
        else np.cos(phi)
    X = nv * rotation[:, np.newaxis] * (
        np.cos(theta)[:, np.newaxis] * u_hat + np.sin(theta)[:, np.newaxis] *
        w_hat)
    F, G = X + v, X - v
    dq_grid = quotient_distances(F, G)
    dm_grid = measurement_distances(frame, F, G)
    cross = np.abs(np.sum(F * np.conj(G), axis=1))
    size = np.linalg.norm(F, axis=1) * np.linalg.norm(G, axis=1)
    ok = ((cross <= tol * size) & (np.abs(dq_grid - dq) <= tol * dq) &
          (dm_grid <= dm * (1 + tol)))
    found = bool(np.any(ok))
    k = int(np.argmax(ok)) if found else int(np.argmin(dm_grid))
    return ReductionResult(found, Vector(F[k], f.field), Vector(G[k], f.field),
                           float(dq_grid[k]), float(dm_grid[k]))
