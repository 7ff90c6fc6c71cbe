import logging
from collections import OrderedDict
import numpy as np
import scipy.sparse as sp
from scipy.integrate import trapezoid
from lmfit.models import LinearModel
from uncertainties import ufloat
import gridinertia.constants as constants
from gridinertia.errors import NonConvergedTail, NeverSynchronized, MissingAreaLabel

constants.init()
logger = logging.getLogger(__name__)

NOISE_FLOOR = 1e-12  # integrands this far below the accumulated value are round-off, not a tail
ABSOLUTE_FLOOR = 1e-16


def area_average_matrix(areas):
    """ Sparse N x N matrix mapping node frequencies to the mean frequency of each node's area.

    Returns None when a node has no area label.
    """
    if any(a is None for a in areas):
        return None
    labels = sorted(set(areas))
    index = np.array([labels.index(a) for a in areas])
    counts = np.bincount(index)
    members = sp.csr_matrix((np.ones(len(areas)), (index, np.arange(len(areas)))), shape=(len(labels), len(areas)))
    spread = sp.csr_matrix((1. / counts[index], (np.arange(len(areas)), index)), shape=(len(areas), len(labels)))

    return (spread @ members).tocsr()


def coherency_integrand(frequency, areaAverage):
    return np.sum((frequency - areaAverage @ frequency) ** 2, axis=0)


def quadrature_integrands(frequency, rocof, inertia, omega_sync, areaAverage=None):
    """ The four metric integrands, evaluated on one state or on a block of samples.

    Parameters
    ----------
    frequency : array (N,) or (N, K)
        Frequency deviation of every node: the omega state of inertial nodes, (P - flow)/d for loads.
    rocof : array (n_inertial,) or (n_inertial, K)
        omega_dot of the inertial nodes.
    inertia : array like rocof
        Inertia of the inertial nodes (constant for generators, state for VSGs).
    omega_sync : float
        Synchronous frequency deviation the run relaxes to.
    areaAverage : sparse matrix or None
        From :func:`area_average_matrix`. The coherency integrand is 0 without it.

    Returns
    -------
    array (4,) or (4, K)
        In the order of constants.QUADRATURE_NAMES: frequency, RoCoF, energy and coherency integrands.
    """
    freqTerm = np.sum((frequency - omega_sync) ** 2, axis=0)
    rocofTerm = np.sum(rocof ** 2, axis=0)
    energyTerm = -np.sum(inertia * rocof, axis=0)
    coherencyTerm = np.zeros_like(freqTerm) if areaAverage is None else coherency_integrand(frequency, areaAverage)

    return np.array([freqTerm, rocofTerm, energyTerm, coherencyTerm])


def integrand_series(trajectory, omega_sync=None):
    """ Integrand time series recomputed from the stored samples, shape (4, K) """
    omegaSync = trajectory.omegaSync if omega_sync is None else omega_sync
    mask = trajectory.inertialMask

    return quadrature_integrands(trajectory.omega, trajectory.rocof[mask], trajectory.inertia[mask], omegaSync,
                                 area_average_matrix(trajectory.areas))


def tail_bound(times, integrand, value=0., window=None, num_blocks=20):
    """ Estimated integral of |integrand| beyond the last sample.

    The envelope (block maxima of |integrand| over the last `window` fraction of the horizon) is fitted with an
    exponential, log(env) = intercept + slope*t. For a decaying fit the remaining tail is env(t_end)/(-slope).
    A flat or growing envelope gives an infinite bound unless it sits at round-off level relative to `value`.
    """
    window = constants.TAIL_WINDOW if window is None else window
    g = np.abs(np.asarray(integrand, dtype=float))
    times = np.asarray(times, dtype=float)
    horizon = times[-1] - times[0]
    mask = times >= times[-1] - window * horizon
    tWindow, gWindow = times[mask], g[mask]
    if not np.any(gWindow > 0):
        return 0.

    numBlocks = max(2, min(num_blocks, gWindow.size // 2))
    blocks = np.array_split(np.arange(gWindow.size), numBlocks)
    envelope = np.array([gWindow[b].max() for b in blocks])
    centres = np.array([tWindow[b].mean() for b in blocks])
    if envelope[-1] == 0:
        return 0.
    positive = envelope > 0
    if positive.sum() < 3:
        return np.inf

    linMod = LinearModel()
    logEnv = np.log(envelope[positive])
    pars = linMod.guess(logEnv, x=centres[positive])
    fit = linMod.fit(logEnv, pars, x=centres[positive])
    slope = fit.params['slope'].value
    envEnd = np.exp(fit.params['intercept'].value + slope * times[-1])

    if slope < 0:
        return float(envEnd / -slope)
    if envEnd * horizon <= max(NOISE_FLOOR * abs(value), ABSOLUTE_FLOOR):
        return float(envEnd * horizon)
    return np.inf


def tail_converged(value, bound, tail_fraction=None):
    tailFraction = constants.TAIL_FRACTION if tail_fraction is None else tail_fraction
    return bound <= max(tailFraction * abs(value), ABSOLUTE_FLOOR)


def _check_tail(name, value, bound, strict, tail_fraction=None):
    converged = tail_converged(value, bound, tail_fraction)
    if not converged:
        if strict:
            raise NonConvergedTail(name, bound, value)
        logger.warning("%s tail not converged: bound %.3e vs accumulated %.3e", name, bound, value)
    return converged


def _integral(trajectory, row, omega_sync):
    """ (value, tail bound) of one integrand; in-solver quadrature when available, otherwise trapezoid """
    series = integrand_series(trajectory, omega_sync)[row]
    sameSync = omega_sync is None or omega_sync == trajectory.omegaSync
    if trajectory.quadrature is not None and sameSync:
        value = trajectory.quadrature[constants.QUADRATURE_NAMES[row]]
    else:
        value = float(trapezoid(series, trajectory.times))

    return value, tail_bound(trajectory.times, series, value)


def l2_freq(trajectory, omega_sync=None, strict=True):
    """ sum over all nodes of the integral of (omega_i - omega_sync)^2, in (rad/s)^2 s """
    value, bound = _integral(trajectory, 0, omega_sync)
    _check_tail('l2_freq', value, bound, strict)
    return value


def l2_rocof(trajectory, strict=True):
    """ sum over inertial nodes of the integral of omega_dot_i^2. Loads are excluded. """
    value, bound = _integral(trajectory, 1, None)
    _check_tail('l2_rocof', value, bound, strict)
    return value


def inertial_energy(trajectory, strict=True):
    """ E_rot = -sum over inertial nodes of the integral of m_i omega_dot_i """
    value, bound = _integral(trajectory, 2, None)
    _check_tail('e_rot', value, bound, strict)
    return value


def coherency(trajectory, areas=None, strict=True):
    """ sum_i of the integral of (omega_i - mean frequency of the area of i)^2.

    Area means are taken over all nodes of the area, inertial and load alike.
    """
    areas = trajectory.areas if areas is None else tuple(areas)
    for node, area in enumerate(areas):
        if area is None:
            raise MissingAreaLabel(node)
    if tuple(areas) == tuple(trajectory.areas) and trajectory.quadrature is not None:
        value, bound = _integral(trajectory, 3, None)
    else:
        series = coherency_integrand(trajectory.omega, area_average_matrix(areas))
        value = float(trapezoid(series, trajectory.times))
        bound = tail_bound(trajectory.times, series, value)
    _check_tail('coherency', value, bound, strict)
    return value


def resync_time(trajectory, omega_sync=None, threshold=None):
    """ Time after the fault from which every node stays within `threshold` (default 1 mHz) of omega_sync.

    The last exit from the band counts, so a trajectory that re-enters and leaves again is not synchronized before
    it leaves for the last time. The crossing is linearly interpolated between the two samples around it.
    """
    omegaSync = trajectory.omegaSync if omega_sync is None else omega_sync
    threshold = constants.SYNC_THRESHOLD if threshold is None else threshold
    times = trajectory.times
    deviation = np.max(np.abs(trajectory.omega - omegaSync), axis=0)
    outside = np.flatnonzero(deviation >= threshold)
    if outside.size == 0:
        return 0.
    k = outside[-1]
    if k == len(times) - 1:
        raise NeverSynchronized("Frequency deviation %.3e rad/s still above %.3e rad/s at t = %g s"
                                % (deviation[-1], threshold, times[-1]))
    fraction = (deviation[k] - threshold) / (deviation[k] - deviation[k + 1])

    return float(times[k] + fraction * (times[k + 1] - times[k]) - times[0])


def max_rocof(trajectory):
    """ Largest |omega_dot| over inertial nodes and samples, with the node where it occurs """
    rocof = np.abs(trajectory.rocof[trajectory.inertialMask])
    if rocof.size == 0:
        return 0., None
    row, col = np.unravel_index(np.argmax(rocof), rocof.shape)
    nodeIds = np.flatnonzero(trajectory.inertialMask)

    return float(rocof[row, col]), int(nodeIds[row])


def trapezoid_cross_check(trajectory, omega_sync=None):
    """ Trapezoid integrals of the four integrands over the stored samples, for comparison with the quadrature """
    series = integrand_series(trajectory, omega_sync)

    return OrderedDict((name, float(trapezoid(series[i], trajectory.times)))
                       for i, name in enumerate(constants.QUADRATURE_NAMES))


class MetricsReport(object):
    CSV_HEADER = ('scenario_id', 'l2_freq', 'l2_rocof', 'e_rot', 't_sync', 'coherency', 'max_rocof',
                  'max_rocof_node', 'horizon', 'converged')

    def __init__(self, l2_freq, l2_rocof, e_rot, t_sync, coherency, max_rocof, max_rocof_node, horizon_used,
                 tail_bound, flags=()):
        """ Performance measures of one run.

        Parameters
        ----------
        l2_freq, l2_rocof, e_rot, coherency : float
            Integral measures. coherency is None when the grid has no area labels.
        t_sync : float
            Resynchronization time in seconds after the fault, nan if never synchronized.
        max_rocof : float
            Largest |omega_dot| in rad/s^2, found at node max_rocof_node.
        horizon_used : float
            Integrated time span in seconds.
        tail_bound : dict
            Estimated truncation error per integral measure.
        flags : list of str
            Names of measures whose tail did not converge, plus 'never_synchronized' when applicable.
        """
        self.l2_freq = l2_freq
        self.l2_rocof = l2_rocof
        self.e_rot = e_rot
        self.t_sync = t_sync
        self.coherency = coherency
        self.max_rocof = max_rocof
        self.max_rocof_node = max_rocof_node
        self.horizonUsed = horizon_used
        self.tailBound = dict(tail_bound)
        self.flags = list(flags)

    @property
    def converged(self):
        return len(self.flags) == 0

    def value(self, name):
        return getattr(self, name)

    def as_ufloat(self, name):
        """ Measure with its tail bound as standard deviation; a plain float when the bound is 0 (t_sync, max_rocof) """
        value = np.nan if self.value(name) is None else self.value(name)
        bound = self.tailBound.get(name, 0.)
        if bound == 0:
            return float(value)
        return ufloat(value, bound)

    def as_dict(self):
        return OrderedDict([
            ('l2_freq', self.l2_freq), ('l2_rocof', self.l2_rocof), ('e_rot', self.e_rot), ('t_sync', self.t_sync),
            ('coherency', self.coherency), ('max_rocof', self.max_rocof), ('max_rocof_node', self.max_rocof_node),
            ('horizon', self.horizonUsed), ('tail_bound', dict(self.tailBound)), ('converged', self.converged),
            ('flags', list(self.flags))])

    def csv_row(self, scenario_id):
        d = self.as_dict()
        return [scenario_id] + [d[k] for k in self.CSV_HEADER[1:]]

    def __repr__(self):
        return "MetricsReport(l2_freq=%.6g, l2_rocof=%.6g, e_rot=%.6g, t_sync=%.4g, converged=%s)" % (
            self.l2_freq, self.l2_rocof, self.e_rot, self.t_sync, self.converged)


def tail_bounds_of(trajectory, omega_sync=None):
    """ (accumulated value, tail bound) of each integral measure. Coherency is left out without area labels.

    Values come from the in-solver quadrature when the trajectory carries it for the same omega_sync, otherwise
    from the trapezoid rule on the samples.
    """
    omegaSync = trajectory.omegaSync if omega_sync is None else omega_sync
    series = integrand_series(trajectory, omegaSync)
    sameSync = omegaSync == trajectory.omegaSync
    hasAreas = all(a is not None for a in trajectory.areas)
    result = OrderedDict()
    for i, name in enumerate(constants.QUADRATURE_NAMES):
        if name == 'coherency' and not hasAreas:
            continue
        if trajectory.quadrature is not None and (sameSync or name != 'l2_freq'):
            value = trajectory.quadrature[name]
        else:
            value = float(trapezoid(series[i], trajectory.times))
        result[name] = (value, tail_bound(trajectory.times, series[i], value))
    return result


def compute_metrics(trajectory, omega_sync=None, tail_fraction=None):
    """ All measures of one trajectory. Unconverged tails and missing resynchronization are flagged, not raised. """
    omegaSync = trajectory.omegaSync if omega_sync is None else omega_sync
    flags, values, bounds = [], {}, {}
    for name, (value, bound) in tail_bounds_of(trajectory, omegaSync).items():
        values[name], bounds[name] = value, bound
        if not _check_tail(name, value, bound, strict=False, tail_fraction=tail_fraction):
            flags.append(name)

    try:
        tSync = resync_time(trajectory, omegaSync)
    except NeverSynchronized as err:
        logger.warning(str(err))
        tSync = np.nan
        flags.append('never_synchronized')
    peak, peakNode = max_rocof(trajectory)

    return MetricsReport(values['l2_freq'], values['l2_rocof'], values['e_rot'], tSync, values.get('coherency'),
                         peak, peakNode, float(trajectory.times[-1] - trajectory.times[0]), bounds, flags)


RATIO_NAMES = constants.METRIC_NAMES + ('coherency', 'max_rocof')


class RatioReport(object):
    def __init__(self, ratios, flagged, uncertain):
        """ Per-measure candidate/baseline ratios. Ratios < 1 mean the candidate performs better.
        Measures with a zero baseline carry the inf sentinel and are listed in `flagged`. """
        self.ratios = OrderedDict(ratios)
        self.flagged = list(flagged)
        self.uncertain = OrderedDict(uncertain)

    def __getitem__(self, name):
        return self.ratios[name]

    def all_better(self, names=constants.METRIC_NAMES):
        return all(self.ratios[n] < 1 for n in names)

    def as_dict(self):
        return OrderedDict([('ratios', dict(self.ratios)), ('flagged', list(self.flagged)),
                            ('ratio_std', {k: getattr(v, 'std_dev', 0.) for k, v in self.uncertain.items()})])

    def __repr__(self):
        return "RatioReport(%s%s)" % (', '.join('%s=%.4g' % kv for kv in self.ratios.items()),
                                      '; flagged %s' % ', '.join(self.flagged) if self.flagged else '')


def ratio_report(candidate, baseline, names=RATIO_NAMES):
    ratios, flagged, uncertain = OrderedDict(), [], OrderedDict()
    for name in names:
        cand, base = candidate.value(name), baseline.value(name)
        if cand is None or base is None:
            continue
        if base == 0 or np.isnan(base):
            ratios[name] = np.inf
            flagged.append(name)
            logger.warning("Baseline %s is %s; ratio reported as inf", name, base)
            continue
        ratios[name] = float(cand) / float(base)
        uncertain[name] = candidate.as_ufloat(name) / baseline.as_ufloat(name)

    return RatioReport(ratios, flagged, uncertain)
