import csv
import logging
import os
from collections import namedtuple, OrderedDict
import numpy as np
from scipy.integrate import solve_ivp
from lmfit.models import PowerLawModel
import gridinertia.constants as constants
from gridinertia.equilibrium import solve_fixed_point, post_fault_sync_frequency
from gridinertia.errors import (IntegrationError, StepSizeUnderflow, NonFiniteState, HorizonTooShort,
                                InertiaFloorViolation, InvalidFault, InvalidPolicy)
from gridinertia.helpers import format_float
from gridinertia.metrics import quadrature_integrands, area_average_matrix, tail_bounds_of, tail_converged

constants.init()
logger = logging.getLogger(__name__)

FLOOR_TOL = 1e-8
EVAL_CHUNK = 20000

Fault = namedtuple('Fault', ['node', 'delta_P', 'time'])
Fault.__new__.__defaults__ = (0.,)
Fault.__doc__ = """ Step change of delta_P (pu) in the injection of `node` at `time` (s) """


def check_fault(grid, fault):
    if not 0 <= int(fault.node) < grid.numNodes:
        raise InvalidFault("Fault node %s is not in the grid" % fault.node)
    if fault.delta_P == 0 or not np.isfinite(fault.delta_P):
        raise InvalidFault("Fault power step must be finite and non-zero, got %s" % fault.delta_P)
    return Fault(int(fault.node), float(fault.delta_P), float(fault.time))


class VsgPolicy(object):
    PLAIN = 'plain'
    DEADBAND = 'deadband'
    REARM = 'rearm'

    def __init__(self, mode=PLAIN, epsilon=None, m_reset=None, band=None, hold=None):
        """ Inertia control law of the VSG nodes.

        Parameters
        ----------
        mode : str
            'plain': m_dot = alpha |omega_dot| - beta (m - m_min), started from m_min.
            'deadband': the driving term becomes alpha (max(|omega_dot|, epsilon) - epsilon).
            'rearm': starts from m_reset and, once every node has stayed within `band` of omega_sync for `hold`
            seconds, resets the inertia to m_reset and freezes it for the rest of the run.
        epsilon : float
            Deadband width in rad/s^2. Deadband only.
        m_reset : float, dict or None
            Reset inertia in pu, global or keyed by VSG node id. None uses each VSG's reference inertia m.
        band : float
            Rad/s. Defaults to constants.REARM_BAND (0.1 mHz).
        hold : float
            Seconds. Defaults to constants.REARM_HOLD.
        """
        if mode not in (self.PLAIN, self.DEADBAND, self.REARM):
            raise InvalidPolicy("Unknown VSG policy '%s'" % mode)
        self.mode = mode
        self.epsilon = epsilon
        self.mReset = m_reset
        self.band = band
        self.hold = hold
        if mode == self.DEADBAND:
            if epsilon is None or not epsilon > 0:
                raise InvalidPolicy("Deadband epsilon must be > 0, got %s" % epsilon)
        if mode == self.REARM:
            self.band = constants.REARM_BAND if band is None else band
            self.hold = constants.REARM_HOLD if hold is None else hold
            if not self.band > 0 or not self.hold > 0:
                raise InvalidPolicy("Rearm band and hold must be > 0")

    @classmethod
    def plain(cls):
        return cls(cls.PLAIN)

    @classmethod
    def deadband(cls, epsilon):
        return cls(cls.DEADBAND, epsilon=epsilon)

    @classmethod
    def rearm(cls, m_reset=None, band=None, hold=None):
        return cls(cls.REARM, m_reset=m_reset, band=band, hold=hold)

    def reset_inertia(self, grid):
        """ Rearm value of every VSG, in the order of grid.vsgIdx """
        values = []
        for nodeId in grid.vsgIdx:
            if isinstance(self.mReset, dict):
                value = self.mReset.get(int(nodeId), self.mReset.get(str(nodeId)))
            elif self.mReset is not None:
                value = self.mReset
            else:
                value = grid.m[nodeId]
            if value is None or not np.isfinite(value):
                raise InvalidPolicy("VSG %d has no reference inertia; give m_reset explicitly" % nodeId)
            if value < grid.mMin[nodeId]:
                raise InvalidPolicy("m_reset %.4g below m_min %.4g at VSG %d" % (value, grid.mMin[nodeId], nodeId))
            values.append(float(value))
        return np.array(values)

    def initial_inertia(self, grid):
        if self.mode == self.REARM:
            return self.reset_inertia(grid)
        return np.array(grid.mMin[grid.vsgIdx])

    def as_dict(self):
        return OrderedDict([('mode', self.mode), ('epsilon', self.epsilon), ('m_reset', self.mReset),
                            ('band', self.band), ('hold', self.hold)])

    def __repr__(self):
        return "VsgPolicy(%s)" % ', '.join('%s=%s' % kv for kv in self.as_dict().items() if kv[1] is not None)


class StateLayout(object):
    """ Slices of the flat state vector [theta (N), omega (inertial), m (VSG), quadrature (4)] """

    def __init__(self, grid):
        N, nI, nV = grid.numNodes, grid.numInertial, grid.numVsg
        self.theta = slice(0, N)
        self.omega = slice(N, N + nI)
        self.m = slice(N + nI, N + nI + nV)
        self.quad = slice(N + nI + nV, N + nI + nV + 4)
        self.size = N + nI + nV + 4

    def pack(self, theta, omega, m, quad):
        return np.concatenate([theta, omega, m, quad])

    def unpack(self, y):
        return y[self.theta], y[self.omega], y[self.m], y[self.quad]


class State(object):
    def __init__(self, theta, omega, m, quad=None):
        self.theta = np.asarray(theta, dtype=float)
        self.omega = np.asarray(omega, dtype=float)
        self.m = np.asarray(m, dtype=float)
        self.quad = np.zeros(4) if quad is None else np.asarray(quad, dtype=float)

    @classmethod
    def at_fixed_point(cls, grid, theta0, m=None):
        m = grid.mMin[grid.vsgIdx] if m is None else m
        return cls(theta0, np.zeros(grid.numInertial), m)

    def to_vector(self):
        return np.concatenate([self.theta, self.omega, self.m, self.quad])

    @classmethod
    def from_vector(cls, grid, y):
        return cls(*StateLayout(grid).unpack(np.asarray(y, dtype=float)))

    def max_abs(self):
        return float(np.max(np.abs(self.to_vector())))


class SwingModel(object):
    def __init__(self, grid, policy=None, fault=None, omega_sync=None, armed=False):
        """ Right-hand side of the swing equations with adaptive VSG inertia and the metric quadratures.

        Inertial nodes:  m_i omega_dot_i + d_i omega_i = P_i - sum_j b_ij sin(theta_i - theta_j)
        Loads:           d_i theta_dot_i = P_i - sum_j b_ij sin(theta_i - theta_j)
        VSGs:            m_dot_i = alpha_i |omega_dot_i| - beta_i (m_i - m_min,i)

        omega_dot is evaluated first and then substituted into m_dot, so the system is an ordinary ODE.
        With `fault` the injections are post-fault. `armed` freezes the VSG inertia (after a rearm).
        """
        self.grid = grid
        self.policy = VsgPolicy.plain() if policy is None else policy
        self.layout = StateLayout(grid)
        self.fault = fault
        self.P = np.array(grid.P)
        if fault is not None:
            self.P[fault.node] += fault.delta_P
        if omega_sync is None:
            omega_sync = post_fault_sync_frequency(grid, fault).omega_sync if fault is not None else 0.
        self.omegaSync = float(omega_sync)
        self.armed = armed

        inertial = grid.inertialIdx
        self.dInertial = np.array(grid.d[inertial])
        self.dLoad = np.array(grid.d[grid.loadIdx])
        self.mConst = np.array(grid.m[inertial])
        self.alpha = np.array(grid.alpha[grid.vsgIdx])
        self.beta = np.array(grid.beta[grid.vsgIdx])
        self.mMin = np.array(grid.mMin[grid.vsgIdx])
        self.areaAverage = area_average_matrix(grid.areas)

        # index arrays for the single-state derivative called by the integrator
        self.numNodes = grid.numNodes
        self.lineFrom, self.lineTo, self.lineB = grid.lineFrom, grid.lineTo, grid.lineB
        self.inertialIdx, self.loadIdx, self.vsgPos = grid.inertialIdx, grid.loadIdx, grid.vsgPos
        if self.areaAverage is None:
            self.areaIndex = None
        else:
            labels = sorted(set(grid.areas))
            self.areaIndex = np.array([labels.index(a) for a in grid.areas])
            self.areaCounts = np.bincount(self.areaIndex).astype(float)

    def armed_copy(self):
        return SwingModel(self.grid, self.policy, self.fault, self.omegaSync, armed=True)

    def _drive(self, rocofVsg):
        alpha = self.alpha if rocofVsg.ndim == 1 else self.alpha[:, None]
        if self.policy.mode == VsgPolicy.DEADBAND:
            eps = self.policy.epsilon
            return 0.5 * alpha * (np.abs(rocofVsg + eps) + np.abs(rocofVsg - eps)) - alpha * eps
        return alpha * np.abs(rocofVsg)

    def evaluate(self, y):
        """ Derivatives and derived quantities for a state vector (n,) or a block of states (n, K).

        Returns
        -------
        dict
            theta_dot (N, K): node frequencies, omega_dot (n_inertial, K), m_dot (n_vsg, K),
            quad_dot (4, K) and inertia (n_inertial, K).
        """
        grid = self.grid
        Y = y[:, None] if y.ndim == 1 else y
        theta, omega, m = Y[self.layout.theta], Y[self.layout.omega], Y[self.layout.m]

        imbalance = self.P[:, None] - grid.nodal_flows(theta)
        thetaDot = np.empty_like(theta)
        thetaDot[grid.inertialIdx] = omega
        thetaDot[grid.loadIdx] = imbalance[grid.loadIdx] / self.dLoad[:, None]

        inertia = np.repeat(self.mConst[:, None], Y.shape[1], axis=1)
        inertia[grid.vsgPos] = m
        omegaDot = (imbalance[grid.inertialIdx] - self.dInertial[:, None] * omega) / inertia

        if self.armed:
            mDot = np.zeros_like(m)
        else:
            mDot = self._drive(omegaDot[grid.vsgPos]) - self.beta[:, None] * (m - self.mMin[:, None])

        quadDot = quadrature_integrands(thetaDot, omegaDot, inertia, self.omegaSync, self.areaAverage)

        return dict(theta_dot=thetaDot, omega_dot=omegaDot, m_dot=mDot, quad_dot=quadDot, inertia=inertia)

    def derivative(self, t, y):
        """ d/dt of one flat state vector; same equations as evaluate() without the block bookkeeping.

        Line flows are scattered onto the nodes with bincount instead of the sparse incidence product, which
        dominates the cost of a call on grids of a few hundred nodes.
        """
        layout = self.layout
        theta, omega, m = y[layout.theta], y[layout.omega], y[layout.m]

        flows = self.lineB * np.sin(theta[self.lineFrom] - theta[self.lineTo])
        imbalance = (self.P - np.bincount(self.lineFrom, flows, self.numNodes)
                     + np.bincount(self.lineTo, flows, self.numNodes))

        dy = np.empty(layout.size)
        thetaDot = dy[layout.theta]
        thetaDot[self.inertialIdx] = omega
        thetaDot[self.loadIdx] = imbalance[self.loadIdx] / self.dLoad

        inertia = self.mConst.copy()
        inertia[self.vsgPos] = m
        omegaDot = (imbalance[self.inertialIdx] - self.dInertial * omega) / inertia
        dy[layout.omega] = omegaDot

        if self.armed:
            dy[layout.m] = 0.
        else:
            dy[layout.m] = self._drive(omegaDot[self.vsgPos]) - self.beta * (m - self.mMin)

        deviation = thetaDot - self.omegaSync
        quad = dy[layout.quad]
        quad[0] = np.dot(deviation, deviation)
        quad[1] = np.dot(omegaDot, omegaDot)
        quad[2] = -np.dot(inertia, omegaDot)
        if self.areaIndex is None:
            quad[3] = 0.
        else:
            areaMean = np.bincount(self.areaIndex, thetaDot) / self.areaCounts
            spread = thetaDot - areaMean[self.areaIndex]
            quad[3] = np.dot(spread, spread)

        if not np.isfinite(dy).all():
            raise NonFiniteState("Non-finite derivative at t = %g s" % t)
        return dy

    def evaluate_blocks(self, Y):
        """ evaluate() on a long sample matrix, in chunks of columns """
        parts = [self.evaluate(Y[:, k:k + EVAL_CHUNK]) for k in range(0, Y.shape[1], EVAL_CHUNK)]
        return {key: np.concatenate([p[key] for p in parts], axis=1) for key in parts[0]}


def rhs(grid, state, policy=None, fault=None, omega_sync=None):
    """ Time derivative of `state` as a State. With `fault` the post-fault injections are used. """
    model = SwingModel(grid, policy, fault, omega_sync)
    y = state.to_vector()
    if y.size != model.layout.size:
        raise ValueError("State has %d entries, grid needs %d" % (y.size, model.layout.size))

    return State.from_vector(grid, model.derivative(0., y))


def rhs_deadband(grid, state, epsilon, fault=None, omega_sync=None):
    return rhs(grid, state, VsgPolicy.deadband(epsilon), fault, omega_sync)


class IntegratorOptions(object):
    def __init__(self, t_end=None, sample_dt=None, rtol=None, atol=None, check_horizon=True, check_floor=True,
                 max_step=np.inf):
        """ Options of :func:`integrate`. Unset values take the current defaults in gridinertia.constants.

        Parameters
        ----------
        t_end : float
            Absolute end time of the run in seconds.
        sample_dt : float
            Output sampling interval in seconds.
        rtol, atol : float
            Error tolerances of the Runge-Kutta pair.
        check_horizon : bool
            Raise HorizonTooShort when an integral measure has not converged by t_end. Campaign runs switch this
            off and let the metrics report flag the run instead.
        check_floor : bool
            Verify m >= m_min at every sample.
        max_step : float
            Largest internal step in seconds.
        """
        self.tEnd = constants.T_END if t_end is None else float(t_end)
        self.sampleDt = constants.SAMPLE_DT if sample_dt is None else float(sample_dt)
        self.rtol = constants.RTOL if rtol is None else float(rtol)
        self.atol = constants.ATOL if atol is None else float(atol)
        self.checkHorizon = check_horizon
        self.checkFloor = check_floor
        self.maxStep = max_step

    def refined(self, factor=0.5):
        """ Copy with both tolerances multiplied by `factor` """
        return IntegratorOptions(self.tEnd, self.sampleDt, self.rtol * factor, self.atol * factor, self.checkHorizon,
                                 self.checkFloor, self.maxStep)

    def as_dict(self):
        return OrderedDict([('t_end', self.tEnd), ('sample_dt', self.sampleDt), ('rtol', self.rtol),
                            ('atol', self.atol)])


def sample_times(tStart, tEnd, dt):
    if not tEnd > tStart:
        raise HorizonTooShort("t_end %g s must lie after the fault time %g s" % (tEnd, tStart))
    num = int(np.ceil((tEnd - tStart) / dt - 1e-9))
    times = tStart + dt * np.arange(num + 1)
    times[-1] = tEnd
    return times


class Trajectory(object):
    def __init__(self, times, omega, rocof=None, inertia=None, theta=None, areas=None, inertial_mask=None,
                 vsg_mask=None, m_min=None, quadrature=None, omega_sync=0., fault=None, policy=None, rearm_time=None,
                 nfev=None):
        """ Sampled run. Node arrays are node-major, shape (N, K) for N nodes and K samples.

        Parameters
        ----------
        times : array (K,)
            Strictly increasing sample times; the first is the fault time, the last t_end.
        omega : array (N, K)
            Frequency deviation of every node in rad/s. For loads it is the derived (P - flow)/d.
        rocof : array (N, K)
            omega_dot in rad/s^2; nan on load rows.
        inertia : array (N, K)
            Inertia in pu; constant on generator rows, the m state on VSG rows, nan on load rows.
        theta : array (N, K) or None
            Phase angles in rad.
        areas : tuple
            Area label of every node (None when unlabelled).
        inertial_mask, vsg_mask : array of bool (N,)
            Default to all inertial and no VSG.
        m_min : array (N,)
            VSG minimum inertia, nan elsewhere.
        quadrature : dict or None
            Terminal in-solver integrals keyed by constants.QUADRATURE_NAMES.
        omega_sync : float
            Synchronous frequency deviation of the run.
        """
        self.times = np.asarray(times, dtype=float)
        if self.times.ndim != 1 or self.times.size < 2 or np.any(np.diff(self.times) <= 0):
            raise ValueError("Sample times must be strictly increasing")
        self.omega = np.atleast_2d(np.asarray(omega, dtype=float))
        N, K = self.omega.shape
        if K != self.times.size:
            raise ValueError("omega has %d samples, times has %d" % (K, self.times.size))
        self.rocof = np.full((N, K), np.nan) if rocof is None else np.atleast_2d(np.asarray(rocof, dtype=float))
        self.inertia = np.full((N, K), np.nan) if inertia is None else np.atleast_2d(np.asarray(inertia, dtype=float))
        self.theta = None if theta is None else np.atleast_2d(np.asarray(theta, dtype=float))
        self.areas = tuple([None] * N if areas is None else areas)
        self.inertialMask = np.ones(N, dtype=bool) if inertial_mask is None else np.asarray(inertial_mask, dtype=bool)
        self.vsgMask = np.zeros(N, dtype=bool) if vsg_mask is None else np.asarray(vsg_mask, dtype=bool)
        self.mMin = np.full(N, np.nan) if m_min is None else np.asarray(m_min, dtype=float)
        self.quadrature = None if quadrature is None else OrderedDict(quadrature)
        self.omegaSync = float(omega_sync)
        self.fault = fault
        self.policy = policy
        self.rearmTime = rearm_time
        self.nfev = nfev

    @property
    def numNodes(self):
        return self.omega.shape[0]

    @property
    def numSamples(self):
        return self.times.size

    def state(self, k):
        """ State at sample k (theta, inertial omega, VSG m); the quadrature entries are not stored per sample """
        return State(self.theta[:, k], self.omega[self.inertialMask, k], self.inertia[self.vsgMask, k])

    def __repr__(self):
        return "Trajectory(%d nodes, %d samples, t = %g..%g s)" % (self.numNodes, self.numSamples, self.times[0],
                                                                  self.times[-1])


def _solve(model, y0, times, opts):
    solution = solve_ivp(model.derivative, (times[0], times[-1]), y0, method='RK45', t_eval=times,
                         rtol=opts.rtol, atol=opts.atol, max_step=opts.maxStep)
    if solution.status == -1:
        if 'step size' in solution.message.lower():
            raise StepSizeUnderflow(solution.message)
        raise IntegrationError(solution.message)
    logger.debug("RK45 segment %g..%g s: %d right-hand side evaluations", times[0], times[-1], solution.nfev)

    return solution.y, solution.nfev


def _rearm_index(frequency, times, omegaSync, band, hold):
    """ First sample index at which every node has been within `band` of omegaSync for `hold` seconds """
    inBand = np.all(np.abs(frequency - omegaSync) < band, axis=0)
    idx = np.arange(times.size)
    lastOut = np.maximum.accumulate(np.where(inBand, -1, idx))
    runStart = times[np.minimum(lastOut + 1, times.size - 1)]
    ready = np.flatnonzero(inBand & (times - runStart >= hold))

    return int(ready[0]) if ready.size else None


def integrate(grid, fault=None, policy=None, opts=None, fixed_point=None):
    """ Frequency response of the grid to a power step.

    The run starts at the fault time from the pre-fault synchronous state (theta0, omega = 0, m = m_min, or m_reset
    under the rearm policy) with post-fault injections, and is integrated with the Dormand-Prince RK45 pair.
    The four metric integrands are carried as extra states so their integrals come out of the same solve.

    Parameters
    ----------
    grid : Grid
    fault : Fault or None
        None integrates the unfaulted system from t = 0.
    policy : VsgPolicy
        Defaults to the plain adaptive law.
    opts : IntegratorOptions
    fixed_point : FixedPoint or None
        Reuse a fixed point already computed for this grid.

    Returns
    -------
    Trajectory
    """
    policy = VsgPolicy.plain() if policy is None else policy
    opts = IntegratorOptions() if opts is None else opts
    if fault is not None:
        fault = check_fault(grid, fault)
    fixedPoint = solve_fixed_point(grid) if fixed_point is None else fixed_point

    model = SwingModel(grid, policy, fault)
    layout = model.layout
    times = sample_times(fault.time if fault is not None else 0., opts.tEnd, opts.sampleDt)
    y0 = layout.pack(fixedPoint.theta0, np.zeros(grid.numInertial), policy.initial_inertia(grid), np.zeros(4))

    samples, nfev = _solve(model, y0, times, opts)
    derived = model.evaluate_blocks(samples)
    rearmTime = None
    if policy.mode == VsgPolicy.REARM and grid.numVsg > 0:
        k = _rearm_index(derived['theta_dot'], times, model.omegaSync, policy.band, policy.hold)
        if k is not None and k < times.size - 1:
            rearmTime = float(times[k])
            logger.info("Rearming VSG inertia at t = %.3f s", rearmTime)
            yReset = samples[:, k].copy()
            yReset[layout.m] = policy.reset_inertia(grid)
            armedModel = model.armed_copy()
            tail, nfevTail = _solve(armedModel, yReset, times[k:], opts)
            samples = np.hstack([samples[:, :k], tail])
            nfev += nfevTail
            derived = model.evaluate_blocks(samples)

    theta, mStates, quad = samples[layout.theta], samples[layout.m], samples[layout.quad]
    N, K = theta.shape
    rocof = np.full((N, K), np.nan)
    rocof[grid.inertialIdx] = derived['omega_dot']
    inertia = np.full((N, K), np.nan)
    inertia[grid.inertialIdx] = derived['inertia']

    if opts.checkFloor:
        for pos, nodeId in enumerate(grid.vsgIdx):
            lowest = np.min(mStates[pos])
            if lowest < grid.mMin[nodeId] - FLOOR_TOL:
                raise InertiaFloorViolation(int(nodeId), float(lowest), float(grid.mMin[nodeId]))

    inertialMask = np.zeros(N, dtype=bool)
    inertialMask[grid.inertialIdx] = True
    vsgMask = np.zeros(N, dtype=bool)
    vsgMask[grid.vsgIdx] = True
    trajectory = Trajectory(times, derived['theta_dot'], rocof, inertia, theta, grid.areas, inertialMask, vsgMask,
                            grid.mMin, OrderedDict(zip(constants.QUADRATURE_NAMES, (float(q) for q in quad[:, -1]))),
                            model.omegaSync, fault, policy, rearmTime, nfev)

    if opts.checkHorizon:
        unconverged = [name for name, (value, bound) in tail_bounds_of(trajectory).items()
                       if not tail_converged(value, bound)]
        if unconverged:
            raise HorizonTooShort("Integrals %s have not converged by t_end = %g s" % (', '.join(unconverged),
                                                                                      opts.tEnd))
    logger.info("Integrated %s to t = %g s (%s policy, %d evaluations)", grid, opts.tEnd, policy.mode, nfev)

    return trajectory


def max_inertia_profile(trajectory):
    """ Peak inertia of every VSG and the time at which it is reached.

    Returns
    -------
    OrderedDict
        node id -> (peak m in pu, time in s)
    """
    peaks = OrderedDict()
    for nodeId in np.flatnonzero(trajectory.vsgMask):
        k = int(np.argmax(trajectory.inertia[nodeId]))
        peaks[int(nodeId)] = (float(trajectory.inertia[nodeId, k]), float(trajectory.times[k]))
    return peaks


def frequency_profile(trajectory, node):
    """ Time series at one node in display units: f = omega/(2 pi) in Hz, RoCoF in Hz/s and the inertia """
    return OrderedDict([('t', trajectory.times),
                        ('f_hz', constants.rad_per_s_to_hz(trajectory.omega[node])),
                        ('rocof_hz_s', constants.rad_per_s_to_hz(trajectory.rocof[node])),
                        ('m', trajectory.inertia[node])])


def deadband_convergence(grid, fault, epsilons=(1e-3, 1e-4, 1e-5), opts=None):
    """ Sup-norm distance in omega between deadband runs and the plain run, with the fitted power in epsilon.

    The deviation is expected to scale linearly in epsilon. Tight tolerances keep the integration error well below
    the smallest deviation.
    """
    opts = IntegratorOptions(t_end=20., rtol=1e-11, atol=1e-13, check_horizon=False) if opts is None else opts
    fixedPoint = solve_fixed_point(grid)
    plain = integrate(grid, fault, VsgPolicy.plain(), opts, fixedPoint)
    deviations = []
    for eps in epsilons:
        run = integrate(grid, fault, VsgPolicy.deadband(eps), opts, fixedPoint)
        deviations.append(float(np.max(np.abs(run.omega - plain.omega))))
        logger.info("Deadband epsilon %.1e: sup |omega - omega_plain| = %.3e rad/s", eps, deviations[-1])

    x, y = np.asarray(epsilons, dtype=float), np.asarray(deviations)
    powMod = PowerLawModel()
    pars = powMod.make_params(amplitude=y[0] / x[0], exponent=1.)
    fit = powMod.fit(y, pars, x=x, weights=1. / y)

    return OrderedDict([('epsilons', list(x)), ('deviations', deviations),
                        ('exponent', fit.params['exponent'].value),
                        ('exponent_stderr', fit.params['exponent'].stderr)])


def save_trajectory_csv(trajectory, filename):
    """ Long-format export with header t,node_id,theta,omega,rocof,m (rocof and m empty where not defined) """
    if os.path.dirname(filename) and not os.path.exists(os.path.dirname(filename)):
        os.makedirs(os.path.dirname(filename))
    theta = trajectory.theta if trajectory.theta is not None else np.full_like(trajectory.omega, np.nan)
    with open(filename, 'w', newline='') as csvFile:
        writer = csv.writer(csvFile)
        writer.writerow(['t', 'node_id', 'theta', 'omega', 'rocof', 'm'])
        for k, t in enumerate(trajectory.times):
            for i in range(trajectory.numNodes):
                writer.writerow(['%.6f' % t, i, '%.12g' % theta[i, k], '%.12g' % trajectory.omega[i, k],
                                 '%.12g' % trajectory.rocof[i, k] if trajectory.inertialMask[i] else '',
                                 '%.12g' % trajectory.inertia[i, k] if trajectory.vsgMask[i] else ''])


def save_frequency_profile_csv(trajectory, node, filename):
    profile = frequency_profile(trajectory, node)
    with open(filename, 'w', newline='') as csvFile:
        writer = csv.writer(csvFile)
        writer.writerow(list(profile.keys()))
        for row in zip(*profile.values()):
            writer.writerow([format_float(v) if np.isfinite(v) else '' for v in row])
