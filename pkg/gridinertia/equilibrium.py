import logging
import warnings
from collections import namedtuple
import numpy as np
from scipy.sparse.linalg import spsolve
from scipy.sparse.linalg import MatrixRankWarning
import gridinertia.constants as constants
from gridinertia.errors import NoConvergence, AngleOutOfRange

constants.init()
logger = logging.getLogger(__name__)

FixedPoint = namedtuple('FixedPoint', ['theta0', 'residual_norm', 'iterations', 'history'])
SyncFrequency = namedtuple('SyncFrequency', ['omega_sync'])


def flow_mismatch(grid, theta):
    """ P_i - sum_j b_ij sin(theta_i - theta_j) """
    return grid.P - grid.nodal_flows(theta)


def wrap_angle(delta):
    return np.angle(np.exp(1j * np.asarray(delta)))


def solve_fixed_point(grid, initial_guess=None, tol=None, max_iter=None, max_halvings=None):
    """ Synchronous fixed point theta0 of the lossless grid (all frequency deviations zero).

    Newton iteration on the reduced system with node 0 pinned at angle 0; the Jacobian is the weighted Laplacian
    with row and column 0 removed. Each step is safeguarded by backtracking: the step is halved (up to
    `max_halvings` times) until the max-norm residual decreases, and NoConvergence is raised when no halving
    does, so the residual history is strictly decreasing.

    Returns
    -------
    FixedPoint
        theta0 (rad, node 0 at 0), the final max residual (pu), the iteration count and the residual history.
    """
    tol = constants.NEWTON_TOL if tol is None else tol
    max_iter = constants.NEWTON_MAX_ITER if max_iter is None else max_iter
    max_halvings = constants.NEWTON_MAX_HALVINGS if max_halvings is None else max_halvings

    theta = np.zeros(grid.numNodes) if initial_guess is None else np.array(initial_guess, dtype=float)
    theta = theta - theta[0]
    residual = np.max(np.abs(flow_mismatch(grid, theta)))
    history = [residual]

    iteration = 0
    while residual > tol:
        if iteration >= max_iter:
            raise NoConvergence(iteration, residual)
        iteration += 1
        mismatch = flow_mismatch(grid, theta)
        laplacian = grid.laplacian(theta)[1:, 1:].tocsc()
        with warnings.catch_warnings():
            warnings.simplefilter('error', MatrixRankWarning)
            try:
                step = np.concatenate([[0.], np.atleast_1d(spsolve(laplacian, mismatch[1:]))])
            except (MatrixRankWarning, RuntimeError):
                step = np.full(grid.numNodes, np.nan)
        if not np.all(np.isfinite(step)):
            raise NoConvergence(iteration, residual)

        scale = 1.
        for halving in range(max_halvings + 1):
            trial = theta + scale * step
            trialResidual = np.max(np.abs(flow_mismatch(grid, trial)))
            if trialResidual < residual:
                break
            scale *= 0.5
        else:
            logger.warning("Newton iteration %d: residual %.3e not lowered by %d step halvings", iteration,
                           residual, max_halvings)
            raise NoConvergence(iteration, residual)
        theta, residual = trial, trialResidual
        history.append(residual)
        logger.debug("Newton iteration %d: step scale %g, residual %.3e", iteration, scale, residual)

    # polish: one more full step when it still lowers the residual
    if 0 < residual and grid.numNodes > 1:
        try:
            step = np.concatenate([[0.], np.atleast_1d(spsolve(grid.laplacian(theta)[1:, 1:].tocsc(),
                                                                 flow_mismatch(grid, theta)[1:]))])
            polished = np.max(np.abs(flow_mismatch(grid, theta + step)))
            if np.all(np.isfinite(step)) and polished < residual:
                theta, residual = theta + step, polished
                history.append(residual)
        except RuntimeError:
            pass

    if len(history) >= 3 and min(history[-3:]) > 0 and history[-2] != history[-3]:
        order = np.log(history[-1] / history[-2]) / np.log(history[-2] / history[-3])
        logger.debug("Newton convergence order estimate %.2f", order)
    logger.info("Fixed point found in %d Newton iterations (residual %.2e pu)", iteration, residual)

    delta = wrap_angle(theta[grid.lineFrom] - theta[grid.lineTo])
    for k in np.flatnonzero(np.abs(delta) >= np.pi / 2):
        raise AngleOutOfRange((int(grid.lineFrom[k]), int(grid.lineTo[k])), float(delta[k]))

    return FixedPoint(theta, float(residual), iteration, tuple(float(h) for h in history))


def total_damping(grid):
    return float(np.sum(grid.d))


def post_fault_sync_frequency(grid, fault):
    """ Uniform frequency deviation delta_P / sum_i d_i reached after a power step on a balanced grid.

    Summing the node equations cancels the line flows, and at the synchronous state every omega_dot is zero,
    so sum_i d_i omega_sync = delta_P. Before the fault omega_sync is 0.
    """
    return SyncFrequency(float(fault.delta_P) / total_damping(grid))
