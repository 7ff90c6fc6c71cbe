""" Small-signal analysis around the synchronous fixed point. """
import logging
from collections import OrderedDict
import numpy as np
from scipy import linalg
from scipy.optimize import linear_sum_assignment
import gridinertia.constants as constants
from gridinertia.equilibrium import solve_fixed_point
from gridinertia.errors import SpectrumMismatch

constants.init()
logger = logging.getLogger(__name__)

UNION_TOL = 1e-8


class Laplacian(object):
    def __init__(self, matrix):
        """ Dense weighted Laplacian, L_ij = -b_ij cos(theta0_i - theta0_j) and L_ii = sum_j b_ij cos(...) """
        self.matrix = np.asarray(matrix, dtype=float)

    @property
    def size(self):
        return self.matrix.shape[0]

    def row_sums(self):
        return self.matrix.sum(axis=1)

    def eigenvalues(self):
        return linalg.eigvalsh(self.matrix)

    def is_psd(self, tol=1e-10):
        return bool(self.eigenvalues()[0] > -tol)

    def num_zero_modes(self, tol=1e-9):
        scale = max(1., float(np.max(np.abs(self.matrix))))
        return int(np.sum(np.abs(self.eigenvalues()) < tol * scale))


def laplacian(grid, theta0):
    incidence = grid.incidence.toarray()
    weights = grid.lineB * np.cos(incidence @ np.asarray(theta0, dtype=float))

    return Laplacian(incidence.T @ (weights[:, None] * incidence))


class JacobianBlocks(object):
    def __init__(self, grid, matrix, lap):
        """ Linearization of the swing dynamics at (theta0, omega = 0, m = m_min).

        The state is ordered as in the dynamics: theta for every node, omega for the inertial nodes, m for the VSGs.
        With VSGs only this is the block matrix

            [      0          1       0  ]
            [ -M^-1 L    -M^-1 D      0  ]
            [      0          0     -beta]

        with M = diag(m_min). Load angles appear as first-order rows -L_load/d_load, and conventional generators
        carry their constant m in M without an m row.
        """
        self.grid = grid
        self.matrix = matrix
        self.laplacian = lap
        N, nI, nV = grid.numNodes, grid.numInertial, grid.numVsg
        self.theta = slice(0, N)
        self.omega = slice(N, N + nI)
        self.m = slice(N + nI, N + nI + nV)
        self.numSwing = N + nI

    @property
    def stability_matrix(self):
        """ The theta/omega block: the Jacobian of the same grid with constant inertia m_min """
        return self.matrix[:self.numSwing, :self.numSwing]

    def block(self, rows, cols):
        return self.matrix[getattr(self, rows), getattr(self, cols)]


def full_jacobian(grid, theta0=None):
    theta0 = solve_fixed_point(grid).theta0 if theta0 is None else np.asarray(theta0, dtype=float)
    lap = laplacian(grid, theta0)
    L = lap.matrix
    N, nI, nV = grid.numNodes, grid.numInertial, grid.numVsg
    J = np.zeros((N + nI + nV, N + nI + nV))
    inertia = grid.inertia()

    J[grid.inertialIdx, N + np.arange(nI)] = 1.
    J[grid.loadIdx, :N] = -L[grid.loadIdx] / grid.d[grid.loadIdx][:, None]
    J[N:N + nI, :N] = -L[grid.inertialIdx] / inertia[:, None]
    J[N + np.arange(nI), N + np.arange(nI)] = -grid.d[grid.inertialIdx] / inertia
    J[N + nI + np.arange(nV), N + nI + np.arange(nV)] = -grid.beta[grid.vsgIdx]

    return JacobianBlocks(grid, J, lap)


def _pair(first, second):
    """ Minimum-distance one-to-one pairing of two spectra, returns the distance of every pair """
    cost = np.abs(first[:, None] - second[None, :])
    rows, cols = linear_sum_assignment(cost)
    return cost[rows, cols]


def spectral_abscissa(eigenvalues):
    """ Largest real part, leaving out the eigenvalue closest to zero (the rotational gauge mode) """
    eigenvalues = np.asarray(eigenvalues)
    if eigenvalues.size <= 1:
        return -np.inf
    rest = np.delete(eigenvalues, np.argmin(np.abs(eigenvalues)))
    return float(np.max(rest.real))


def spectrum_union_check(grid, theta0=None, tol=UNION_TOL, raise_on_mismatch=True):
    """ Checks that the spectrum of the full Jacobian is that of the constant-inertia stability matrix plus -beta_k.

    Returns
    -------
    OrderedDict
        full and constant-inertia spectra, pairing distances, the spectral abscissa without the zero mode, the
        largest residual |J v - lambda v| of the embedded eigenvectors [u; 0] and the pass flag.
    """
    blocks = full_jacobian(grid, theta0)
    J, A = blocks.matrix, blocks.stability_matrix
    eigFull = linalg.eigvals(J)
    eigA, vecA = linalg.eig(A)
    betas = np.array(grid.beta[grid.vsgIdx], dtype=complex)
    expected = np.concatenate([eigA, -betas])

    distances = _pair(eigFull, expected)
    maxDistance = float(np.max(distances)) if distances.size else 0.

    residual = 0.
    for k, lam in enumerate(eigA):
        v = np.zeros(J.shape[0], dtype=complex)
        v[:A.shape[0]] = vecA[:, k] / np.linalg.norm(vecA[:, k])
        residual = max(residual, float(np.linalg.norm(J @ v - lam * v)))

    passed = maxDistance <= tol and residual <= tol
    report = OrderedDict([
        ('num_nodes', grid.numNodes), ('num_vsg', grid.numVsg),
        ('spectrum_full', _complex_list(eigFull)), ('spectrum_constant', _complex_list(eigA)),
        ('betas', [float(b) for b in betas.real]),
        ('pairing_distances', [float(d) for d in np.sort(distances)[::-1]]),
        ('max_distance', maxDistance), ('embedding_residual', residual),
        ('spectral_abscissa', spectral_abscissa(eigFull)), ('passed', bool(passed))])
    logger.info("Spectrum union check: max distance %.2e, embedding residual %.2e, abscissa %.4g",
                maxDistance, residual, report['spectral_abscissa'])
    if not passed and raise_on_mismatch:
        raise SpectrumMismatch(max(maxDistance, residual))

    return report


def _complex_list(values):
    order = np.lexsort((np.asarray(values).imag, np.asarray(values).real))
    return [[float(values[i].real), float(values[i].imag)] for i in order]
