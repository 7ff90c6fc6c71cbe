import numpy as np
import pytest
from gridinertia.dynamics import Trajectory
from gridinertia.grid_model import Grid, Node, NodeKind
from gridinertia.network_library import two_bus, four_node


@pytest.fixture
def pair_grid():
    return two_bus(p=0.5, b=1.)


@pytest.fixture
def four_node_grid():
    return four_node()


@pytest.fixture
def lone_vsg():
    """ One isolated VSG: no lines, no injection """
    def _create(m=1.0, m_min=0.2, d=0.3, alpha=1., beta=5.):
        return Grid([Node(0, NodeKind.VSG, 0., d, m=m, m_min=m_min, alpha=alpha, beta=beta)], [])
    return _create


@pytest.fixture
def decaying_trajectory():
    """ Synthetic trajectory with omega_i(t) = a_i exp(-lam t) on every node, sampled every millisecond to 60 s """
    def _create(amplitudes=(0.1,), lam=0.5, inertia=None, areas=None, t_end=60., dt=1e-3):
        times = np.linspace(0., t_end, int(round(t_end / dt)) + 1)
        amplitudes = np.asarray(amplitudes, dtype=float)[:, None]
        omega = amplitudes * np.exp(-lam * times)
        rocof = -lam * omega
        m = None if inertia is None else np.full_like(omega, inertia)
        return Trajectory(times, omega, rocof, m, areas=areas)
    return _create
