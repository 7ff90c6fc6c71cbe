import os
import numpy as np
import astropy.units as u

OUTPUT_DIR = os.path.join(os.path.dirname(os.path.abspath(__file__)), '../Output_Files')
DATA_FILES = os.path.join(os.path.dirname(os.path.abspath(__file__)), '../Input_Grid_Information')

FREQUENCY_BASE_HZ = 50.
POWER_BASE_MW = 100.
DEFAULT_LOAD_DAMPING = 0.1  # not a published value, supply d in the grid file where known
BALANCE_TOL = 1e-9

# Parameter conventions for RTS-96-like grids
RTS_M_RANGE = (0.1, 1.1)
RTS_DAMPING_RATIO = 0.3
RTS_M_MIN_FRACTION = 1. / 3.

NEWTON_TOL = 1e-10
NEWTON_MAX_ITER = 50
NEWTON_MAX_HALVINGS = 8

RTOL = 1e-8
ATOL = 1e-10
SAMPLE_DT = 1e-3
T_END = 120.
MIN_STEP = 1e-12
TAIL_FRACTION = 1e-4
TAIL_WINDOW = 0.25  # fraction of the horizon used to fit the tail envelope

SYNC_THRESHOLD_HZ = 1e-3
REARM_BAND_HZ = 1e-4
REARM_HOLD = 60.


def default_gain_axis(num=12, low=0.1, high=50., anchors=(5., 10.)):
    """ Log-spaced gains with the grid points closest to each anchor replaced by the anchor itself """
    axis = np.logspace(np.log10(low), np.log10(high), num)
    for anchor in anchors:
        axis[np.argmin(np.abs(np.log(axis / anchor)))] = anchor
    return tuple(float(a) for a in axis)


DEFAULT_ALPHAS = default_gain_axis()
DEFAULT_BETAS = default_gain_axis()

METRIC_NAMES = ('l2_freq', 'l2_rocof', 'e_rot', 't_sync')
QUADRATURE_NAMES = ('l2_freq', 'l2_rocof', 'e_rot', 'coherency')


def hz_to_rad_per_s(f):
    """Cycles per second to angular frequency, f -> 2*pi*f."""
    return (f * u.cycle / u.s).to_value(u.rad / u.s)


def rad_per_s_to_hz(omega):
    return (omega * u.rad / u.s).to_value(u.cycle / u.s)


def mw_to_pu(pMW, base_mva=POWER_BASE_MW):
    """ Converts active power in MW to per-unit on a base of `base_mva` (100 MW -> 1 pu by default) """
    return (np.asarray(pMW) * u.MW / (base_mva * u.MW)).to_value(u.dimensionless_unscaled)


def pu_to_mw(pPU, base_mva=POWER_BASE_MW):
    return (np.asarray(pPU) * base_mva * u.MW).to_value(u.MW)


SYNC_THRESHOLD = hz_to_rad_per_s(SYNC_THRESHOLD_HZ)
REARM_BAND = hz_to_rad_per_s(REARM_BAND_HZ)


def init():
    global OUTPUT_DIR
    global DATA_FILES
    global FREQUENCY_BASE_HZ
    global POWER_BASE_MW
    global DEFAULT_LOAD_DAMPING
    global RTOL
    global ATOL
    global SAMPLE_DT
    global T_END
    global TAIL_FRACTION
