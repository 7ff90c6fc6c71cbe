import warnings
import numpy as np
import pytest
from gridinertia.dynamics import Fault, IntegratorOptions, Trajectory, integrate
from gridinertia.errors import NeverSynchronized, NonConvergedTail, MissingAreaLabel
from gridinertia.metrics import (l2_freq, l2_rocof, inertial_energy, coherency, resync_time, max_rocof,
                                 compute_metrics, ratio_report, tail_bound, trapezoid_cross_check,
                                 area_average_matrix, MetricsReport)


class TestIntegralMeasures(object):
    def test_l2_freq_closed_form(self, decaying_trajectory):
        assert l2_freq(decaying_trajectory(amplitudes=(0.1,), lam=0.5)) == pytest.approx(0.01, rel=1e-6)

    def test_l2_freq_about_sync_frequency(self, decaying_trajectory):
        trajectory = decaying_trajectory(amplitudes=(0.1,), lam=0.5)
        shifted = Trajectory(trajectory.times, trajectory.omega - 0.2, trajectory.rocof, omega_sync=-0.2)
        assert l2_freq(shifted) == pytest.approx(0.01, rel=1e-6)

    def test_l2_rocof_closed_form(self, decaying_trajectory):
        assert l2_rocof(decaying_trajectory(amplitudes=(0.1,), lam=0.5)) == pytest.approx(0.0025, rel=1e-6)

    def test_energy_telescopes(self, decaying_trajectory):
        trajectory = decaying_trajectory(amplitudes=(0.1,), lam=0.5, inertia=2.)
        assert inertial_energy(trajectory) == pytest.approx(0.2, rel=1e-6)

    def test_coherency_of_opposite_nodes(self, decaying_trajectory):
        trajectory = decaying_trajectory(amplitudes=(0.1, -0.1), lam=0.5, areas=('A', 'A'))
        assert coherency(trajectory) == pytest.approx(0.1 ** 2 / 0.5, rel=1e-6)

    def test_coherency_of_identical_nodes(self, decaying_trajectory):
        trajectory = decaying_trajectory(amplitudes=(0.1, 0.1, 0.1), areas=('A', 'A', 'B'))
        assert coherency(trajectory) == pytest.approx(0., abs=1e-15)

    def test_coherency_needs_areas(self, decaying_trajectory):
        with pytest.raises(MissingAreaLabel):
            coherency(decaying_trajectory(amplitudes=(0.1, 0.2), areas=('A', None)))

    def test_truncated_tail(self, decaying_trajectory):
        trajectory = decaying_trajectory(amplitudes=(0.1,), lam=0.05, t_end=20.)
        with pytest.raises(NonConvergedTail):
            l2_freq(trajectory)
        assert l2_freq(trajectory, strict=False) > 0

    def test_tail_bound_of_exponential(self):
        times = np.linspace(0., 10., 10001)
        bound = tail_bound(times, np.exp(-times))
        assert bound == pytest.approx(np.exp(-10.), rel=0.1)
        assert tail_bound(times, np.zeros_like(times)) == 0.
        assert tail_bound(times, np.ones_like(times), value=1.) > 1.

    def test_area_average(self):
        average = area_average_matrix(('A', 'A', 'B')).toarray()
        np.testing.assert_allclose(average, [[0.5, 0.5, 0.], [0.5, 0.5, 0.], [0., 0., 1.]])
        assert area_average_matrix(('A', None)) is None


class TestResync(object):
    def test_exponential_crossing(self, decaying_trajectory):
        trajectory = decaying_trajectory(amplitudes=(0.05, 0.05), lam=0.3)
        expected = np.log(0.05 / (2 * np.pi * 1e-3)) / 0.3
        assert resync_time(trajectory) == pytest.approx(expected, abs=1e-4)
        assert expected == pytest.approx(6.914, abs=1e-3)

    def test_always_in_band(self, decaying_trajectory):
        assert resync_time(decaying_trajectory(amplitudes=(1e-4,))) == 0.

    def test_last_exit_counts(self):
        times = np.linspace(0., 10., 1001)
        omega = np.where((times < 3.) | ((times > 4.) & (times <= 5.)), 0.1, 0.)[None, :]
        assert resync_time(Trajectory(times, omega)) > 5.

    def test_never_synchronized(self, decaying_trajectory):
        with pytest.raises(NeverSynchronized):
            resync_time(decaying_trajectory(amplitudes=(1.,), lam=0.01, t_end=10.))

    def test_measured_from_fault_time(self):
        times = np.linspace(2., 12., 1001)
        omega = np.where(times < 4., 0.1, 0.)[None, :]
        assert resync_time(Trajectory(times, omega)) == pytest.approx(2., abs=0.011)


class TestReports(object):
    def test_max_rocof_skips_loads(self):
        times = np.linspace(0., 1., 11)
        rocof = np.vstack([np.full(11, 0.5), np.full(11, np.nan), np.linspace(-2., 0., 11)])
        trajectory = Trajectory(times, np.zeros((3, 11)), rocof, inertial_mask=[True, False, True])
        assert max_rocof(trajectory) == (2., 2)

    def test_ratio_of_identical_reports(self, decaying_trajectory):
        report = compute_metrics(decaying_trajectory(amplitudes=(0.05, 0.02), lam=0.3, inertia=1.,
                                                     areas=('A', 'A')))
        ratios = ratio_report(report, report)
        assert all(value == 1. for value in ratios.ratios.values())
        assert ratios.flagged == []
        assert ratios.uncertain['l2_freq'].nominal_value == pytest.approx(1.)

    def test_exact_measures_divide_without_warnings(self, decaying_trajectory):
        report = compute_metrics(decaying_trajectory(amplitudes=(0.05, 0.02), lam=0.3, inertia=1.,
                                                     areas=('A', 'A')))
        assert isinstance(report.as_ufloat('t_sync'), float)
        assert isinstance(report.as_ufloat('max_rocof'), float)
        with warnings.catch_warnings():
            warnings.simplefilter('error')
            ratios = ratio_report(report, report)
        assert ratios.as_dict()['ratio_std']['t_sync'] == 0.

    def test_ratio_report_repr(self, decaying_trajectory):
        report = compute_metrics(decaying_trajectory(amplitudes=(0.05,), lam=0.3, inertia=1.))
        text = repr(ratio_report(report, report))
        assert text.startswith('RatioReport(l2_freq=1,')
        assert 'at 0x' not in text

    def test_zero_baseline_is_flagged(self, decaying_trajectory):
        candidate = compute_metrics(decaying_trajectory(amplitudes=(0.05,), lam=0.3, inertia=1.))
        baseline = compute_metrics(decaying_trajectory(amplitudes=(0.,), lam=0.3, inertia=1.))
        ratios = ratio_report(candidate, baseline)
        assert ratios['l2_freq'] == np.inf
        assert 'l2_freq' in ratios.flagged and 't_sync' in ratios.flagged

    def test_report_flags_instead_of_raising(self, decaying_trajectory):
        report = compute_metrics(decaying_trajectory(amplitudes=(1.,), lam=0.05, t_end=20.))
        assert not report.converged
        assert 'l2_freq' in report.flags and 'never_synchronized' in report.flags
        assert np.isnan(report.t_sync)
        assert report.coherency is None

    def test_csv_row_follows_header(self, decaying_trajectory):
        report = compute_metrics(decaying_trajectory(amplitudes=(0.05,), lam=0.3, inertia=1.))
        row = report.csv_row('run')
        assert len(row) == len(MetricsReport.CSV_HEADER)
        assert row[0] == 'run' and row[-1] is True
        assert report.as_ufloat('l2_freq').std_dev == report.tailBound['l2_freq']


class TestSolverQuadrature(object):
    def test_unfaulted_measures_vanish(self, four_node_grid):
        trajectory = integrate(four_node_grid, None, opts=IntegratorOptions(t_end=10., sample_dt=1e-2,
                                                                            check_horizon=False))
        for measure in (l2_freq, l2_rocof, inertial_energy, coherency):
            assert measure(trajectory, strict=False) == pytest.approx(0., abs=1e-12)
        assert resync_time(trajectory) == 0.

    def test_quadrature_matches_trapezoid(self, four_node_grid):
        opts = IntegratorOptions(t_end=60., sample_dt=2e-4, check_horizon=False)
        trajectory = integrate(four_node_grid, Fault(2, -0.2), opts=opts)
        trapezoid = trapezoid_cross_check(trajectory)
        for name, value in trapezoid.items():
            assert trajectory.quadrature[name] == pytest.approx(value, rel=1e-4)
