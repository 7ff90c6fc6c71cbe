import numpy as np
import pytest
import gridinertia.stability as stability
from gridinertia.dynamics import State, rhs_deadband
from gridinertia.equilibrium import solve_fixed_point
from gridinertia.errors import SpectrumMismatch
from gridinertia.grid_model import promote_to_vsg
from gridinertia.network_library import four_node, rts96_like, rts96_vsg_candidates, random_grid, barbell_grid
from gridinertia.stability import laplacian, full_jacobian, spectrum_union_check, spectral_abscissa


class TestLaplacian(object):
    def test_two_bus_flat(self, pair_grid):
        np.testing.assert_allclose(laplacian(pair_grid, [0., 0.]).matrix, [[1., -1.], [-1., 1.]])

    def test_two_bus_loaded(self, pair_grid):
        lap = laplacian(pair_grid, [0., -np.arcsin(0.5)])
        assert lap.matrix[0, 1] == pytest.approx(-0.8660254, abs=1e-7)

    def test_row_sums_vanish(self):
        grid = rts96_like(2)
        lap = laplacian(grid, solve_fixed_point(grid).theta0)
        np.testing.assert_allclose(lap.row_sums(), 0., atol=1e-12)
        assert lap.is_psd()
        assert lap.num_zero_modes() == 1

    def test_matches_sparse_laplacian(self, four_node_grid):
        theta0 = solve_fixed_point(four_node_grid).theta0
        np.testing.assert_allclose(laplacian(four_node_grid, theta0).matrix,
                                   four_node_grid.laplacian(theta0).toarray())


class TestJacobian(object):
    def test_isolated_vsg_eigenvalues(self, lone_vsg):
        blocks = full_jacobian(lone_vsg(m=1., m_min=1., d=0.3, beta=5.))
        np.testing.assert_allclose(np.sort(np.linalg.eigvals(blocks.matrix).real), [-5., -0.3, 0.], atol=1e-12)

    def test_annihilates_zero_perturbation(self, four_node_grid):
        blocks = full_jacobian(four_node_grid)
        assert np.all(blocks.matrix @ np.zeros(blocks.matrix.shape[0]) == 0.)
        assert blocks.block('m', 'm')[0, 0] == -5.
        np.testing.assert_array_equal(blocks.block('m', 'theta'), 0.)

    @pytest.mark.parametrize('seed', [1, 2, 3])
    def test_finite_differences(self, seed):
        grid = random_grid(3, seed, generator_fraction=1., vsg_fraction=1.)
        theta0 = solve_fixed_point(grid).theta0
        J = full_jacobian(grid, theta0).matrix
        x0 = State.at_fixed_point(grid, theta0).to_vector()[:J.shape[0]]
        step = 1e-7
        numerical = np.zeros_like(J)
        for k in range(J.shape[0]):
            columns = []
            for sign in (1., -1.):
                x = x0.copy()
                x[k] += sign * step
                state = State(x[:3], x[3:6], x[6:9])
                columns.append(rhs_deadband(grid, state, 1e-6).to_vector()[:J.shape[0]])
            numerical[:, k] = (columns[0] - columns[1]) / (2 * step)
        np.testing.assert_allclose(numerical, J, atol=1e-5)


class TestSpectrum(object):
    @pytest.mark.parametrize('grid', [
        four_node(),
        promote_to_vsg(rts96_like(1), rts96_vsg_candidates(rts96_like(1), 2), alpha=5., beta=5.),
        promote_to_vsg(barbell_grid(), [9, 11, 13], alpha=5., beta={9: 2., 11: 5., 13: 9.}),
    ], ids=['four_node', 'rts96_like', 'barbell'])
    def test_union_property(self, grid):
        report = spectrum_union_check(grid)
        assert report['passed']
        assert report['max_distance'] <= 1e-8
        assert report['embedding_residual'] <= 1e-8
        assert len(report['spectrum_full']) == len(report['spectrum_constant']) + grid.numVsg

    def test_equal_betas_give_repeated_eigenvalue(self):
        grid = promote_to_vsg(rts96_like(1), rts96_vsg_candidates(rts96_like(1), 2), alpha=5., beta=5.)
        report = spectrum_union_check(grid)
        full = np.array([complex(*pair) for pair in report['spectrum_full']])
        assert np.sum(np.abs(full + 5.) < 1e-8) >= grid.numVsg

    @pytest.mark.parametrize('seed', range(50))
    def test_random_grids_are_stable(self, seed):
        numGenerators = 4 + seed % 7
        grid = random_grid(numGenerators + 3, seed, generator_fraction=numGenerators / (numGenerators + 3.),
                           vsg_fraction=0.5)
        report = spectrum_union_check(grid, raise_on_mismatch=False)
        assert report['spectral_abscissa'] < 0

    def test_mismatch_raises(self, four_node_grid, monkeypatch):
        monkeypatch.setattr(stability, '_pair', lambda first, second: np.ones(len(first)))
        with pytest.raises(SpectrumMismatch):
            spectrum_union_check(four_node_grid)
        assert not spectrum_union_check(four_node_grid, raise_on_mismatch=False)['passed']

    def test_abscissa_skips_zero_mode(self):
        assert spectral_abscissa(np.array([0., -1., -2.])) == -1.
