import numpy as np
import pytest
from gridinertia.grid_model import Grid, Node, NodeKind, Line
from gridinertia.harness import centrality_order
from gridinertia.network_library import (SHIPPED_GRIDS, shipped_grid, rts96_like, rts96_vsg_candidates, random_grid,
                                         barbell_grid)


@pytest.mark.parametrize('name', sorted(SHIPPED_GRIDS))
def test_shipped_grids_are_balanced(name):
    grid = shipped_grid(name)
    assert abs(grid.P.sum()) < 1e-9
    assert grid.numInertial > 0


def test_unknown_shipped_grid():
    with pytest.raises(KeyError):
        shipped_grid('ieee14')


def test_seeded_builders_are_deterministic():
    assert rts96_like(5) == rts96_like(5)
    assert rts96_like(5) != rts96_like(6)
    assert random_grid(12, 3) == random_grid(12, 3)
    assert shipped_grid('barbell', 4) == barbell_grid(4)


def test_rts96_like_layout():
    grid = rts96_like(1)
    assert grid.numNodes == 72
    assert len(grid.generatorIdx) == 30
    assert sorted(set(grid.areas)) == ['I', 'II', 'III']
    candidates = rts96_vsg_candidates(grid, 2)
    assert len(candidates) == 6
    assert all(grid.kinds[i] is NodeKind.GENERATOR for i in candidates)


def test_random_grid_with_vsgs_only():
    grid = random_grid(5, 11, generator_fraction=1., vsg_fraction=1.)
    assert grid.numVsg == 5
    assert len(grid.loadIdx) == 0
    np.testing.assert_allclose(grid.mMin, grid.m / 3.)


class TestCentrality(object):
    def test_star_hub_first(self):
        nodes = [Node(0, NodeKind.GENERATOR, 0.3, 0.3, m=1.)] + \
                [Node(i, NodeKind.LOAD, -0.1, 0.1) for i in (1, 2, 3)]
        grid = Grid(nodes, [Line(0, i, 1.) for i in (1, 2, 3)])
        assert centrality_order(grid)[0] == 0

    def test_path_middle_first(self):
        nodes = [Node(0, NodeKind.GENERATOR, 0.2, 0.3, m=1.), Node(1, NodeKind.LOAD, -0.1, 0.1),
                 Node(2, NodeKind.LOAD, -0.1, 0.1)]
        grid = Grid(nodes, [Line(0, 1, 1.), Line(1, 2, 1.)])
        assert centrality_order(grid) == [1, 0, 2]

    def test_barbell_core_before_arms(self):
        grid = barbell_grid()
        order = centrality_order(grid)
        core = [n for n in order if grid.areas[n] == 'core']
        assert order[:len(core)] == core
        assert len(core) == 8
