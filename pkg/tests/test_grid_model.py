import json
import numpy as np
import pytest
from gridinertia.errors import (PowerImbalance, DisconnectedGraph, NonPositiveParameter, DuplicateLine,
                                NotAGenerator, InvalidGridFile, GridValidationError)
from gridinertia.grid_model import (build_grid, load_grid_file, save_grid_file, grid_to_dict, sample_rts_params,
                                    sample_inertia, apply_rts_inertia, promote_to_vsg, demote_all, total_min_inertia,
                                    set_vsg_gains, Node, NodeKind)
from gridinertia.network_library import two_bus, four_node, random_grid


def _pair_spec(load_p=-0.5):
    return {'nodes': [{'id': 0, 'kind': 'Generator', 'P': 0.5, 'd': 0.3, 'm': 1.0},
                      {'id': 1, 'kind': 'Load', 'P': load_p, 'd': 0.1}],
            'lines': [{'from': 0, 'to': 1, 'b': 1.0}]}


class TestBuildGrid(object):
    def test_minimal_balanced_pair(self):
        grid = build_grid(_pair_spec())
        assert grid.numNodes == 2
        assert list(grid.generatorIdx) == [0]
        assert list(grid.loadIdx) == [1]
        assert grid.frequencyBase == 50.

    def test_power_imbalance(self):
        with pytest.raises(PowerImbalance) as err:
            build_grid(_pair_spec(load_p=-0.4))
        assert err.value.imbalance == pytest.approx(0.1)

    def test_disconnected(self):
        spec = {'nodes': [{'id': 0, 'kind': 'Generator', 'P': 0.5, 'd': 0.3, 'm': 1.0},
                          {'id': 1, 'kind': 'Load', 'P': -0.5, 'd': 0.1},
                          {'id': 2, 'kind': 'Load', 'P': 0., 'd': 0.1}],
                'lines': [{'from': 0, 'to': 1, 'b': 1.0}]}
        with pytest.raises(DisconnectedGraph) as err:
            build_grid(spec)
        assert [2] in err.value.components

    def test_non_positive_parameter(self):
        spec = _pair_spec()
        spec['nodes'][0]['m'] = 0.
        with pytest.raises(NonPositiveParameter):
            build_grid(spec)
        spec = _pair_spec()
        spec['lines'][0]['b'] = -1.
        with pytest.raises(NonPositiveParameter):
            build_grid(spec)

    def test_duplicate_line(self):
        spec = _pair_spec()
        spec['lines'].append({'from': 1, 'to': 0, 'b': 2.0})
        with pytest.raises(DuplicateLine):
            build_grid(spec)

    def test_unknown_kind_and_missing_field(self):
        spec = _pair_spec()
        spec['nodes'][0]['kind'] = 'Battery'
        with pytest.raises(InvalidGridFile):
            build_grid(spec)
        spec = _pair_spec()
        del spec['nodes'][0]['m']
        with pytest.raises(InvalidGridFile):
            build_grid(spec)

    def test_load_without_damping_gets_default(self):
        spec = _pair_spec()
        del spec['nodes'][1]['d']
        assert build_grid(spec).d[1] == pytest.approx(0.1)

    def test_grid_is_immutable(self):
        grid = build_grid(_pair_spec())
        with pytest.raises(AttributeError):
            grid.P = np.zeros(2)
        with pytest.raises(ValueError):
            grid.P[0] = 1.

    def test_ids_must_be_integers(self):
        spec = _pair_spec()
        spec['nodes'][1]['id'] = 1.7
        with pytest.raises(GridValidationError):
            build_grid(spec)
        spec = _pair_spec()
        spec['lines'][0]['to'] = 0.5
        with pytest.raises(GridValidationError):
            build_grid(spec)
        spec = _pair_spec()
        spec['nodes'][0]['id'] = True
        with pytest.raises(GridValidationError):
            build_grid(spec)
        spec = _pair_spec()
        spec['nodes'][1]['id'] = 1.0
        spec['lines'][0]['to'] = 1.0
        assert build_grid(spec) == build_grid(_pair_spec())


def _unbalance(spec, k):
    spec['nodes'][k]['P'] += 0.1


def _negative_b(spec, k):
    line = spec['lines'][k % len(spec['lines'])]
    line['b'] = -line['b']


def _zero_damping(spec, k):
    spec['nodes'][k]['d'] = 0.


def _reversed_duplicate(spec, k):
    line = spec['lines'][k % len(spec['lines'])]
    spec['lines'].append({'from': line['to'], 'to': line['from'], 'b': line['b']})


def _isolated_node(spec, k):
    spec['nodes'].append({'id': len(spec['nodes']), 'kind': 'Load', 'P': 0., 'd': 0.1})


def _self_loop(spec, k):
    spec['lines'].append({'from': k, 'to': k, 'b': 1.})


def _fractional_id(spec, k):
    spec['nodes'][k]['id'] += 0.5


def _missing_node(spec, k):
    line = spec['lines'][k % len(spec['lines'])]
    line['to'] = len(spec['nodes']) + 3


MUTATIONS = [None, _unbalance, _negative_b, _zero_damping, _reversed_duplicate, _isolated_node, _self_loop,
             _fractional_id, _missing_node]


class TestBuildGridFuzz(object):
    @pytest.mark.parametrize('seed', range(6))
    @pytest.mark.parametrize('mutation', MUTATIONS, ids=['valid'] + [m.__name__.strip('_') for m in MUTATIONS[1:]])
    def test_accepts_exactly_valid_descriptions(self, mutation, seed):
        grid = random_grid(5 + 5 * seed, seed, vsg_fraction=0.5)
        spec = grid_to_dict(grid)
        if mutation is None:
            assert build_grid(spec) == grid
            return
        k = int(np.random.default_rng(seed).integers(grid.numNodes))
        mutation(spec, k)
        with pytest.raises(GridValidationError):
            build_grid(spec)


class TestGridFiles(object):
    def test_file_matches_shipped_builder(self):
        assert load_grid_file('four_node.json') == four_node()

    def test_save_and_load(self, tmp_path):
        filename = str(tmp_path / 'grid.json')
        save_grid_file(four_node(), filename)
        with open(filename) as f:
            assert json.load(f) == grid_to_dict(four_node())
        assert load_grid_file(filename) == four_node()

    def test_unreadable_file(self, tmp_path):
        with pytest.raises(InvalidGridFile):
            load_grid_file(str(tmp_path / 'missing.json'))


class TestRtsParameters(object):
    def test_deterministic_for_seed(self):
        first, second = sample_rts_params(four_node(), 42), sample_rts_params(four_node(), 42)
        np.testing.assert_array_equal(first.m, second.m)
        np.testing.assert_array_equal(first.d, second.d)
        np.testing.assert_array_equal(first.mMin, second.mMin)

    def test_uniform_mean(self):
        draws = sample_inertia(7, range(10000))
        assert draws.min() >= 0.1 and draws.max() <= 1.1
        assert abs(draws.mean() - 0.6) < 0.02

    def test_draws_do_not_depend_on_other_nodes(self):
        np.testing.assert_array_equal(sample_inertia(3, [5, 9]), sample_inertia(3, [1, 5, 7, 9])[[1, 3]])

    def test_damping_ratio_and_vsg_floor(self):
        vsg = apply_rts_inertia(Node(0, NodeKind.VSG, 0., 1., m_min=1., alpha=1., beta=1.), 0.9)
        assert vsg.m_min == pytest.approx(0.3)
        assert vsg.d == pytest.approx(0.27)
        grid = sample_rts_params(four_node(), 1)
        np.testing.assert_allclose(grid.d[grid.inertialIdx], 0.3 * grid.m[grid.inertialIdx])
        assert grid.d[3] == four_node().d[3]


class TestPromotion(object):
    def test_one_third_rule(self):
        grid = promote_to_vsg(two_bus(m=0.9), [0], alpha=5., beta=5., m_min_rule=1. / 3.)
        assert grid.kinds[0] is NodeKind.VSG
        assert grid.mMin[0] == pytest.approx(0.3)
        assert grid.m[0] == pytest.approx(0.9)

    def test_identity_rule(self):
        grid = promote_to_vsg(two_bus(m=0.9), [0], alpha=5., beta=5., m_min_rule=1.)
        assert grid.mMin[0] == pytest.approx(0.9)

    def test_load_is_not_a_generator(self):
        with pytest.raises(NotAGenerator):
            promote_to_vsg(two_bus(), [1], alpha=5., beta=5.)

    def test_per_node_gains(self):
        grid = promote_to_vsg(four_node(), [0, 1], alpha={0: 2., 1: 3.}, beta={'0': 4., '1': 6.})
        assert list(grid.alpha[[0, 1]]) == [2., 3.]
        assert list(grid.beta[[0, 1]]) == [4., 6.]

    def test_demote_restores_reference_inertia(self):
        grid = demote_all(four_node())
        assert grid.numVsg == 0
        assert grid.m[2] == pytest.approx(0.9)

    def test_budget_and_gains(self):
        assert total_min_inertia(four_node()) == pytest.approx(0.3)
        grid = set_vsg_gains(four_node(), 10., 20.)
        assert grid.alpha[2] == 10. and grid.beta[2] == 20.
        assert np.isnan(grid.alpha[0])
