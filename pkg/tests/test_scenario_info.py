import pytest
from gridinertia.errors import InvalidFault, InvalidPolicy
from gridinertia.scenario_info import ScenarioParameters, SweepParameters, CampaignParameters, read_config


def test_defaults():
    scenario = ScenarioParameters('s', 'four_node')
    assert scenario.vsg == {'kind': 'keep'}
    assert scenario.policy == {'mode': 'plain'}
    assert scenario.fault is None


def test_replace_keeps_other_fields():
    scenario = ScenarioParameters('s', 'four_node', alpha=2., seed=9)
    changed = scenario.replace(alpha=3.)
    assert changed.alpha == 3. and changed.seed == 9 and scenario.alpha == 2.


@pytest.mark.parametrize('kwargs, error', [
    ({'vsg': {'kind': 'everywhere'}}, ValueError),
    ({'policy': {'mode': 'bang-bang'}}, InvalidPolicy),
    ({'fault': {'node': 1}}, InvalidFault),
])
def test_invalid_entries(kwargs, error):
    with pytest.raises(error):
        ScenarioParameters('s', 'four_node', **kwargs)


def test_shipped_configs_parse():
    config, path = read_config('sweep_four_node.json')
    sweep = SweepParameters.from_dict(config, path)
    assert sweep.alphas[3] == 5. and sweep.scenario.configFile == path

    config, path = read_config('placement_barbell.json')
    campaign = CampaignParameters.from_dict(config, path)
    assert list(campaign.placements) == ['peripheral', 'homogeneous']
    assert campaign.thresholdPU == pytest.approx(0.4)
    assert campaign.deltaPPU == pytest.approx(-1.)

    config, _ = read_config('campaign_random40.json')
    assert ScenarioParameters.from_dict(config['scenario']).scenarioId == 'random40'


def test_empty_sweep_axis():
    with pytest.raises(ValueError):
        SweepParameters(ScenarioParameters('s', 'four_node'), alphas=[])
