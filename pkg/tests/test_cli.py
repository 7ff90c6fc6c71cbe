import csv
import json
import numpy as np
import pytest
from gridinertia.cli import main
from gridinertia.save_results import to_jsonable
from gridinertia.dynamics import VsgPolicy
from gridinertia.harness import TrajectorySummary


def _report(directory):
    with open(str(directory / 'report.json')) as f:
        return json.load(f)


def test_stability_command(tmp_path):
    assert main(['stability', '--config', 'stability_four_node.json', '--out', str(tmp_path)]) == 0
    report = _report(tmp_path)
    assert report['passed'] is True
    assert report['num_vsg'] == 1
    assert (tmp_path / 'stability_Log.txt').exists()


def test_simulate_command(tmp_path):
    code = main(['simulate', '--config', 'simulate_four_node.json', '--t-end', '10', '--sample-dt', '0.01',
                 '--out', str(tmp_path), '--trajectory'])
    assert code in (0, 1)
    with open(str(tmp_path / 'metrics.csv')) as f:
        rows = list(csv.reader(f))
    assert rows[0][:3] == ['scenario_id', 'l2_freq', 'l2_rocof']
    assert [r[0] for r in rows[1:]] == ['four_node_vsg_fault', 'four_node_vsg_fault_constant']
    assert (tmp_path / 'trajectory_four_node_vsg_fault.csv').exists()
    assert set(_report(tmp_path)['ratios']['ratios']) >= {'l2_freq', 'l2_rocof', 'e_rot'}


def test_grid_override_without_config(tmp_path):
    assert main(['stability', '--grid', 'two_bus', '--out', str(tmp_path)]) == 0


def test_errors_exit_with_two(tmp_path):
    assert main(['simulate', '--grid', 'missing_grid.json', '--out', str(tmp_path)]) == 2


@pytest.mark.slow
def test_placement_output_independent_of_jobs(tmp_path):
    for jobs in ('1', '8'):
        main(['placement', '--config', 'placement_barbell.json', '--jobs', jobs, '--out', str(tmp_path / jobs)])
    assert (tmp_path / '1' / 'campaign.csv').read_bytes() == (tmp_path / '8' / 'campaign.csv').read_bytes()


def test_to_jsonable():
    summary = TrajectorySummary('s', 3, 0., 1., -0.1, None, 10, {2: (0.5, 1.)}, {'seed': 1})
    out = to_jsonable({'values': np.array([1., np.nan, np.inf]), 'summary': summary,
                       'policy': VsgPolicy.rearm(), 'flag': np.bool_(True), 'n': np.int64(4)})
    assert out['values'] == [1., None, 'inf']
    assert out['summary']['peak_inertia'] == {'2': [0.5, 1.]}
    assert out['policy']['mode'] == 'rearm'
    assert out['flag'] is True and out['n'] == 4
    json.dumps(out)
