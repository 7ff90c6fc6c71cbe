import os
import logging
import gridinertia.constants as constants
from gridinertia.cli import setup_logging
from gridinertia.harness import run_scenario, policy_comparison, placement_compare, resolve_scenario
from gridinertia.metrics import ratio_report
from gridinertia.save_results import save_metrics, save_campaign, save_report
from gridinertia.stability import spectrum_union_check
from Input_Grid_Information.example_scenarios import four_node_vsg, rts96_scenario, barbell_campaign

# Path to the directory you wish to save the output tables, trajectories and reports.
constants.OUTPUT_DIR = os.path.join(os.path.dirname(os.path.abspath(__file__)), 'Output_Files')

# Path to the directory containing your grid and experiment files (Optional).
constants.DATA_FILES = os.path.join(os.path.dirname(os.path.abspath(__file__)), 'Input_Grid_Information')

logger = logging.getLogger('gridinertia')


def main():
    setup_logging(constants.OUTPUT_DIR, 'run_analysis', verbose=1)
    scenarios = [four_node_vsg, rts96_scenario]

    rows = []
    for scenario in scenarios:
        summary, adaptive = run_scenario(scenario, constants.OUTPUT_DIR, save_trajectory=True)
        _, constant = run_scenario(scenario.replace(scenario_id=scenario.scenarioId + '_constant'), constant=True)
        rows.extend([(scenario.scenarioId, adaptive), (scenario.scenarioId + '_constant', constant)])
        logger.info("%s adaptive / constant: %s", scenario.scenarioId, ratio_report(adaptive, constant))

        stability = spectrum_union_check(resolve_scenario(scenario).grid, raise_on_mismatch=False)
        logger.info("%s spectral abscissa %.4g (union check passed: %s)", scenario.scenarioId,
                    stability['spectral_abscissa'], stability['passed'])

    variants, ratios = policy_comparison(four_node_vsg)
    save_report({'variants': variants, 'ratios': ratios}, constants.OUTPUT_DIR, 'policy_comparison.json')
    save_metrics(rows, constants.OUTPUT_DIR)

    campaign = placement_compare(barbell_campaign, jobs=os.cpu_count())
    save_campaign(campaign, constants.OUTPUT_DIR, 'placement_barbell.csv')
    save_report({'summary': campaign.summary, 'provenance': campaign.provenance}, constants.OUTPUT_DIR,
                'placement_barbell.json')


if __name__ == '__main__':
    main()
