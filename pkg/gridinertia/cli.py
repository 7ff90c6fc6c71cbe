""" Command line entry point: gridinertia {simulate,sweep,campaign,placement,stability} --config file.json """
import argparse
import logging
import os
import sys
from collections import OrderedDict
import gridinertia.constants as constants
from gridinertia.errors import GridInertiaError
from gridinertia.harness import run_scenario, policy_comparison, sweep_alpha_beta, fault_campaign, \
    placement_compare, resolve_scenario
from gridinertia.metrics import ratio_report
from gridinertia.save_results import save_metrics, save_sweep, save_campaign, save_report
from gridinertia.scenario_info import ScenarioParameters, SweepParameters, CampaignParameters, read_config
from gridinertia.stability import spectrum_union_check

constants.init()
logger = logging.getLogger('gridinertia')


def setup_logging(out_dir, run_name, verbose=0):
    """ Console handler plus <out_dir>/<run_name>_Log.txt """
    level = logging.DEBUG if verbose > 1 else (logging.INFO if verbose == 1 else logging.WARNING)
    if not os.path.exists(out_dir):
        os.makedirs(out_dir)
    formatter = logging.Formatter('%(asctime)s %(levelname)s %(name)s: %(message)s')
    console = logging.StreamHandler()
    console.setLevel(level)
    console.setFormatter(formatter)
    logFile = logging.FileHandler(os.path.join(out_dir, '%s_Log.txt' % run_name), mode='w')
    logFile.setLevel(logging.DEBUG)
    logFile.setFormatter(formatter)
    logger.handlers = [console, logFile]
    logger.setLevel(logging.DEBUG)


def _scenario_dict(config):
    return config['scenario'] if 'scenario' in config else config


def _apply_overrides(scenarioDict, args):
    d = dict(scenarioDict)
    if args.alpha is not None:
        d['alpha'] = args.alpha[0]
    if args.beta is not None:
        d['beta'] = args.beta[0]
    for key, value in (('seed', args.seed), ('t_end', args.t_end), ('sample_dt', args.sample_dt),
                       ('grid', args.grid)):
        if value is not None:
            d[key] = value
    return d


def _load(args):
    if args.config is None:
        return {}, None
    return read_config(args.config)


def cmd_simulate(args):
    config, configFile = _load(args)
    scenario = ScenarioParameters.from_dict(_apply_overrides(_scenario_dict(config), args), configFile)
    report = OrderedDict([('command', 'simulate'), ('scenario', scenario.as_dict())])
    if args.compare_policies:
        variants, ratios = policy_comparison(scenario)
        rows = [('%s_%s' % (scenario.scenarioId, name), metrics) for name, (_, metrics) in variants.items()]
        report['variants'] = OrderedDict((name, OrderedDict([('summary', s), ('metrics', m)]))
                                         for name, (s, m) in variants.items())
        report['ratios'] = ratios
        converged = all(m.converged for _, m in rows)
    else:
        summary, metrics = run_scenario(scenario, args.out, args.trajectory, profile_nodes=args.profile or ())
        baseSummary, baseline = run_scenario(scenario.replace(scenario_id='%s_constant' % scenario.scenarioId),
                                             constant=True)
        rows = [(scenario.scenarioId, metrics), (baseSummary.scenario_id, baseline)]
        report['summary'] = summary
        report['metrics'] = metrics
        report['constant_metrics'] = baseline
        report['ratios'] = ratio_report(metrics, baseline)
        converged = metrics.converged and baseline.converged
    save_metrics(rows, args.out)
    report['converged'] = converged
    save_report(report, args.out)
    return converged


def cmd_sweep(args):
    config, configFile = _load(args)
    scenarioDict = _apply_overrides(_scenario_dict(config), argparse.Namespace(**dict(vars(args), alpha=None,
                                                                                       beta=None)))
    params = SweepParameters(ScenarioParameters.from_dict(scenarioDict, configFile),
                           args.alpha or config.get('alphas'), args.beta or config.get('betas'))
    sweep = sweep_alpha_beta(params, args.jobs)
    save_sweep(sweep, args.out)
    save_metrics([('baseline', sweep.baseline)] +
                 [('a%g_b%g' % (params.alphas[i], params.betas[j]), r) for (i, j), r in sweep.reports.items()],
                 args.out)
    save_report(OrderedDict([('command', 'sweep'), ('alphas', params.alphas), ('betas', params.betas),
                             ('baseline', sweep.baseline), ('failures', sweep.failures),
                             ('provenance', sweep.provenance), ('converged', sweep.converged)]), args.out)
    return sweep.converged


def _campaign_params(args):
    config, configFile = _load(args)
    config = dict(config)
    config['scenario'] = _apply_overrides(_scenario_dict(config), args)
    return CampaignParameters.from_dict(config, configFile)


def _save_campaign(args, command, result):
    save_campaign(result, args.out)
    save_report(OrderedDict([('command', command), ('variants', result.variants), ('summary', result.summary),
                             ('rows', result.rows), ('failures', result.failures),
                             ('provenance', result.provenance), ('converged', result.converged)]), args.out)
    return result.converged


def cmd_campaign(args):
    return _save_campaign(args, 'campaign', fault_campaign(_campaign_params(args), args.jobs))


def cmd_placement(args):
    return _save_campaign(args, 'placement', placement_compare(_campaign_params(args), args.jobs))


def cmd_stability(args):
    config, configFile = _load(args)
    scenario = ScenarioParameters.from_dict(_apply_overrides(_scenario_dict(config), args), configFile)
    grid = resolve_scenario(scenario).grid
    report = spectrum_union_check(grid, raise_on_mismatch=False)
    save_report(OrderedDict([('command', 'stability'), ('scenario', scenario.as_dict())] + list(report.items())),
                args.out)
    return report['passed'] and report['spectral_abscissa'] < 0


COMMANDS = OrderedDict([('simulate', cmd_simulate), ('sweep', cmd_sweep), ('campaign', cmd_campaign),
                        ('placement', cmd_placement), ('stability', cmd_stability)])


def build_parser():
    parser = argparse.ArgumentParser(prog='gridinertia', description='Adaptive inertia of virtual synchronous '
                                                                     'generators in power grids')
    sub = parser.add_subparsers(dest='command')
    sub.required = True
    for name in COMMANDS:
        p = sub.add_parser(name)
        p.add_argument('--config', help='experiment JSON file (looked up in Input_Grid_Information if not found)')
        p.add_argument('--grid', help='shipped grid name or grid JSON file')
        p.add_argument('--alpha', type=float, nargs='+', help='inertia gain(s) in pu; a list sets the sweep axis')
        p.add_argument('--beta', type=float, nargs='+', help='decay rate(s) in 1/s; a list sets the sweep axis')
        p.add_argument('--seed', type=int)
        p.add_argument('--t-end', type=float, dest='t_end')
        p.add_argument('--sample-dt', type=float, dest='sample_dt')
        p.add_argument('--out', default=constants.OUTPUT_DIR)
        p.add_argument('--jobs', type=int, default=1)
        p.add_argument('-v', '--verbose', action='count', default=0)
        if name == 'simulate':
            p.add_argument('--trajectory', action='store_true', help='write trajectory_<id>.csv')
            p.add_argument('--profile', type=int, nargs='+', help='write the frequency profile of these nodes')
            p.add_argument('--compare-policies', action='store_true', dest='compare_policies',
                           help='run constant, plain and rearm variants')
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.config is None and args.grid is None:
        parser.error("give --config or --grid")
    setup_logging(args.out, args.command, args.verbose)
    try:
        ok = COMMANDS[args.command](args)
    except GridInertiaError as err:
        logger.error("%s failed: %s", args.command, err)
        return 2
    if not ok:
        logger.warning("%s finished with unconverged or failed runs", args.command)
    return 0 if ok else 1


if __name__ == '__main__':
    sys.exit(main())
