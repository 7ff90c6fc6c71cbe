import logging
import os
from collections import namedtuple, OrderedDict
from concurrent.futures import ProcessPoolExecutor
import numpy as np
import gridinertia.constants as constants
from gridinertia.dynamics import Fault, VsgPolicy, IntegratorOptions, integrate, max_inertia_profile, \
    save_trajectory_csv, save_frequency_profile_csv
from gridinertia.errors import GridInertiaError, HarnessError, NoQualifyingFaults, InertiaBudgetMismatch, \
    ScenarioFailed, InvalidFault
from gridinertia.grid_model import load_grid_file, promote_to_vsg, demote_all, set_vsg_gains, total_min_inertia, \
    grid_to_dict
from gridinertia.helpers import random_stream, STREAM_VSG_SELECTION, stable_hash, git_describe
from gridinertia.metrics import compute_metrics, ratio_report
from gridinertia.network_library import SHIPPED_GRIDS, shipped_grid, rts96_vsg_candidates

constants.init()
logger = logging.getLogger(__name__)

BUDGET_TOL = 1e-9
CENTRALITY = 'weighted_degree'

ResolvedScenario = namedtuple('ResolvedScenario', ['grid', 'constant_grid', 'fault', 'policy', 'opts'])
TrajectorySummary = namedtuple('TrajectorySummary', ['scenario_id', 'num_samples', 't_start', 't_end', 'omega_sync',
                                                     'rearm_time', 'nfev', 'peak_inertia', 'provenance'])


def centrality_order(grid):
    """ Node ids by weighted degree sum_j b_ij, most central first; ties go to the lower id """
    strength = dict(grid.to_networkx().degree(weight='b'))
    return sorted(strength, key=lambda n: (-strength[n], n))


def central_nodes(grid, split_fraction=0.5):
    order = centrality_order(grid)
    return set(order[:int(round(split_fraction * len(order)))])


def peripheral_placement(grid, count):
    """ The `count` least central conventional generators """
    generators = set(int(i) for i in grid.generatorIdx)
    ranked = [n for n in centrality_order(grid) if n in generators]
    if count > len(ranked):
        raise ValueError("Asked for %d VSGs but the grid has %d generators" % (count, len(ranked)))
    return sorted(ranked[len(ranked) - count:])


def homogeneous_placement(grid, count, seed):
    """ `count` conventional generators drawn uniformly over the whole grid """
    if count > len(grid.generatorIdx):
        raise ValueError("Asked for %d VSGs but the grid has %d generators" % (count, len(grid.generatorIdx)))
    rng = random_stream(seed, STREAM_VSG_SELECTION)
    return sorted(int(i) for i in rng.choice(grid.generatorIdx, count, replace=False))


def select_vsgs(grid, selection, seed):
    """ Generator ids to promote for a VSG selection of ScenarioParameters """
    kind = selection['kind']
    if kind == 'ids':
        return sorted(int(i) for i in selection['ids'])
    if kind == 'fraction':
        count = int(round(selection['fraction'] * len(grid.generatorIdx)))
        rng = random_stream(seed, STREAM_VSG_SELECTION)
        return sorted(int(i) for i in rng.choice(grid.generatorIdx, count, replace=False)) if count else []
    if kind == 'area':
        inArea = [int(i) for i in grid.generatorIdx if grid.areas[i] == selection['area']]
        return inArea[:selection.get('count', len(inArea))]
    if kind == 'per_area':
        return sorted(rts96_vsg_candidates(grid, selection['count']))
    if kind == 'peripheral':
        return peripheral_placement(grid, selection['count'])
    if kind == 'homogeneous':
        return homogeneous_placement(grid, selection['count'], seed)
    raise ValueError("Selection '%s' does not pick generators" % kind)


def load_scenario_grid(name, seed):
    if name in SHIPPED_GRIDS:
        return shipped_grid(name, seed)
    return load_grid_file(name)


def resolve_scenario(scenario):
    """ Turns ScenarioParameters into the grid, its constant-inertia counterpart, the fault, policy and options.

    The constant-inertia grid has every VSG replaced by a generator with its reference inertia; it is the baseline
    all ratios are taken against. The result depends only on the scenario, so repeated calls agree exactly.
    """
    source = load_scenario_grid(scenario.grid, scenario.seed)
    constantGrid = demote_all(source)
    kind = scenario.vsg['kind']
    if kind == 'keep':
        grid = set_vsg_gains(source, scenario.alpha, scenario.beta)
    elif kind == 'none':
        grid = constantGrid
    else:
        ids = select_vsgs(constantGrid, scenario.vsg, scenario.seed)
        grid = promote_to_vsg(constantGrid, ids, scenario.alpha, scenario.beta, scenario.mMinRule)

    fault = None
    if scenario.fault is not None:
        node = scenario.fault['node']
        if node == 'first_vsg':
            if grid.numVsg == 0:
                raise InvalidFault("Scenario %s faults the first VSG but has none" % scenario.scenarioId)
            node = int(grid.vsgIdx[0])
        if 'delta_P' in scenario.fault:
            deltaP = float(scenario.fault['delta_P'])
        else:
            deltaP = float(constants.mw_to_pu(scenario.fault['delta_P_mw'],
                                              scenario.fault.get('base_mva', constants.POWER_BASE_MW)))
        fault = Fault(int(node), deltaP, float(scenario.fault.get('time', 0.)))

    p = scenario.policy
    band = constants.hz_to_rad_per_s(p['band_hz']) if p.get('band_hz') is not None else None
    policy = VsgPolicy(p['mode'], epsilon=p.get('epsilon'), m_reset=p.get('m_reset'), band=band, hold=p.get('hold'))
    opts = IntegratorOptions(scenario.tEnd, scenario.sampleDt, scenario.rtol, scenario.atol, check_horizon=False)

    return ResolvedScenario(grid, constantGrid, fault, policy, opts)


def provenance(scenario, grid):
    return OrderedDict([('seed', scenario.seed), ('grid_hash', stable_hash(grid_to_dict(grid))),
                        ('git_describe', git_describe(scenario.configFile)), ('centrality', CENTRALITY)])


def run_scenario(scenario, out_dir=None, save_trajectory=False, constant=False, profile_nodes=()):
    """ Integrates one scenario and computes its metrics.

    Parameters
    ----------
    scenario : ScenarioParameters
    out_dir : str or None
        Directory for trajectory_<id>.csv when save_trajectory is True.
    constant : bool
        Run the constant-inertia counterpart of the scenario instead.
    profile_nodes : list of int
        Nodes whose frequency profile (Hz, Hz/s, inertia) is written to profile_<scenario id>_<node>.csv.

    Returns
    -------
    (TrajectorySummary, MetricsReport)

    Raises
    ------
    ScenarioFailed
        Wrapping any gridinertia error, tagged with the scenario id.
    """
    try:
        resolved = resolve_scenario(scenario)
        grid = resolved.constant_grid if constant else resolved.grid
        trajectory = integrate(grid, resolved.fault, resolved.policy, resolved.opts)
        report = compute_metrics(trajectory)
    except GridInertiaError as err:
        raise ScenarioFailed(scenario.scenarioId, err) from err

    summary = TrajectorySummary(scenario.scenarioId, trajectory.numSamples, float(trajectory.times[0]),
                                float(trajectory.times[-1]), trajectory.omegaSync, trajectory.rearmTime,
                                trajectory.nfev, max_inertia_profile(trajectory), provenance(scenario, grid))
    if out_dir is not None and (save_trajectory or profile_nodes):
        if not os.path.exists(out_dir):
            os.makedirs(out_dir)
        if save_trajectory:
            save_trajectory_csv(trajectory, os.path.join(out_dir, 'trajectory_%s.csv' % scenario.scenarioId))
        for node in profile_nodes:
            save_frequency_profile_csv(trajectory, int(node),
                                       os.path.join(out_dir, 'profile_%s_%d.csv' % (scenario.scenarioId, int(node))))
    logger.info("%s: %s", scenario.scenarioId, report)

    return summary, report


def _run_task(task):
    """ Pool worker. Failures come back as records so nothing has to cross the process boundary as an exception. """
    key, scenario, constant = task
    try:
        summary, report = run_scenario(scenario, constant=constant)
        return OrderedDict([('key', key), ('summary', summary), ('report', report), ('error', None)])
    except ScenarioFailed as err:
        logger.error(str(err))
        return OrderedDict([('key', key), ('summary', None), ('report', None),
                            ('error', OrderedDict([('scenario_id', scenario.scenarioId),
                                                   ('type', type(err.cause).__name__), ('message', str(err.cause))]))])


def execute(tasks, jobs=1):
    """ Runs (key, scenario, constant) tasks serially or on a process pool; results are sorted by key """
    if jobs is None or jobs <= 1 or len(tasks) <= 1:
        results = [_run_task(t) for t in tasks]
    else:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(_run_task, tasks))

    return sorted(results, key=lambda r: r['key'])


class SweepResult(object):
    def __init__(self, alphas, betas, baseline, reports, failures, provenance):
        self.alphas = list(alphas)
        self.betas = list(betas)
        self.baseline = baseline
        self.reports = reports
        self.failures = failures
        self.provenance = provenance
        self.ratios = OrderedDict((cell, ratio_report(report, baseline)) for cell, report in reports.items())

    def ratio_matrix(self, metric):
        """ len(alphas) x len(betas) array of ratios, nan where the cell failed """
        matrix = np.full((len(self.alphas), len(self.betas)), np.nan)
        for (i, j), ratios in self.ratios.items():
            matrix[i, j] = ratios.ratios.get(metric, np.nan)
        return matrix

    def rows(self, metrics=constants.METRIC_NAMES):
        """ Long format (alpha, beta, metric, ratio) in canonical order """
        rows = []
        for i, alpha in enumerate(self.alphas):
            for j, beta in enumerate(self.betas):
                ratios = self.ratios.get((i, j))
                for metric in metrics:
                    rows.append((alpha, beta, metric, ratios.ratios.get(metric, np.nan) if ratios else np.nan))
        return rows

    @property
    def converged(self):
        return not self.failures and self.baseline.converged and all(r.converged for r in self.reports.values())


def sweep_alpha_beta(params, jobs=1):
    """ One constant-inertia baseline plus one adaptive run per (alpha, beta) cell.

    Failed cells are recorded in `failures` and left out of the ratios; the sweep carries on.
    """
    scenario = params.scenario
    tasks = [((0, -1, -1), scenario.replace(scenario_id='%s_baseline' % scenario.scenarioId), True)]
    for i, alpha in enumerate(params.alphas):
        for j, beta in enumerate(params.betas):
            cell = scenario.replace(scenario_id='%s_a%g_b%g' % (scenario.scenarioId, alpha, beta), alpha=alpha,
                                    beta=beta)
            tasks.append(((1, i, j), cell, False))
    logger.info("Sweep %s: %d x %d cells on %s worker(s)", scenario.scenarioId, len(params.alphas), len(params.betas),
                jobs)
    results = execute(tasks, jobs)

    baseline = results[0]
    if baseline['error'] is not None:
        raise HarnessError("Baseline run of sweep %s failed: %s" % (scenario.scenarioId, baseline['error']['message']))
    reports, failures = OrderedDict(), []
    for r in results[1:]:
        i, j = r['key'][1:]
        if r['error'] is None:
            reports[(i, j)] = r['report']
        else:
            failures.append(OrderedDict([('alpha', params.alphas[i]), ('beta', params.betas[j])] +
                                        list(r['error'].items())))

    return SweepResult(params.alphas, params.betas, baseline['report'], reports, failures,
                       baseline['summary'].provenance)


def _summary_statistics(rows, metrics):
    summary = OrderedDict()
    for metric in metrics:
        ratios = np.array([row['ratios'][metric] for row in rows if metric in row['ratios']], dtype=float)
        ratios = ratios[np.isfinite(ratios)]
        summary[metric] = OrderedDict([
            ('count', int(ratios.size)),
            ('median_ratio', float(np.median(ratios)) if ratios.size else np.nan),
            ('fraction_better', float(np.mean(ratios < 1)) if ratios.size else np.nan),
            ('count_worse_20pc', int(np.sum(ratios > 1.2)))])
    return summary


class CampaignResult(object):
    def __init__(self, rows, failures, summary, provenance, variants):
        """ Per-fault ratio rows in centrality order, with summary statistics per metric """
        self.rows = rows
        self.failures = failures
        self.summary = summary
        self.provenance = provenance
        self.variants = variants
        self.converged = not failures and all(row['converged'] for row in rows)


def _qualifying_generators(grids, threshold):
    nodes = None
    for grid in grids:
        found = set(int(i) for i in grid.generatorIdx if grid.P[i] >= threshold)
        nodes = found if nodes is None else nodes & found
    return sorted(nodes)


def _fault_rows(grid, nodes, results, split_fraction, first, second, metrics):
    order = centrality_order(grid)
    rank = {n: r for r, n in enumerate(order)}
    central = central_nodes(grid, split_fraction)
    byKey = {r['key']: r for r in results}
    rows, failures = [], []
    for node in sorted(nodes, key=lambda n: rank[n]):
        a, b = byKey[(rank[node], node, first)], byKey[(rank[node], node, second)]
        errors = [r['error'] for r in (a, b) if r['error'] is not None]
        if errors:
            failures.extend(OrderedDict([('node', node)] + list(e.items())) for e in errors)
            continue
        ratios = ratio_report(a['report'], b['report'], metrics)
        rows.append(OrderedDict([
            ('node', node), ('rank', rank[node]), ('class', 'central' if node in central else 'peripheral'),
            ('P', float(grid.P[node])), ('ratios', ratios.ratios),
            ('converged', a['report'].converged and b['report'].converged)]))
    return rows, failures


def fault_campaign(params, jobs=1, metrics=constants.METRIC_NAMES + ('coherency',)):
    """ Loss of `delta_p_mw` at every conventional generator with P >= `threshold_mw`, adaptive vs constant.

    Ratios are adaptive / constant; rows come in centrality order with the central/peripheral label.
    """
    scenario = params.scenario.replace(fault=None)
    grid = resolve_scenario(scenario).grid
    nodes = _qualifying_generators([grid], params.thresholdPU)
    if not nodes:
        raise NoQualifyingFaults("No conventional generator injects %g MW or more" % params.thresholdMW)
    rank = {n: r for r, n in enumerate(centrality_order(grid))}

    tasks = []
    for node in nodes:
        faulted = scenario.replace(scenario_id='%s_fault%d' % (scenario.scenarioId, node),
                                   fault={'node': node, 'delta_P': params.deltaPPU})
        tasks.append(((rank[node], node, 'adaptive'), faulted, False))
        tasks.append(((rank[node], node, 'constant'), faulted, True))
    logger.info("Fault campaign %s: %d faults on %s worker(s)", scenario.scenarioId, len(nodes), jobs)
    results = execute(tasks, jobs)

    rows, failures = _fault_rows(grid, nodes, results, params.splitFraction, 'adaptive', 'constant', metrics)
    return CampaignResult(rows, failures, _summary_statistics(rows, metrics), provenance(scenario, grid),
                          ('adaptive', 'constant'))


def placement_compare(params, jobs=1, metrics=constants.METRIC_NAMES + ('coherency',)):
    """ Identical fault campaigns under two VSG placements with the same total m_min.

    The first two placements of the parameters are compared (normally 'peripheral' and 'homogeneous'); ratios are
    first / second. Only generators that stay conventional under both placements are faulted.
    """
    if len(params.placements) < 2:
        raise HarnessError("placement_compare needs two placements, got %d" % len(params.placements))
    (nameA, vsgA), (nameB, vsgB) = list(params.placements.items())[:2]
    scenarioA = params.scenario.replace(fault=None, vsg=vsgA, scenario_id='%s_%s' % (params.scenario.scenarioId, nameA))
    scenarioB = params.scenario.replace(fault=None, vsg=vsgB, scenario_id='%s_%s' % (params.scenario.scenarioId, nameB))
    gridA, gridB = resolve_scenario(scenarioA).grid, resolve_scenario(scenarioB).grid
    budgetA, budgetB = total_min_inertia(gridA), total_min_inertia(gridB)
    if abs(budgetA - budgetB) > BUDGET_TOL:
        raise InertiaBudgetMismatch(budgetA, budgetB)

    nodes = _qualifying_generators([gridA, gridB], params.thresholdPU)
    if not nodes:
        raise NoQualifyingFaults("No generator stays conventional under both placements with P >= %g MW"
                                 % params.thresholdMW)
    rank = {n: r for r, n in enumerate(centrality_order(gridA))}
    tasks = []
    for node in nodes:
        fault = {'node': node, 'delta_P': params.deltaPPU}
        tasks.append(((rank[node], node, nameA), scenarioA.replace(
            scenario_id='%s_fault%d' % (scenarioA.scenarioId, node), fault=fault), False))
        tasks.append(((rank[node], node, nameB), scenarioB.replace(
            scenario_id='%s_fault%d' % (scenarioB.scenarioId, node), fault=fault), False))
    logger.info("Placement comparison %s vs %s: %d faults, m_min budget %.6g", nameA, nameB, len(nodes), budgetA)
    results = execute(tasks, jobs)

    rows, failures = _fault_rows(gridA, nodes, results, params.splitFraction, nameA, nameB, metrics)
    summary = OrderedDict((cls, _summary_statistics([r for r in rows if r['class'] == cls], metrics))
                          for cls in ('central', 'peripheral'))
    return CampaignResult(rows, failures, summary, provenance(scenarioA, gridA), (nameA, nameB))


def policy_comparison(scenario):
    """ Constant inertia, plain adaptive and rearm adaptive runs of one scenario, with ratios to constant """
    variants = OrderedDict()
    variants['constant'] = run_scenario(scenario, constant=True)
    variants['plain'] = run_scenario(scenario.replace(policy={'mode': 'plain'},
                                                      scenario_id='%s_plain' % scenario.scenarioId))
    rearm = dict(scenario.policy) if scenario.policy.get('mode') == 'rearm' else {'mode': 'rearm'}
    variants['rearm'] = run_scenario(scenario.replace(policy=rearm, scenario_id='%s_rearm' % scenario.scenarioId))

    baseline = variants['constant'][1]
    ratios = OrderedDict((name, ratio_report(report, baseline)) for name, (_, report) in variants.items()
                         if name != 'constant')
    return variants, ratios
