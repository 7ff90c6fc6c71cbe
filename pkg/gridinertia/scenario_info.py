import json
import os
from collections import OrderedDict
import gridinertia.constants as constants
from gridinertia.errors import InvalidFault, InvalidPolicy

constants.init()

VSG_SELECTION_KINDS = ('keep', 'none', 'ids', 'fraction', 'area', 'per_area', 'peripheral', 'homogeneous')


class ScenarioParameters(object):

    def __init__(self, scenario_id, grid, vsg=None, alpha=5., beta=5., policy=None, fault=None, t_end=None,
                 sample_dt=None, rtol=None, atol=None, seed=1, m_min_rule=constants.RTS_M_MIN_FRACTION,
                 config_file=None):
        """ Everything needed to run one fault on one grid

        Parameters
        ----------
        scenario_id : str
            Name of the run. Used in output rows and file names.
        grid : str
            A shipped grid name (see network_library.SHIPPED_GRIDS) or a grid JSON file. Relative file names are
            looked up in constants.DATA_FILES when not found.
        vsg : dict or None
            Which generators become VSGs. One of
            {'kind': 'keep'} keeps the VSGs of the grid file (the default),
            {'kind': 'none'} demotes every VSG,
            {'kind': 'ids', 'ids': [3, 7]},
            {'kind': 'fraction', 'fraction': 0.25} picks that share of the generators at random from `seed`,
            {'kind': 'area', 'area': 'II', 'count': 2} the first `count` generators of an area,
            {'kind': 'per_area', 'count': 2} the first `count` generators of every area,
            {'kind': 'peripheral', 'count': 6} and {'kind': 'homogeneous', 'count': 6} the placements built from
            the centrality ordering.
        alpha : float or dict
            Inertia growth gain in pu, global or keyed by node id.
        beta : float or dict
            Inertia decay rate in 1/s, global or keyed by node id.
        policy : dict or None
            {'mode': 'plain'}, {'mode': 'deadband', 'epsilon': 1e-4} or
            {'mode': 'rearm', 'm_reset': None, 'band_hz': 1e-4, 'hold': 60}.
        fault : dict or None
            {'node': 2, 'delta_P': -1.0} in pu or {'node': 2, 'delta_P_mw': -100, 'base_mva': 100}. 'node' may be
            the string 'first_vsg'. None runs the unfaulted system.
        t_end, sample_dt, rtol, atol : float or None
            Integrator options; None takes the values in gridinertia.constants.
        seed : int
            Seed of every random decision of the scenario.
        m_min_rule : float
            Promoted generators get m_min = m_min_rule * m.
        config_file : str or None
            The JSON file the scenario came from, recorded for provenance.
        """
        self.scenarioId = str(scenario_id)
        self.grid = grid
        self.vsg = dict(vsg) if vsg is not None else {'kind': 'keep'}
        self.alpha = alpha
        self.beta = beta
        self.policy = dict(policy) if policy is not None else {'mode': 'plain'}
        self.fault = dict(fault) if fault is not None else None
        self.tEnd = t_end
        self.sampleDt = sample_dt
        self.rtol = rtol
        self.atol = atol
        self.seed = int(seed)
        self.mMinRule = m_min_rule
        self.configFile = config_file

        if self.vsg.get('kind') not in VSG_SELECTION_KINDS:
            raise ValueError("Unknown VSG selection '%s'. Must be one of %s" % (self.vsg.get('kind'),
                                                                                VSG_SELECTION_KINDS))
        if self.policy.get('mode') not in ('plain', 'deadband', 'rearm'):
            raise InvalidPolicy("Unknown VSG policy '%s'" % self.policy.get('mode'))
        if self.fault is not None and 'delta_P' not in self.fault and 'delta_P_mw' not in self.fault:
            raise InvalidFault("Fault of scenario %s needs delta_P or delta_P_mw" % self.scenarioId)

    def replace(self, **kwargs):
        """ Copy with some constructor arguments changed, e.g. scenario.replace(alpha=10., beta=10.) """
        args = self.as_dict()
        args.update(kwargs)
        return ScenarioParameters(**args)

    def as_dict(self):
        return OrderedDict([
            ('scenario_id', self.scenarioId), ('grid', self.grid), ('vsg', dict(self.vsg)), ('alpha', self.alpha),
            ('beta', self.beta), ('policy', dict(self.policy)), ('fault', self.fault), ('t_end', self.tEnd),
            ('sample_dt', self.sampleDt), ('rtol', self.rtol), ('atol', self.atol), ('seed', self.seed),
            ('m_min_rule', self.mMinRule), ('config_file', self.configFile)])

    @classmethod
    def from_dict(cls, d, config_file=None):
        d = dict(d)
        d.setdefault('scenario_id', 'scenario')
        d.setdefault('config_file', config_file)
        return cls(**d)

    def __repr__(self):
        return "ScenarioParameters(%s on %s)" % (self.scenarioId, self.grid)


class SweepParameters(object):

    def __init__(self, scenario, alphas=None, betas=None):
        """ Grid of (alpha, beta) gains, every cell compared with one constant-inertia baseline

        Parameters
        ----------
        scenario : ScenarioParameters
            Template; its alpha and beta are replaced cell by cell. Its VSG selection decides where the fault can
            sit: on a VSG ('node': 'first_vsg') or on a conventional generator.
        alphas, betas : list of float
            Gain axes. Default to the log-spaced constants.DEFAULT_ALPHAS / DEFAULT_BETAS, which contain 5 and 10.
        """
        self.scenario = scenario
        self.alphas = list(constants.DEFAULT_ALPHAS if alphas is None else alphas)
        self.betas = list(constants.DEFAULT_BETAS if betas is None else betas)
        if len(self.alphas) == 0 or len(self.betas) == 0:
            raise ValueError("Sweep axes must not be empty")

    @classmethod
    def from_dict(cls, d, config_file=None):
        return cls(ScenarioParameters.from_dict(d['scenario'], config_file), d.get('alphas'), d.get('betas'))


class CampaignParameters(object):

    def __init__(self, scenario, threshold_mw=100., delta_p_mw=-100., base_mva=constants.POWER_BASE_MW,
                 split_fraction=0.5):
        """ One fault per qualifying conventional generator

        Parameters
        ----------
        scenario : ScenarioParameters
            Template; its fault entry is replaced by each campaign fault.
        threshold_mw : float
            Generators with a pre-fault injection of at least this many MW are faulted.
        delta_p_mw : float
            Power step applied at each of them, in MW (negative for a loss of generation).
        base_mva : float
            Per-unit base used to convert the two MW values.
        split_fraction : float
            Share of the centrality ordering labelled 'central'; the rest is 'peripheral'.
        """
        self.scenario = scenario
        self.thresholdMW = threshold_mw
        self.deltaPMW = delta_p_mw
        self.baseMVA = base_mva
        self.splitFraction = split_fraction
        self.placements = OrderedDict()

    def add_placement(self, name, vsg):
        """ A VSG selection (same format as ScenarioParameters.vsg) to compare in placement_compare """
        self.placements[name] = dict(vsg)

    @property
    def thresholdPU(self):
        return float(constants.mw_to_pu(self.thresholdMW, self.baseMVA))

    @property
    def deltaPPU(self):
        return float(constants.mw_to_pu(self.deltaPMW, self.baseMVA))

    @classmethod
    def from_dict(cls, d, config_file=None):
        campaign = cls(ScenarioParameters.from_dict(d['scenario'], config_file), d.get('threshold_mw', 100.),
                       d.get('delta_p_mw', -100.), d.get('base_mva', constants.POWER_BASE_MW),
                       d.get('split_fraction', 0.5))
        for name, vsg in d.get('placements', {}).items():
            campaign.add_placement(name, vsg)
        return campaign


def read_config(filename):
    """ Loads a JSON experiment file, falling back to constants.DATA_FILES for relative names """
    if not os.path.isfile(filename):
        filename = os.path.join(constants.DATA_FILES, filename)
    with open(filename) as f:
        return json.load(f), os.path.abspath(filename)
