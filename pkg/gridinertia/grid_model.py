import json
import logging
import os
from collections import namedtuple
from enum import Enum
import networkx as nx
import numpy as np
import scipy.sparse as sp
import gridinertia.constants as constants
from gridinertia.errors import (InvalidGridFile, DisconnectedGraph, PowerImbalance, NonPositiveParameter,
                                DuplicateLine, NotAGenerator)
from gridinertia.helpers import node_stream

constants.init()
logger = logging.getLogger(__name__)


class NodeKind(Enum):
    GENERATOR = 'Generator'
    LOAD = 'Load'
    VSG = 'Vsg'

    @classmethod
    def parse(cls, value):
        if isinstance(value, cls):
            return value
        for kind in cls:
            if str(value).lower() == kind.value.lower():
                return kind
        raise InvalidGridFile("Unknown node kind '%s'. Must be one of Generator, Load or Vsg" % value)


Node = namedtuple('Node', ['id', 'kind', 'P', 'd', 'm', 'm_min', 'alpha', 'beta', 'area'])
Node.__new__.__defaults__ = (None, None, None, None, None)
Node.__doc__ = """ Node of the grid. `m` is the inertia of a Generator; on a Vsg it is optional and holds the
constant inertia the VSG replaced (used as its rearm value). m_min, alpha and beta are Vsg only. """

Line = namedtuple('Line', ['from_node', 'to_node', 'b'])


def integer_id(value, what='Node id'):
    """ value as an int; integral floats such as 3.0 are accepted, 1.7, True or '2' are not """
    if isinstance(value, (bool, np.bool_)):
        raise InvalidGridFile("%s %r is not an integer" % (what, value))
    if isinstance(value, (int, np.integer)):
        return int(value)
    if isinstance(value, (float, np.floating)) and np.isfinite(value) and float(value).is_integer():
        return int(value)
    raise InvalidGridFile("%s %r is not an integer" % (what, value))


class Grid(object):
    def __init__(self, nodes, lines, frequency_base=constants.FREQUENCY_BASE_HZ):
        """ Immutable, validated description of a lossless grid.

        Every instance satisfies the grid invariants: contiguous node ids, strictly positive parameters,
        at most one line per node pair, a connected line graph and balanced power injections.
        Build it from a raw description with :func:`build_grid` or :func:`load_grid_file`.

        Parameters
        ----------
        nodes : list of Node
            One entry per node. Node ids must be 0..N-1.
        lines : list of Line
            Lossless lines with coupling b > 0 (susceptance times voltage magnitudes, pu).
        frequency_base : float
            Nominal frequency in Hz. Metadata only; the dynamics are written in deviation variables.
        """
        nodes = tuple(sorted((_check_node(n) for n in nodes), key=lambda n: n.id))
        lines = tuple(Line(integer_id(l.from_node, 'Line end'), integer_id(l.to_node, 'Line end'), float(l.b))
                      for l in lines)
        if len(nodes) == 0:
            raise InvalidGridFile("A grid needs at least one node")
        ids = [n.id for n in nodes]
        if ids != list(range(len(nodes))):
            raise InvalidGridFile("Node ids must be the contiguous range 0..%d" % (len(nodes) - 1))

        numNodes = len(nodes)
        seenPairs = set()
        for line in lines:
            if line.from_node == line.to_node:
                raise InvalidGridFile("Line %d-%d connects a node to itself" % (line.from_node, line.to_node))
            for end in (line.from_node, line.to_node):
                if not 0 <= end < numNodes:
                    raise InvalidGridFile("Line %d-%d refers to unknown node %d" % (line.from_node, line.to_node, end))
            if not line.b > 0:
                raise NonPositiveParameter((line.from_node, line.to_node), 'b')
            pair = (min(line.from_node, line.to_node), max(line.from_node, line.to_node))
            if pair in seenPairs:
                raise DuplicateLine(pair)
            seenPairs.add(pair)

        graph = nx.Graph()
        graph.add_nodes_from(range(numNodes))
        graph.add_edges_from((l.from_node, l.to_node) for l in lines)
        if not nx.is_connected(graph):
            raise DisconnectedGraph([sorted(c) for c in nx.connected_components(graph)])

        imbalance = float(sum(n.P for n in nodes))
        if abs(imbalance) > constants.BALANCE_TOL:
            raise PowerImbalance(imbalance)

        self._setup(nodes, lines, float(frequency_base))

    def _setup(self, nodes, lines, frequencyBase):
        kinds = tuple(n.kind for n in nodes)
        numNodes = len(nodes)

        def column(field, kindsWithField):
            values = np.full(numNodes, np.nan)
            for n in nodes:
                value = getattr(n, field)
                if n.kind in kindsWithField and value is not None:
                    values[n.id] = value
            values.setflags(write=False)
            return values

        lineFrom = np.array([l.from_node for l in lines], dtype=int)
        lineTo = np.array([l.to_node for l in lines], dtype=int)
        lineB = np.array([l.b for l in lines], dtype=float)
        numLines = len(lines)
        incidence = sp.csr_matrix((np.concatenate([np.ones(numLines), -np.ones(numLines)]),
                                   (np.concatenate([np.arange(numLines)] * 2), np.concatenate([lineFrom, lineTo]))),
                                  shape=(numLines, numNodes))

        generatorIdx = np.array([n.id for n in nodes if n.kind is NodeKind.GENERATOR], dtype=int)
        vsgIdx = np.array([n.id for n in nodes if n.kind is NodeKind.VSG], dtype=int)
        loadIdx = np.array([n.id for n in nodes if n.kind is NodeKind.LOAD], dtype=int)
        inertialIdx = np.array([n.id for n in nodes if n.kind is not NodeKind.LOAD], dtype=int)
        vsgPos = np.searchsorted(inertialIdx, vsgIdx)
        for arr in (lineFrom, lineTo, lineB, generatorIdx, vsgIdx, loadIdx, inertialIdx, vsgPos):
            arr.setflags(write=False)

        d = dict(
            nodes=nodes, lines=lines, frequencyBase=frequencyBase, numNodes=numNodes, kinds=kinds,
            areas=tuple(n.area for n in nodes),
            P=column('P', tuple(NodeKind)), d=column('d', tuple(NodeKind)),
            m=column('m', (NodeKind.GENERATOR, NodeKind.VSG)), mMin=column('m_min', (NodeKind.VSG,)),
            alpha=column('alpha', (NodeKind.VSG,)), beta=column('beta', (NodeKind.VSG,)),
            lineFrom=lineFrom, lineTo=lineTo, lineB=lineB, incidence=incidence,
            generatorIdx=generatorIdx, vsgIdx=vsgIdx, loadIdx=loadIdx, inertialIdx=inertialIdx, vsgPos=vsgPos)
        self.__dict__.update(d)
        self.__dict__['_frozen'] = True

    def __setattr__(self, key, value):
        raise AttributeError("Grid is immutable; build a new one instead")

    def __eq__(self, other):
        return isinstance(other, Grid) and self.nodes == other.nodes and self.lines == other.lines and \
            self.frequencyBase == other.frequencyBase

    def __hash__(self):
        return hash((self.nodes, self.lines, self.frequencyBase))

    def __repr__(self):
        return "Grid(%d nodes: %d generators, %d VSGs, %d loads; %d lines)" % (
            self.numNodes, len(self.generatorIdx), len(self.vsgIdx), len(self.loadIdx), len(self.lines))

    @property
    def numInertial(self):
        return len(self.inertialIdx)

    @property
    def numVsg(self):
        return len(self.vsgIdx)

    def inertia(self):
        """ Inertia of each inertial node at the synchronous fixed point: m for Generators, m_min for VSGs """
        m = np.array(self.m[self.inertialIdx])
        m[self.vsgPos] = self.mMin[self.vsgIdx]
        return m

    def line_flows(self, theta):
        """ b_ij sin(theta_from - theta_to) for each line. theta may be (N,) or (N, K) """
        diff = self.incidence @ theta
        b = self.lineB if np.ndim(theta) == 1 else self.lineB[:, None]
        return b * np.sin(diff)

    def nodal_flows(self, theta):
        """ sum_j b_ij sin(theta_i - theta_j) for each node. theta may be (N,) or (N, K) """
        return self.incidence.T @ self.line_flows(theta)

    def laplacian(self, theta):
        """ Sparse weighted Laplacian with weights b_ij cos(theta_i - theta_j); the Jacobian of the nodal flows """
        weights = self.lineB * np.cos(self.incidence @ theta)
        return (self.incidence.T @ sp.diags(weights) @ self.incidence).tocsr()

    def to_networkx(self):
        graph = nx.Graph()
        for n in self.nodes:
            graph.add_node(n.id, kind=n.kind.value, area=n.area)
        graph.add_weighted_edges_from(self.lines, weight='b')
        return graph

    def replace_nodes(self, newNodes):
        return Grid(newNodes, self.lines, self.frequencyBase)


def _check_node(node):
    kind = NodeKind.parse(node.kind)
    node = node._replace(id=integer_id(node.id), kind=kind, P=float(node.P))
    required = {NodeKind.GENERATOR: ('d', 'm'), NodeKind.LOAD: ('d',),
                NodeKind.VSG: ('d', 'm_min', 'alpha', 'beta')}[kind]
    for field in required:
        value = getattr(node, field)
        if value is None:
            raise InvalidGridFile("Node %d (%s) is missing '%s'" % (node.id, kind.value, field))
        if not float(value) > 0:
            raise NonPositiveParameter(node.id, field)
        node = node._replace(**{field: float(value)})
    if kind is NodeKind.VSG and node.m is not None:
        if not float(node.m) > 0:
            raise NonPositiveParameter(node.id, 'm')
        node = node._replace(m=float(node.m))
    if kind is NodeKind.LOAD:
        node = node._replace(m=None, m_min=None, alpha=None, beta=None)
    elif kind is NodeKind.GENERATOR:
        node = node._replace(m_min=None, alpha=None, beta=None)

    return node


def build_grid(spec):
    """ Validates a raw grid description (the parsed JSON grid file) and returns an immutable Grid.

    Parameters
    ----------
    spec : dict
        {"frequency_base_hz": 50, "nodes": [{"id", "kind", "P", "d", "m", "m_min", "alpha", "beta", "area"}],
        "lines": [{"from", "to", "b"}]}. All numbers in pu unless suffixed _hz. Load nodes without "d" get
        constants.DEFAULT_LOAD_DAMPING.
    """
    try:
        rawNodes = spec['nodes']
        rawLines = spec.get('lines', [])
    except (TypeError, KeyError):
        raise InvalidGridFile("Grid description needs a 'nodes' list")

    nodes = []
    for raw in rawNodes:
        try:
            kind = NodeKind.parse(raw['kind'])
            d = raw.get('d')
            if d is None and kind is NodeKind.LOAD:
                logger.warning("Load node %s has no damping; using the default d = %g pu", raw['id'],
                               constants.DEFAULT_LOAD_DAMPING)
                d = constants.DEFAULT_LOAD_DAMPING
            nodes.append(Node(id=raw['id'], kind=kind, P=raw['P'], d=d, m=raw.get('m'), m_min=raw.get('m_min'),
                              alpha=raw.get('alpha'), beta=raw.get('beta'), area=raw.get('area')))
        except KeyError as err:
            raise InvalidGridFile("Node entry %s is missing %s" % (raw, err))
    try:
        lines = [Line(raw['from'], raw['to'], raw['b']) for raw in rawLines]
    except KeyError as err:
        raise InvalidGridFile("Line entry is missing %s" % err)

    grid = Grid(nodes, lines, spec.get('frequency_base_hz', constants.FREQUENCY_BASE_HZ))
    logger.debug("Built %r", grid)

    return grid


def load_grid_file(filename):
    """ Reads a JSON grid file. Relative names not found in the working directory are looked up in DATA_FILES """
    if not os.path.isfile(filename):
        filename = os.path.join(constants.DATA_FILES, filename)
    try:
        with open(filename) as f:
            spec = json.load(f)
    except (OSError, ValueError) as err:
        raise InvalidGridFile("Could not read grid file %s: %s" % (filename, err))

    return build_grid(spec)


def grid_to_dict(grid):
    nodes = []
    for n in grid.nodes:
        entry = {'id': n.id, 'kind': n.kind.value, 'P': n.P, 'd': n.d}
        for field in ('m', 'm_min', 'alpha', 'beta', 'area'):
            if getattr(n, field) is not None:
                entry[field] = getattr(n, field)
        nodes.append(entry)
    lines = [{'from': l.from_node, 'to': l.to_node, 'b': l.b} for l in grid.lines]

    return {'frequency_base_hz': grid.frequencyBase, 'nodes': nodes, 'lines': lines}


def save_grid_file(grid, filename):
    with open(filename, 'w') as f:
        json.dump(grid_to_dict(grid), f, indent=2)


def apply_rts_inertia(node, mSample):
    """ RTS-96 conventions for one node given its drawn inertia: d = 0.3 m, and m_min = m/3 on VSGs """
    d = constants.RTS_DAMPING_RATIO * mSample
    if node.kind is NodeKind.GENERATOR:
        return node._replace(m=mSample, d=d)
    elif node.kind is NodeKind.VSG:
        return node._replace(m=mSample, m_min=constants.RTS_M_MIN_FRACTION * mSample, d=d)
    return node


def sample_inertia(seed, node_ids):
    """ Uniform draws in RTS_M_RANGE, one independent stream per node id """
    low, high = constants.RTS_M_RANGE
    return np.array([node_stream(seed, i).uniform(low, high) for i in node_ids])


def sample_rts_params(grid, seed):
    """ Draws generator/VSG inertia uniformly in [0.1, 1.1] pu and sets damping d = 0.3 m.

    VSG nodes receive m_min = m/3 of their drawn inertia. Each node draws from its own stream of `seed`, so the
    result is a pure function of (grid, seed) and does not depend on the number or order of other nodes.
    Loads are unchanged.
    """
    draws = sample_inertia(seed, grid.inertialIdx)
    newNodes = list(grid.nodes)
    for nodeId, mSample in zip(grid.inertialIdx, draws):
        newNodes[nodeId] = apply_rts_inertia(newNodes[nodeId], float(mSample))

    return grid.replace_nodes(newNodes)


def _per_node(value, nodeId):
    if isinstance(value, dict):
        return value[nodeId] if nodeId in value else value[str(nodeId)]
    return value


def promote_to_vsg(grid, node_ids, alpha, beta, m_min_rule=constants.RTS_M_MIN_FRACTION):
    """ Returns a new Grid in which the listed generators are VSGs with adaptive inertia.

    Parameters
    ----------
    grid : Grid
        Unmodified by this call.
    node_ids : list of int
        Generator nodes to promote.
    alpha, beta : float or dict
        Control gains, either global or keyed by node id.
    m_min_rule : float
        The VSG minimum inertia is m_min_rule times the generator's inertia. The original inertia is kept as the
        VSG reference inertia.
    """
    newNodes = list(grid.nodes)
    for nodeId in node_ids:
        node = grid.nodes[int(nodeId)]
        if node.kind is not NodeKind.GENERATOR:
            raise NotAGenerator(int(nodeId))
        newNodes[node.id] = node._replace(kind=NodeKind.VSG, m_min=m_min_rule * node.m,
                                          alpha=float(_per_node(alpha, node.id)), beta=float(_per_node(beta, node.id)))

    return grid.replace_nodes(newNodes)


def demote_all(grid):
    """ Constant-inertia version of a grid: every VSG becomes a generator with its reference inertia """
    newNodes = []
    for node in grid.nodes:
        if node.kind is NodeKind.VSG:
            m = node.m if node.m is not None else node.m_min
            node = node._replace(kind=NodeKind.GENERATOR, m=m, m_min=None, alpha=None, beta=None)
        newNodes.append(node)

    return grid.replace_nodes(newNodes)


def total_min_inertia(grid):
    return float(np.sum(grid.mMin[grid.vsgIdx]))


def set_vsg_gains(grid, alpha, beta):
    """ Same grid with the control gains of every VSG replaced; alpha and beta may be global or keyed by node id """
    newNodes = [n._replace(alpha=float(_per_node(alpha, n.id)), beta=float(_per_node(beta, n.id)))
                if n.kind is NodeKind.VSG else n for n in grid.nodes]

    return grid.replace_nodes(newNodes)
