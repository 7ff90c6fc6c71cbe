""" Shipped test grids. Every builder is deterministic in its seed and returns a balanced, validated Grid. """
import logging
import numpy as np
import gridinertia.constants as constants
from gridinertia.grid_model import Grid, Node, Line, NodeKind, sample_rts_params
from gridinertia.helpers import random_stream, STREAM_TOPOLOGY, STREAM_INJECTIONS

constants.init()
logger = logging.getLogger(__name__)


def two_bus(p=0.5, b=1., m=1., d_gen=0.3, d_load=constants.DEFAULT_LOAD_DAMPING):
    nodes = [Node(0, NodeKind.GENERATOR, p, d_gen, m=m, area='A'),
             Node(1, NodeKind.LOAD, -p, d_load, area='A')]

    return Grid(nodes, [Line(0, 1, b)])


def four_node():
    """ Two areas; node 2 is a VSG that replaced a 0.9 pu generator """
    nodes = [Node(0, NodeKind.GENERATOR, 1.0, 0.24, m=0.8, area='north'),
             Node(1, NodeKind.GENERATOR, 0.5, 0.18, m=0.6, area='north'),
             Node(2, NodeKind.VSG, 0.5, 0.27, m=0.9, m_min=0.3, alpha=5., beta=5., area='south'),
             Node(3, NodeKind.LOAD, -2.0, 0.1, area='south')]
    lines = [Line(0, 1, 5.), Line(1, 3, 4.), Line(0, 3, 3.), Line(2, 3, 4.)]

    return Grid(nodes, lines)


def _balance(nodes):
    """ Scales generator injections so that they exactly cover the loads """
    demand = -sum(n.P for n in nodes if n.kind is NodeKind.LOAD)
    supply = sum(n.P for n in nodes if n.kind is not NodeKind.LOAD)
    scaled = [n._replace(P=n.P * demand / supply) if n.kind is not NodeKind.LOAD else n for n in nodes]
    residual = sum(n.P for n in scaled)
    last = max(i for i, n in enumerate(scaled) if n.kind is not NodeKind.LOAD)
    scaled[last] = scaled[last]._replace(P=scaled[last].P - residual)

    return scaled


def _random_tree_edges(rng, nodeIds):
    return [(nodeIds[i], nodeIds[int(rng.integers(0, i))]) for i in range(1, len(nodeIds))]


def rts96_like(seed=1, buses_per_area=24, generators_per_area=10, b_range=(6., 14.), tie_b=4.):
    """ RTS-96 sized three-area test grid with all generation units conventional.

    Each area is a meshed ring of `buses_per_area` buses, `generators_per_area` of which are generators; the three
    areas are joined by five tie lines. Inertia follows the RTS-96 conventions of :func:`sample_rts_params`.
    Use :func:`rts96_vsg_candidates` for the two units per area to promote.
    """
    rngTopo = random_stream(seed, STREAM_TOPOLOGY)
    rngInj = random_stream(seed, STREAM_INJECTIONS)
    areaNames = ('I', 'II', 'III')
    nodes, edges = [], {}
    for a, areaName in enumerate(areaNames):
        ids = list(range(a * buses_per_area, (a + 1) * buses_per_area))
        genIds = set(int(i) for i in rngTopo.choice(ids, generators_per_area, replace=False))
        for i in ids:
            if i in genIds:
                nodes.append(Node(i, NodeKind.GENERATOR, rngInj.uniform(1., 3.), 0.18, m=0.6, area=areaName))
            else:
                nodes.append(Node(i, NodeKind.LOAD, -rngInj.uniform(0.8, 2.2), constants.DEFAULT_LOAD_DAMPING,
                                  area=areaName))
        ring = [(ids[k], ids[(k + 1) % len(ids)]) for k in range(len(ids))]
        chords = [(ids[k], ids[(k + int(rngTopo.integers(3, len(ids) // 2))) % len(ids)])
                  for k in range(0, len(ids), 3)]
        for f, t in ring + chords:
            edges.setdefault((min(f, t), max(f, t)), rngTopo.uniform(*b_range))
    ties = [(0, 1), (0, 1), (1, 2), (1, 2), (0, 2)]
    for a, c in ties:
        f = int(rngTopo.integers(a * buses_per_area, (a + 1) * buses_per_area))
        t = int(rngTopo.integers(c * buses_per_area, (c + 1) * buses_per_area))
        edges.setdefault((f, t), tie_b)

    grid = Grid(_balance(nodes), [Line(f, t, b) for (f, t), b in sorted(edges.items())])

    return sample_rts_params(grid, seed)


def rts96_vsg_candidates(grid, per_area=2):
    """ The first `per_area` generators of each area, by node id """
    chosen = []
    for area in sorted(set(grid.areas)):
        gens = [int(i) for i in grid.generatorIdx if grid.areas[i] == area]
        chosen.extend(gens[:per_area])

    return chosen


def random_grid(num_nodes, seed, generator_fraction=0.4, vsg_fraction=0., num_areas=2, extra_line_prob=0.15,
                b_range=(8., 16.), alpha=5., beta=5.):
    """ Connected random grid with mixed node kinds.

    A random spanning tree plus extra lines with probability `extra_line_prob`. The first node is always a
    generator. `vsg_fraction` of the inertial nodes become VSGs (m_min = m/3); with generator_fraction=1 and
    vsg_fraction=1 the grid contains VSGs only.
    """
    rngTopo = random_stream(seed, STREAM_TOPOLOGY)
    rngInj = random_stream(seed, STREAM_INJECTIONS)
    ids = list(range(num_nodes))
    edges = {}
    for f, t in _random_tree_edges(rngTopo, ids):
        edges[(min(f, t), max(f, t))] = rngTopo.uniform(*b_range)
    for i in ids:
        for j in ids[i + 1:]:
            if (i, j) not in edges and rngTopo.random() < extra_line_prob:
                edges[(i, j)] = rngTopo.uniform(*b_range)

    numInertial = max(1, int(round(generator_fraction * num_nodes)))
    inertial = [0] + sorted(int(i) for i in rngTopo.choice(ids[1:], numInertial - 1, replace=False)) \
        if num_nodes > 1 else [0]
    numVsg = int(round(vsg_fraction * len(inertial)))
    vsgs = set(int(i) for i in rngTopo.choice(inertial, numVsg, replace=False)) if numVsg else set()

    nodes = []
    for i in ids:
        area = 'area%d' % (i * num_areas // num_nodes)
        m = rngInj.uniform(*constants.RTS_M_RANGE)
        d = constants.RTS_DAMPING_RATIO * m
        if i in vsgs:
            nodes.append(Node(i, NodeKind.VSG, rngInj.uniform(0.5, 1.5), d, m=m, m_min=m / 3., alpha=alpha, beta=beta,
                              area=area))
        elif i in inertial:
            nodes.append(Node(i, NodeKind.GENERATOR, rngInj.uniform(0.5, 1.5), d, m=m, area=area))
        else:
            nodes.append(Node(i, NodeKind.LOAD, -rngInj.uniform(0.3, 1.0), constants.DEFAULT_LOAD_DAMPING, area=area))
    if all(n.kind is not NodeKind.LOAD for n in nodes):
        # no loads: zero-mean injections among the inertial nodes
        p = rngInj.uniform(-0.6, 0.6, num_nodes)
        p -= p.mean()
        nodes = [n._replace(P=float(p[n.id])) for n in nodes]
    else:
        nodes = _balance(nodes)

    return Grid(nodes, [Line(f, t, b) for (f, t), b in sorted(edges.items())])


def barbell_grid(seed=3, core_size=8, arm_length=10, b=8., m=0.6):
    """ Dense core (complete graph) with two sparse path arms hanging off it.

    Core nodes 0..core_size-1 form the 'core' area; the 'west' and 'east' arms are paths attached to core nodes 0
    and 1. Every second node is a generator (five per arm with the default length) and all generators carry the
    same inertia `m`, so placements with the same number of VSGs have the same inertia budget.
    """
    rngInj = random_stream(seed, STREAM_INJECTIONS)
    core = list(range(core_size))
    west = list(range(core_size, core_size + arm_length))
    east = list(range(core_size + arm_length, core_size + 2 * arm_length))
    edges = [(i, j) for i in core for j in core if i < j]
    edges += [(0, west[0])] + list(zip(west[:-1], west[1:]))
    edges += [(1, east[0])] + list(zip(east[:-1], east[1:]))

    nodes = []
    for i in core + west + east:
        area = 'core' if i in core else ('west' if i in west else 'east')
        position = i if i in core else (west.index(i) if i in west else east.index(i)) + 1
        if position % 2 == 0:
            nodes.append(Node(i, NodeKind.GENERATOR, rngInj.uniform(0.6, 1.2), constants.RTS_DAMPING_RATIO * m, m=m,
                              area=area))
        else:
            nodes.append(Node(i, NodeKind.LOAD, -rngInj.uniform(0.6, 1.2), constants.DEFAULT_LOAD_DAMPING, area=area))

    return Grid(_balance(nodes), [Line(f, t, b) for f, t in edges])


def random40(seed=7):
    """ 40-node random grid, half of the nodes generators, used by the fault campaign example """
    return random_grid(40, seed, generator_fraction=0.5)


SHIPPED_GRIDS = {
    'two_bus': two_bus,
    'four_node': four_node,
    'rts96_like': rts96_like,
    'barbell': barbell_grid,
    'random40': random40,
}


def shipped_grid(name, seed=None):
    """ Looks up a shipped grid by name; seeded builders receive `seed` """
    try:
        builder = SHIPPED_GRIDS[name]
    except KeyError:
        raise KeyError("Unknown shipped grid '%s'. Choose one of %s" % (name, sorted(SHIPPED_GRIDS)))
    if seed is not None and builder in (rts96_like, barbell_grid, random40):
        return builder(seed)

    return builder()
