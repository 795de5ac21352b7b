"""Polarized metrized graphs: validation, genus, canonical divisor, edge types, pointed sums."""
import logging
from collections import defaultdict
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property

import networkx as nx
from networkx.algorithms import isomorphism

from utils.errors import InvariantAssertionError, ValidationError, Violation
from utils.scalars import is_exact

logger = logging.getLogger(__name__)

TWO_EDGE_CONNECTED = 'two-edge-connected'
BRIDGE = 'bridge'


@dataclass(frozen=True)
class Vertex:
    id: str
    q: int = 0


@dataclass(frozen=True)
class Edge:
    id: str
    ends: tuple
    length: object

    @property
    def is_loop(self):
        return self.ends[0] == self.ends[1]

    def other_end(self, vertex):
        return self.ends[1] if vertex == self.ends[0] else self.ends[0]


@dataclass(frozen=True)
class VertexPoint:
    vertex: str


@dataclass(frozen=True)
class EdgePoint:
    """A point on an edge at the given distance from ``ends[0]``."""
    edge: str
    offset: object


@dataclass(frozen=True)
class Divisor:
    terms: tuple = ()

    @property
    def degree(self):
        return sum((c for _, c in self.terms), 0)

    def merged(self):
        totals = defaultdict(int)
        order = []
        for point, coefficient in self.terms:
            if point not in totals:
                order.append(point)
            totals[point] += coefficient
        return Divisor(tuple((p, totals[p]) for p in order if totals[p] != 0))

    def coefficient(self, point):
        return sum((c for p, c in self.terms if p == point), 0)

    def support(self):
        return [p for p, c in self.merged().terms]


@dataclass(frozen=True, eq=False)
class PolarizedMetrizedGraph:
    vertices: tuple
    edges: tuple
    name: str = ''

    # Fraction(1) == 1.0 and both hash alike; the backend keeps cache keys apart.
    def _identity(self):
        return self.vertices, self.edges, self.backend

    def __eq__(self, other):
        if not isinstance(other, PolarizedMetrizedGraph):
            return NotImplemented
        return self._identity() == other._identity()

    def __hash__(self):
        return hash(self._identity())

    @cached_property
    def _vertex_index(self):
        return {v.id: v for v in self.vertices}

    @cached_property
    def _edge_index(self):
        return {e.id: e for e in self.edges}

    @property
    def vertex_ids(self):
        return [v.id for v in self.vertices]

    @property
    def edge_ids(self):
        return [e.id for e in self.edges]

    def vertex(self, vertex_id):
        return self._vertex_index[vertex_id]

    def edge(self, edge_id):
        return self._edge_index[edge_id]

    def q(self, vertex_id):
        return self._vertex_index[vertex_id].q

    def has_vertex(self, vertex_id):
        return vertex_id in self._vertex_index

    def has_edge(self, edge_id):
        return edge_id in self._edge_index

    def valence(self, vertex_id):
        """Number of edge-ends at the vertex; a loop counts twice."""
        return sum((e.ends[0] == vertex_id) + (e.ends[1] == vertex_id) for e in self.edges)

    def incident_ends(self, vertex_id):
        """(edge, end index) pairs for every edge-end at the vertex."""
        out = []
        for e in self.edges:
            for end in (0, 1):
                if e.ends[end] == vertex_id:
                    out.append((e, end))
        return out

    @property
    def backend(self):
        return 'exact' if all(is_exact(e.length) for e in self.edges) else 'float'

    def scalar(self, value):
        """Coerce an int/Fraction into this graph's backend."""
        return Fraction(value) if self.backend == 'exact' else float(value)

    @property
    def total_length(self):
        return sum((e.length for e in self.edges), self.scalar(0))

    def multigraph(self):
        """networkx MultiGraph keyed by edge id, with q and length attributes."""
        G = nx.MultiGraph()
        for v in self.vertices:
            G.add_node(v.id, q=v.q)
        for e in self.edges:
            G.add_edge(e.ends[0], e.ends[1], key=e.id, length=e.length)
        return G

    def normalize_point(self, point):
        """Map edge endpoints to VertexPoints and check offsets."""
        if isinstance(point, VertexPoint):
            if not self.has_vertex(point.vertex):
                raise KeyError(f"unknown vertex {point.vertex!r}")
            return point
        e = self.edge(point.edge)
        if point.offset < 0 or point.offset > e.length:
            raise ValueError(f"offset {point.offset} outside [0, {e.length}] on edge {e.id}")
        if point.offset == 0:
            return VertexPoint(e.ends[0])
        if point.offset == e.length:
            return VertexPoint(e.ends[1])
        return point

    def with_name(self, name):
        return PolarizedMetrizedGraph(self.vertices, self.edges, name=name)


def make_graph(vertices, edges, name=''):
    """Build and validate a graph from (id, q) and (id, (a, b), length) tuples."""
    raw = {
        'vertices': [{'id': v, 'q': q} for v, q in vertices],
        'edges': [{'id': e, 'ends': list(ends), 'length': length} for e, ends, length in edges],
    }
    return validate(raw, name=name)


def validate(raw, name=''):
    """Check a raw description and return a PolarizedMetrizedGraph.

    ``raw`` is a mapping with 'vertices' [{'id', 'q'}] and 'edges' [{'id', 'ends', 'length'}]
    whose lengths are already scalars, or an existing graph to be re-checked.
    Raises ValidationError listing every violated rule.
    """
    if isinstance(raw, PolarizedMetrizedGraph):
        name = name or raw.name
        raw = {
            'vertices': [{'id': v.id, 'q': v.q} for v in raw.vertices],
            'edges': [{'id': e.id, 'ends': list(e.ends), 'length': e.length} for e in raw.edges],
        }

    violations, semantic = [], []
    vertices, edges = [], []
    seen_vertices, seen_edges = set(), set()

    for item in raw.get('vertices', []):
        vid = str(item['id'])
        q = item.get('q', 0)
        if vid in seen_vertices:
            violations.append(Violation('DuplicateId', vid, 'vertex id repeated'))
            continue
        seen_vertices.add(vid)
        if not isinstance(q, int) or q < 0:
            semantic.append(Violation('NegativeQ', vid, f"q={q}"))
        vertices.append(Vertex(vid, q))

    for item in raw.get('edges', []):
        eid = str(item['id'])
        ends = tuple(str(x) for x in item['ends'])
        length = item['length']
        if eid in seen_edges:
            violations.append(Violation('DuplicateId', eid, 'edge id repeated'))
            continue
        seen_edges.add(eid)
        if len(ends) != 2:
            violations.append(Violation('BadEnds', eid, 'an edge needs exactly two ends'))
            continue
        for end in ends:
            if end not in seen_vertices:
                violations.append(Violation('UnknownVertex', eid, f"end {end!r}"))
        if not length > 0:
            semantic.append(Violation('NonPositiveLength', eid, f"length={length}"))
        edges.append(Edge(eid, ends, length))

    if not vertices:
        violations.append(Violation('EmptyGraph', '', 'no vertices'))

    if violations:
        raise ValidationError(violations)

    graph = PolarizedMetrizedGraph(tuple(vertices), tuple(edges), name=name)
    violations = semantic

    if not nx.is_connected(graph.multigraph()):
        violations.append(Violation('NotConnected', '', 'graph has several components'))

    for v in graph.vertices:
        order = graph.valence(v.id) + 2 * v.q - 2
        if v.q >= 0 and order < 0:
            violations.append(Violation('NonEffectiveK', v.id, f"v+2q-2={order}"))

    if violations:
        raise ValidationError(violations)

    logger.debug("validated graph %s: |V|=%d |E|=%d", name or '<anon>', len(vertices), len(edges))
    return graph


def betti_number(graph):
    return len(graph.edges) - len(graph.vertices) + 1


def canonical_divisor(graph):
    """K = sum over vertices of (v + 2q - 2) x."""
    terms = []
    for v in graph.vertices:
        order = graph.valence(v.id) + 2 * v.q - 2
        if order:
            terms.append((VertexPoint(v.id), order))
    return Divisor(tuple(terms))


def genus(graph):
    g = sum(v.q for v in graph.vertices) + betti_number(graph)
    degree = canonical_divisor(graph).degree
    if 2 * g != 2 + degree:
        raise InvariantAssertionError(f"genus {g} disagrees with deg K = {degree}")
    return g


def _subgraph_genus(graph, vertex_ids, edge_ids):
    vertex_ids = set(vertex_ids)
    return sum(graph.q(v) for v in vertex_ids) + len(edge_ids) - len(vertex_ids) + 1


def _component_without(graph, removed_edges, start):
    """Vertices and edges reachable from ``start`` once ``removed_edges`` are cut."""
    G = graph.multigraph()
    G.remove_edges_from([(graph.edge(e).ends[0], graph.edge(e).ends[1], e) for e in removed_edges])
    nodes = nx.node_connected_component(G, start)
    edge_ids = [key for a, b, key in G.edges(keys=True) if a in nodes and b in nodes]
    return nodes, edge_ids


def is_bridge(graph, edge_id):
    e = graph.edge(edge_id)
    if e.is_loop:
        return False
    G = graph.multigraph()
    G.remove_edge(e.ends[0], e.ends[1], key=edge_id)
    return not nx.has_path(G, e.ends[0], e.ends[1])


def bridges(graph):
    return [e.id for e in graph.edges if is_bridge(graph, e.id)]


def bridge_side_genus(graph, edge_id):
    """Genus of the side containing ends[0] after cutting the bridge."""
    e = graph.edge(edge_id)
    nodes, edge_ids = _component_without(graph, [edge_id], e.ends[0])
    return _subgraph_genus(graph, nodes, edge_ids)


def classify_edge_type(graph, edge_id):
    if not is_bridge(graph, edge_id):
        return 0
    g = genus(graph)
    h = bridge_side_genus(graph, edge_id)
    return min(h, g - h)


def type_lengths(graph):
    """Map i -> total length of type-i edges (only types that occur)."""
    table = {}
    for e in graph.edges:
        i = classify_edge_type(graph, e.id)
        table[i] = table.get(i, graph.scalar(0)) + e.length
    return dict(sorted(table.items()))


def is_two_edge_connected(graph):
    return len(graph.edges) > 0 and not bridges(graph)


@dataclass(frozen=True)
class PointedSumComponent:
    """One piece of a pointed-sum decomposition.

    ``graph`` carries the quotient polarization (each vertex marked with the genus of the
    part of the original graph hanging off it); ``original_q`` keeps the input marks so the
    pieces can be glued back.
    """
    graph: PolarizedMetrizedGraph
    kind: str
    original_q: tuple

    @property
    def attachments(self):
        return {v.id: v.q for v in self.graph.vertices}


def decompose_pointed_sum(graph):
    """Split into 2-edge-connected pieces and bridge edges, ordered by first edge index."""
    bridge_ids = set(bridges(graph))
    G = graph.multigraph()
    G.remove_edges_from([(graph.edge(e).ends[0], graph.edge(e).ends[1], e) for e in bridge_ids])

    edge_position = {e.id: i for i, e in enumerate(graph.edges)}
    groups = []
    for nodes in nx.connected_components(G):
        edge_ids = [key for a, b, key in G.edges(keys=True) if a in nodes]
        if edge_ids:
            groups.append((TWO_EDGE_CONNECTED, edge_ids))
    for eid in bridge_ids:
        groups.append((BRIDGE, [eid]))

    if not groups:
        return [PointedSumComponent(graph, TWO_EDGE_CONNECTED, tuple((v.id, v.q) for v in graph.vertices))]

    groups.sort(key=lambda item: min(edge_position[e] for e in item[1]))

    components = []
    for kind, edge_ids in groups:
        edge_ids = sorted(edge_ids, key=edge_position.get)
        vertex_ids = []
        for eid in edge_ids:
            for end in graph.edge(eid).ends:
                if end not in vertex_ids:
                    vertex_ids.append(end)
        vertex_ids.sort(key=graph.vertex_ids.index)

        vertices = []
        for vid in vertex_ids:
            nodes, fiber_edges = _component_without(graph, edge_ids, vid)
            vertices.append(Vertex(vid, _subgraph_genus(graph, nodes, fiber_edges)))

        piece = PolarizedMetrizedGraph(
            tuple(vertices),
            tuple(graph.edge(e) for e in edge_ids),
            name=f"{graph.name}[{edge_ids[0]}]" if graph.name else edge_ids[0],
        )
        components.append(PointedSumComponent(piece, kind, tuple((v, graph.q(v)) for v in vertex_ids)))

    logger.debug("decomposed %s into %d pointed-sum components", graph.name or '<anon>', len(components))
    return components


def glue_pointed_sum(components, name=''):
    """Inverse of decompose_pointed_sum: identify equal vertex ids, restore input marks."""
    q_values = {}
    vertex_order = []
    edges = []
    for comp in components:
        for vid, q in comp.original_q:
            if vid not in q_values:
                vertex_order.append(vid)
            q_values[vid] = q
        edges.extend(comp.graph.edges)
    vertices = tuple(Vertex(v, q_values[v]) for v in vertex_order)
    return validate(PolarizedMetrizedGraph(vertices, tuple(edges)), name=name)


def is_isometric(first, second):
    """Isomorphism of marked multigraphs respecting q and edge lengths."""
    return nx.is_isomorphic(
        first.multigraph(),
        second.multigraph(),
        node_match=isomorphism.categorical_node_match('q', 0),
        edge_match=isomorphism.categorical_multiedge_match('length', None),
    )
