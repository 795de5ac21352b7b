"""Closed-form invariant bundles for bridges, circles and elementary graphs, and additivity."""
import logging
from fractions import Fraction

from components.admissible import InvariantBundle, invariant_bundle
from components.graph_core import (
    BRIDGE, VertexPoint, decompose_pointed_sum, genus, make_graph, type_lengths,
)
from components.resistance import resistance_kernel
from utils.errors import GenusMismatch, InvalidSideGenus, InvalidSpec

logger = logging.getLogger(__name__)


def _as_scalar(value):
    return value if isinstance(value, float) else Fraction(value)


def bridge_bundle(g, i, length):
    """Segment whose ends carry genus i and g − i."""
    if not 1 <= i <= g - 1:
        raise InvalidSideGenus(f"side genus {i} must lie in [1, {g - 1}] for g={g}")
    length = _as_scalar(length)
    i = min(i, g - i)
    product = i * (g - i)
    return InvariantBundle(
        genus=g,
        length=length,
        tau=product * length / g ** 2,
        epsilon=(4 * product - g) * length / g,
        phi=2 * product * length / g,
        lam=product * length / (2 * g + 1),
        type_lengths=((i, length),),
    )


def single_vertex_circle_bundle(g, length):
    """One loop at a vertex with q = g − 1."""
    if g < 1:
        raise InvalidSpec('circle genus must be >= 1')
    length = _as_scalar(length)
    return InvariantBundle(
        genus=g,
        length=length,
        tau=(2 * g - 1) * length / (12 * g ** 2),
        epsilon=(g - 1) * length / (3 * g),
        phi=(g - 1) * length / (6 * g),
        lam=g * length / (8 * g + 4),
        type_lengths=((0, length),),
    )


def segment_graph(g, i, length):
    return make_graph([('a', i), ('b', g - i)], [('e', ('a', 'b'), _as_scalar(length))], name=f"segment-g{g}-i{i}")


def circle_graph(marks, length, name='circle'):
    """Circle of the given length with vertices at the marked positions.

    ``marks`` is a list of (position in [0, length), q). A single mark gives a loop.
    """
    length = _as_scalar(length)
    marks = sorted(((_as_scalar(p), q) for p, q in marks), key=lambda m: m[0])
    positions = [p for p, _ in marks]
    if len(set(positions)) != len(positions):
        raise InvalidSpec('circle marks must have distinct positions')
    if any(not 0 <= p < length for p in positions):
        raise InvalidSpec('circle marks must lie in [0, length)')

    vertices = [(f"A{k}", q) for k, (_, q) in enumerate(marks)]
    edges = []
    for k in range(len(marks)):
        start = positions[k]
        end = positions[k + 1] if k + 1 < len(marks) else positions[0] + length
        edges.append((f"c{k}", (f"A{k}", f"A{(k + 1) % len(marks)}"), end - start))
    return make_graph(vertices, edges, name=name)


def circle_bundle(g, marks, length):
    """Bundle of a circle with marked points, evaluated by the admissible machinery."""
    if sum(q for _, q in marks) != g - 1:
        raise GenusMismatch(f"marks sum to {sum(q for _, q in marks)}, expected g − 1 = {g - 1}")
    if not marks:
        marks = [(0, 0)]
    return invariant_bundle(circle_graph(marks, length, name=f"circle-g{g}"))


def _is_single_vertex_circle(component):
    return len(component.vertices) == 1 and len(component.edges) == 1 and component.edges[0].is_loop


def component_bundle(component):
    """Closed form when one applies, otherwise the admissible module."""
    graph = component.graph
    g = genus(graph)
    if component.kind == BRIDGE:
        a, b = graph.edges[0].ends
        return bridge_bundle(g, graph.q(a), graph.edges[0].length)
    if _is_single_vertex_circle(graph):
        return single_vertex_circle_bundle(g, graph.edges[0].length)
    return invariant_bundle(graph)


def additive_bundle(graph):
    """Sum of component bundles over the pointed-sum decomposition."""
    components = decompose_pointed_sum(graph)
    bundles = [component_bundle(c) for c in components]
    total = bundles[0]
    for bundle in bundles[1:]:
        total = total + bundle
    logger.debug("additive bundle of %s over %d components", graph.name or '<anon>', len(components))
    return total


def is_elementary(graph):
    """Every edge lies on at most one circle: each 2-edge-connected piece is a cycle."""
    for component in decompose_pointed_sum(graph):
        piece = component.graph
        if component.kind == BRIDGE:
            continue
        if len(piece.edges) - len(piece.vertices) + 1 != 1:
            return False
    return True


def circle_cross_terms(graph):
    """Per circle: Σ over ordered pairs A ≠ B of marked vertices of g_A g_B r_C(A, B) / g."""
    g = genus(graph)
    terms = []
    for component in decompose_pointed_sum(graph):
        if component.kind == BRIDGE:
            continue
        piece = component.graph
        kernel = resistance_kernel(piece)
        marked = [v for v in piece.vertices if v.q > 0]
        total = piece.scalar(0)
        for a in marked:
            for b in marked:
                if a.id != b.id:
                    total += a.q * b.q * kernel.between(VertexPoint(a.id), VertexPoint(b.id)) / g
        terms.append((component, len(marked), total))
    return terms


def elementary_phi(graph):
    """φ of an elementary graph from lengths by type plus circle cross terms."""
    if not is_elementary(graph):
        raise InvalidSpec(f"{graph.name or 'graph'} is not elementary")
    g = genus(graph)
    table = type_lengths(graph)
    value = (g - 1) * table.get(0, graph.scalar(0)) / (6 * g)
    for i, length in table.items():
        if i > 0:
            value += 2 * i * (g - i) * length / g
    for _, _, cross in circle_cross_terms(graph):
        value += cross
    return value


def equality_expected(graph):
    """Equality in the elementary φ bound iff every circle carries at most one marked vertex."""
    return all(count <= 1 for _, count, _ in circle_cross_terms(graph))
