"""Effective resistance on metrized graphs.

Two independent routes are provided:

* network solves on an explicit resistor list (``point_resistance`` splits edges at the
  requested points; ``resistance_profile`` reduces the three-terminal network Γ−e to a star);
* the cached ``ResistanceKernel``, which inverts the grounded vertex Laplacian once and
  extends it to arbitrary points with the edge interpolation formula.

Exact graphs are solved with Fraction Gauss-Jordan elimination, float graphs with scipy.
"""
import logging
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import numpy as np
from scipy import linalg

from components.graph_core import EdgePoint, VertexPoint, is_bridge
from utils.errors import InvariantAssertionError
from utils.scalars import INFINITY, is_exact

logger = logging.getLogger(__name__)


def _gauss_jordan(matrix, rhs_columns):
    """Solve A X = B exactly; ``matrix`` is a list of Fraction rows, B a list of columns."""
    n = len(matrix)
    width = len(rhs_columns)
    rows = [list(matrix[i]) + [col[i] for col in rhs_columns] for i in range(n)]

    for col in range(n):
        pivot = next((r for r in range(col, n) if rows[r][col] != 0), None)
        if pivot is None:
            raise InvariantAssertionError('singular grounded Laplacian (graph not connected?)')
        rows[col], rows[pivot] = rows[pivot], rows[col]
        inv = 1 / rows[col][col]
        rows[col] = [x * inv for x in rows[col]]
        for r in range(n):
            if r != col and rows[r][col] != 0:
                factor = rows[r][col]
                rows[r] = [a - factor * b for a, b in zip(rows[r], rows[col])]

    return [[rows[i][n + k] for i in range(n)] for k in range(width)]


def _laplacian(nodes, resistors, exact):
    index = {node: i for i, node in enumerate(nodes)}
    zero = Fraction(0) if exact else 0.0
    L = [[zero] * len(nodes) for _ in nodes]
    for a, b, resistance in resistors:
        if a == b:
            continue
        conductance = 1 / resistance
        i, j = index[a], index[b]
        L[i][i] += conductance
        L[j][j] += conductance
        L[i][j] -= conductance
        L[j][i] -= conductance
    return L, index


def network_resistance(nodes, resistors, a, b):
    """Effective resistance between nodes a and b of a resistor network.

    ``resistors`` is a list of (node, node, resistance); parallel resistors are allowed and
    self-loops are ignored. Returns INFINITY when a and b are not connected.
    """
    if a == b:
        return 0
    exact = all(is_exact(r) for _, _, r in resistors)

    reachable = {a}
    frontier = [a]
    adjacency = {}
    for u, v, _ in resistors:
        adjacency.setdefault(u, set()).add(v)
        adjacency.setdefault(v, set()).add(u)
    while frontier:
        node = frontier.pop()
        for other in adjacency.get(node, ()):
            if other not in reachable:
                reachable.add(other)
                frontier.append(other)
    if b not in reachable:
        return INFINITY

    nodes = [n for n in nodes if n in reachable]
    resistors = [r for r in resistors if r[0] in reachable]
    L, index = _laplacian(nodes, resistors, exact)

    keep = [i for i in range(len(nodes)) if i != index[b]]
    reduced = [[L[i][j] for j in keep] for i in keep]
    rhs = [Fraction(0) if exact else 0.0] * len(keep)
    rhs[keep.index(index[a])] = Fraction(1) if exact else 1.0

    if exact:
        solution = _gauss_jordan(reduced, [rhs])[0]
    else:
        solution = [float(v) for v in linalg.solve(np.array(reduced, dtype=float), np.array(rhs), assume_a="pos")]
    return solution[keep.index(index[a])]


def graph_resistors(graph, skip_edge=None, split_points=()):
    """Resistor list of the graph, optionally without one edge and with edges split at points.

    Returns (nodes, resistors, labels) where labels maps each normalized split point to its node.
    """
    nodes = [('v', v) for v in graph.vertex_ids]
    labels = {}
    cuts = {}
    for point in split_points:
        point = graph.normalize_point(point)
        if isinstance(point, VertexPoint):
            labels[point] = ('v', point.vertex)
        else:
            cuts.setdefault(point.edge, set()).add(point.offset)
            labels[point] = ('p', point.edge, point.offset)

    resistors = []
    for e in graph.edges:
        if e.id == skip_edge:
            continue
        offsets = sorted(cuts.get(e.id, ()))
        chain = [('v', e.ends[0])] + [('p', e.id, s) for s in offsets] + [('v', e.ends[1])]
        positions = [0] + offsets + [e.length]
        nodes.extend(chain[1:-1])
        for k in range(len(chain) - 1):
            resistors.append((chain[k], chain[k + 1], positions[k + 1] - positions[k]))
    return nodes, resistors, labels


def point_resistance(graph, x, y):
    """r(x, y) by subdividing edges at x and y and solving the Laplacian."""
    x, y = graph.normalize_point(x), graph.normalize_point(y)
    if x == y:
        return graph.scalar(0)
    nodes, resistors, labels = graph_resistors(graph, split_points=(x, y))
    return network_resistance(nodes, resistors, labels[x], labels[y])


@lru_cache(maxsize=256)
def vertex_resistance_matrix(graph):
    """Pairwise resistances between vertices, from the grounded Laplacian inverse."""
    exact = graph.backend == 'exact'
    nodes = graph.vertex_ids
    resistors = [(e.ends[0], e.ends[1], e.length) for e in graph.edges]
    L, index = _laplacian(nodes, resistors, exact)
    n = len(nodes)
    zero = Fraction(0) if exact else 0.0

    if n == 1:
        return {nodes[0]: {nodes[0]: zero}}

    reduced = [row[1:] for row in L[1:]]
    if exact:
        identity = [[Fraction(int(i == k)) for i in range(n - 1)] for k in range(n - 1)]
        columns = _gauss_jordan(reduced, identity)
        inverse = [[columns[k][i] for k in range(n - 1)] for i in range(n - 1)]
    else:
        inverse = linalg.inv(np.array(reduced, dtype=float)).tolist()

    def grounded(i, j):
        if i == 0 or j == 0:
            return zero
        return inverse[i - 1][j - 1]

    matrix = {}
    for a in nodes:
        i = index[a]
        matrix[a] = {}
        for b in nodes:
            j = index[b]
            matrix[a][b] = grounded(i, i) + grounded(j, j) - 2 * grounded(i, j) if a != b else zero
    logger.debug("resistance matrix for %d vertices (%s)", n, graph.backend)
    return matrix


def edge_complement_resistance(graph, edge_id):
    """Resistance between the ends of e in Γ − e: 0 for loops, INFINITY for bridges."""
    e = graph.edge(edge_id)
    if e.is_loop:
        return graph.scalar(0)
    if is_bridge(graph, edge_id):
        return INFINITY
    r = vertex_resistance_matrix(graph)[e.ends[0]][e.ends[1]]
    return e.length * r / (e.length - r)


def _quadratic_coefficients(values, length):
    """Coefficients (c0, c1, c2) of the quadratic through t=0, L/2, L."""
    f0, fm, f1 = values
    c0 = f0
    c2 = 2 * (f0 - 2 * fm + f1) / (length * length)
    c1 = (f1 - f0) / length - c2 * length
    return (c0, c1, c2)


@dataclass(frozen=True)
class ProfilePiece:
    start: object
    end: object
    coefficients: tuple

    def __call__(self, t):
        c0, c1, c2 = self.coefficients
        return c0 + c1 * t + c2 * t * t

    def integral(self):
        c0, c1, c2 = self.coefficients
        a, b = self.start, self.end
        return c0 * (b - a) + c1 * (b * b - a * a) / 2 + c2 * (b ** 3 - a ** 3) / 3


@dataclass(frozen=True)
class ResistanceProfile:
    """t -> r(x, y_e(t)) on one edge, as one or two quadratic pieces."""
    edge: str
    base: object
    pieces: tuple

    @property
    def breakpoint(self):
        return self.pieces[0].end if len(self.pieces) == 2 else None

    def __call__(self, t):
        for piece in self.pieces:
            if piece.start <= t <= piece.end:
                return piece(t)
        raise ValueError(f"t={t} outside the edge")

    def integral(self):
        return sum(piece.integral() for piece in self.pieces)


def _complement_network_resistance(graph, edge_id, a, b):
    nodes, resistors, labels = graph_resistors(graph, skip_edge=edge_id, split_points=(a, b))
    return network_resistance(nodes, resistors, labels[graph.normalize_point(a)], labels[graph.normalize_point(b)])


def resistance_profile(graph, x, edge_id):
    """Quadratic profile of r(x, ·) along an edge via star reduction of Γ − e."""
    x = graph.normalize_point(x)
    e = graph.edge(edge_id)
    L = e.length
    p, q = VertexPoint(e.ends[0]), VertexPoint(e.ends[1])
    zero = graph.scalar(0)

    if isinstance(x, EdgePoint) and x.edge == edge_id:
        s = x.offset
        if e.is_loop:
            S = L
        elif is_bridge(graph, edge_id):
            S = None
        else:
            S = L + _complement_network_resistance(graph, edge_id, p, q)
        if S is None:
            left, right = (s, -1, zero), (-s, 1, zero)
        else:
            left = (s * (S - s) / S, (2 * s - S) / S, -1 / S)
            right = (-s * (S + s) / S, (S + 2 * s) / S, -1 / S)
        pieces = (ProfilePiece(zero, s, left), ProfilePiece(s, L, right))
        return ResistanceProfile(edge_id, x, pieces)

    if e.is_loop:
        c = _complement_network_resistance(graph, edge_id, x, p)
        coefficients = (c, 1 + zero, -1 / L)
        return ResistanceProfile(edge_id, x, (ProfilePiece(zero, L, coefficients),))

    r_pq = _complement_network_resistance(graph, edge_id, p, q)
    r_px = _complement_network_resistance(graph, edge_id, p, x)
    r_qx = _complement_network_resistance(graph, edge_id, q, x)

    if r_pq == INFINITY:
        if r_px != INFINITY:
            coefficients = (r_px, 1 + zero, zero)
        else:
            coefficients = (r_qx + L, -1 + zero, zero)
        return ResistanceProfile(edge_id, x, (ProfilePiece(zero, L, coefficients),))

    a = (r_pq + r_px - r_qx) / 2
    b = (r_pq + r_qx - r_px) / 2
    c = (r_px + r_qx - r_pq) / 2
    S = a + b + L
    coefficients = (c + a * (b + L) / S, (b + L - a) / S, -1 / S)
    return ResistanceProfile(edge_id, x, (ProfilePiece(zero, L, coefficients),))


class ResistanceKernel:
    """Exact r(x, y) for arbitrary points from the cached vertex resistance matrix."""

    def __init__(self, graph):
        self.graph = graph
        self.matrix = vertex_resistance_matrix(graph)
        self._complement = {}

    def complement(self, edge_id):
        if edge_id not in self._complement:
            self._complement[edge_id] = edge_complement_resistance(self.graph, edge_id)
        return self._complement[edge_id]

    def _to_point(self, point, other):
        """r(point, other) where ``other`` is not interior to the edge carrying ``point``."""
        if isinstance(point, VertexPoint):
            if isinstance(other, VertexPoint):
                return self.matrix[point.vertex][other.vertex]
            return self._to_point(other, point)
        e = self.graph.edge(point.edge)
        L, s = e.length, point.offset
        p, q = VertexPoint(e.ends[0]), VertexPoint(e.ends[1])
        r_p = self._to_point(other, p) if isinstance(other, EdgePoint) else self.matrix[p.vertex][other.vertex]
        r_q = self._to_point(other, q) if isinstance(other, EdgePoint) else self.matrix[q.vertex][other.vertex]
        r_pq = self.matrix[p.vertex][q.vertex]
        return ((L - s) * r_p + s * r_q) / L + s * (L - s) / L - s * (L - s) * r_pq / (L * L)

    def between(self, x, y):
        x, y = self.graph.normalize_point(x), self.graph.normalize_point(y)
        if x == y:
            return self.graph.scalar(0)
        if isinstance(x, EdgePoint) and isinstance(y, EdgePoint) and x.edge == y.edge:
            e = self.graph.edge(x.edge)
            d = abs(x.offset - y.offset)
            R = self.complement(e.id)
            if R == INFINITY:
                return d
            S = e.length + R
            return d * (S - d) / S
        return self._to_point(x, y)

    def edge_samples(self, x, edge_id):
        """r(x, ·) at the start, midpoint and end of an edge."""
        e = self.graph.edge(edge_id)
        return tuple(self.between(x, EdgePoint(edge_id, t)) for t in (0 * e.length, e.length / 2, e.length))

    def edge_integral(self, x, edge_id):
        """∫_e r(x, y) dy, exact."""
        x = self.graph.normalize_point(x)
        e = self.graph.edge(edge_id)
        L = e.length
        if isinstance(x, EdgePoint) and x.edge == edge_id:
            s = x.offset
            R = self.complement(edge_id)
            if R == INFINITY:
                return (s * s + (L - s) * (L - s)) / 2
            S = L + R

            def side(u):
                return (S * u * u / 2 - u ** 3 / 3) / S

            return side(s) + side(L - s)
        f0, fm, f1 = self.edge_samples(x, edge_id)
        return L * (f0 + 4 * fm + f1) / 6

    def edge_pair_integral(self, first, second):
        """∬_{e1×e2} r(x, y) dx dy, exact."""
        e1, e2 = self.graph.edge(first), self.graph.edge(second)
        if first == second:
            L = e1.length
            R = self.complement(first)
            if R == INFINITY:
                return L ** 3 / 3
            return L ** 3 / 3 - L ** 4 / (6 * (L + R))
        weights = (1, 4, 1)
        total = 0
        for wi, s in zip(weights, (0 * e1.length, e1.length / 2, e1.length)):
            x = EdgePoint(first, s)
            for wj, value in zip(weights, self.edge_samples(x, second)):
                total += wi * wj * value
        return e1.length * e2.length * total / 36

    def profile_coefficients(self, x, edge_id):
        """Quadratic coefficients of t -> r(x, y_e(t)) when x is not interior to e."""
        e = self.graph.edge(edge_id)
        return _quadratic_coefficients(self.edge_samples(x, edge_id), e.length)


@lru_cache(maxsize=256)
def resistance_kernel(graph):
    return ResistanceKernel(graph)
