"""Product reduction complexes, lattice divisors and the discrete triple pairing.

Cells are products of edges e1 × e2, each edge normalized to parameter length 1 and cut into
``level`` equal pieces. Lattice corners are keyed by ('c', x_node, y_node) where a node is
('v', vertex) or ('p', edge, k) for the k-th interior subdivision point; subcell centers are
keyed by ('m', e1, e2, i, j). A LatticeDivisor stores raw divisor coefficients: component
multiplicities a_C at corners and b_E (half the exceptional multiplicity) at centers.
"""
import logging
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from utils.errors import InvalidSpec, LevelMismatch, NotTriangulationLinear
from utils.scalars import close

logger = logging.getLogger(__name__)

# Corner order P1=(0,0), P2=(1,0), P3=(0,1), P4=(1,1); adjacency is the 4-cycle P1-P2-P4-P3.
ADJACENT_PAIRS = ((0, 1), (0, 2), (1, 3), (2, 3))


def local_triple_kernel(u, v, w):
    """Symmetric trilinear form on centered corner vectors of one cell.

    T(Pi, Pi, Pi) = 2, T(Pi, Pi, Pj) = -1 for adjacent corners, 0 otherwise. Works on
    scalars or elementwise on numpy arrays.
    """
    total = 2 * sum(u[i] * v[i] * w[i] for i in range(4))
    for a, b in ADJACENT_PAIRS:
        for i, j in ((a, b), (b, a)):
            total = total - (u[i] * v[i] * w[j] + u[i] * v[j] * w[i] + u[j] * v[i] * w[i])
    return total


def edge_nodes(graph, edge_id, level):
    """Lattice nodes along an edge from ends[0] to ends[1]."""
    e = graph.edge(edge_id)
    inner = [('p', edge_id, k) for k in range(1, level)]
    return [('v', e.ends[0])] + inner + [('v', e.ends[1])]


@dataclass(frozen=True)
class ProductComplex:
    first: object
    second: object
    level: int = 1

    def __post_init__(self):
        if self.level < 1:
            raise InvalidSpec('level must be >= 1')
        for graph in (self.first, self.second):
            loops = [e.id for e in graph.edges if e.is_loop]
            if loops:
                raise InvalidSpec(f"product complexes need loop-free factors; loops: {loops}")
            if not graph.edges:
                raise InvalidSpec('product complex factors need at least one edge')

    def at_level(self, level):
        return ProductComplex(self.first, self.second, level)

    @property
    def cells(self):
        return [(e1.id, e2.id) for e1 in self.first.edges for e2 in self.second.edges]

    def corner_grid(self, cell):
        """(level+1) x (level+1) nested list of corner keys; index [i][j] with i along x."""
        xs = edge_nodes(self.first, cell[0], self.level)
        ys = edge_nodes(self.second, cell[1], self.level)
        return [[('c', x, y) for y in ys] for x in xs]

    def center_grid(self, cell):
        n = self.level
        return [[('m', cell[0], cell[1], i, j) for j in range(n)] for i in range(n)]

    def lattice_points(self):
        """Every corner and center key with one (cell, s, t) location in normalized coordinates."""
        n = self.level
        seen = {}
        for cell in self.cells:
            corners = self.corner_grid(cell)
            for i in range(n + 1):
                for j in range(n + 1):
                    seen.setdefault(corners[i][j], (cell, Fraction(i, n), Fraction(j, n)))
            centers = self.center_grid(cell)
            for i in range(n):
                for j in range(n):
                    seen[centers[i][j]] = (cell, Fraction(2 * i + 1, 2 * n), Fraction(2 * j + 1, 2 * n))
        return seen


@dataclass(frozen=True)
class LatticeDivisor:
    complex: ProductComplex
    coefficients: dict

    def coefficient(self, key):
        return self.coefficients.get(key, 0)

    def cell_arrays(self, cell):
        """Corner values ((n+1)x(n+1)) and center values (n x n) as numpy object arrays."""
        corners = np.array(
            [[self.coefficient(k) for k in row] for row in self.complex.corner_grid(cell)], dtype=object)
        centers = np.array(
            [[self.coefficient(k) for k in row] for row in self.complex.center_grid(cell)], dtype=object)
        return corners, centers


def divisor_from_values(complex_, corners=None, centers=None):
    """Level-1 divisor from {(vertex1, vertex2): a_C} and {(edge1, edge2): b_E}."""
    if complex_.level != 1:
        raise InvalidSpec('divisor_from_values builds level-1 divisors')
    coefficients = {}
    for (x, y), value in (corners or {}).items():
        if not complex_.first.has_vertex(x) or not complex_.second.has_vertex(y):
            raise InvalidSpec(f"unknown corner ({x}, {y})")
        coefficients[('c', ('v', x), ('v', y))] = value
    for (e1, e2), value in (centers or {}).items():
        if not complex_.first.has_edge(e1) or not complex_.second.has_edge(e2):
            raise InvalidSpec(f"unknown cell ({e1}, {e2})")
        coefficients[('m', e1, e2, 0, 0)] = value
    return LatticeDivisor(complex_, coefficients)


def pl_value(c1, c2, c3, c4, m, a, b):
    """Linear interpolation on the four triangles of a unit cell through its center."""
    if b <= a:
        if a + b <= 1:
            return c1 + a * (c2 - c1) + b * (2 * m - c1 - c2)
        return c2 + b * (c4 - c2) + (1 - a) * (2 * m - c2 - c4)
    if a + b >= 1:
        return c3 + a * (c4 - c3) + (1 - b) * (2 * m - c3 - c4)
    return c1 + b * (c3 - c1) + a * (2 * m - c1 - c3)


class PLFunction:
    """The triangulation-linear function of a lattice divisor, in normalized coordinates."""

    def __init__(self, divisor):
        self.divisor = divisor
        self.complex = divisor.complex

    def __call__(self, cell, s, t):
        n = self.complex.level
        i = min(int(s * n), n - 1)
        j = min(int(t * n), n - 1)
        corners = self.complex.corner_grid(cell)
        d = self.divisor
        c1, c2 = d.coefficient(corners[i][j]), d.coefficient(corners[i + 1][j])
        c3, c4 = d.coefficient(corners[i][j + 1]), d.coefficient(corners[i + 1][j + 1])
        m = d.coefficient(('m', cell[0], cell[1], i, j))
        value = pl_value(c1, c2, c3, c4, m, s * n - i, t * n - j)
        return value / n


def divisor_to_function(divisor):
    """f with f = a_C / n at corners and b_E / n at centers, linear on every triangle."""
    return PLFunction(divisor)


# The four triangles of a subcell, as corner, corner, center in normalized coordinates.
_TRIANGLES = (
    ((0, 0), (1, 0)), ((1, 0), (1, 1)), ((1, 1), (0, 1)), ((0, 1), (0, 0)),
)


def _cubic_nodes():
    """Edge-third points and centroids of the subcell triangles.

    With the triangle vertices they are the cubic Lagrange nodes, so a function that is cubic on
    each triangle and agrees with its linear interpolant there is linear.
    """
    third = Fraction(1, 3)
    center = (Fraction(1, 2), Fraction(1, 2))
    nodes = {}
    for p, q in _TRIANGLES:
        p, q = tuple(map(Fraction, p)), tuple(map(Fraction, q))
        for a, b in ((p, q), (q, center), (center, p)):
            for w in (third, 2 * third):
                nodes[(a[0] + w * (b[0] - a[0]), a[1] + w * (b[1] - a[1]))] = None
        nodes[((p[0] + q[0] + center[0]) * third, (p[1] + q[1] + center[1]) * third)] = None
    return list(nodes)


def function_to_divisor(complex_, f, check=True, tolerance=1e-10):
    """Divisor with coefficients n·f at lattice points; f(cell, s, t) in normalized coordinates.

    With ``check`` the function must be linear on every triangle of the level-n triangulation;
    piecewise cubics are decided exactly.
    """
    n = complex_.level
    coefficients = {key: n * f(cell, s, t) for key, (cell, s, t) in complex_.lattice_points().items()}
    divisor = LatticeDivisor(complex_, coefficients)
    if check:
        g = PLFunction(divisor)
        nodes = _cubic_nodes()
        for cell in complex_.cells:
            for i in range(n):
                for j in range(n):
                    for a, b in nodes:
                        s, t = (i + Fraction(a)) / n, (j + Fraction(b)) / n
                        expected, actual = f(cell, s, t), g(cell, s, t)
                        if not close(expected, actual, tolerance):
                            raise NotTriangulationLinear(
                                f"cell {cell} subcell ({i},{j}): f={expected} but interpolation gives {actual}")
    return divisor


def sample_divisor(complex_, f):
    """Level-n divisor of a (not necessarily linear) function sampled on the lattice."""
    return function_to_divisor(complex_, f, check=False)


def pullback_subdivide(divisor, level):
    """Base change of a level-1 divisor to level n: coefficients n·f on the finer lattice."""
    if divisor.complex.level != 1:
        raise InvalidSpec('pullback_subdivide expects a level-1 divisor')
    f = PLFunction(divisor)
    return function_to_divisor(divisor.complex.at_level(level), f, check=False)


def discrete_triple(first, second, third):
    """Σ_cells T(u, v, w) / n over the raw centered corner vectors of each subcell.

    Raw coefficients are n·f, so this equals n² Σ T on the centered values of f itself.
    """
    complexes = {id(d.complex) for d in (first, second, third)}
    levels = {d.complex.level for d in (first, second, third)}
    if len(levels) != 1:
        raise LevelMismatch(f"divisors live on levels {sorted(levels)}")
    if len(complexes) != 1 and len({(d.complex.first, d.complex.second) for d in (first, second, third)}) != 1:
        raise LevelMismatch('divisors live on different product complexes')

    n = first.complex.level
    total = 0
    for cell in first.complex.cells:
        vectors = []
        for d in (first, second, third):
            corners, centers = d.cell_arrays(cell)
            vectors.append([
                corners[:-1, :-1] - centers,
                corners[1:, :-1] - centers,
                corners[:-1, 1:] - centers,
                corners[1:, 1:] - centers,
            ])
        values = local_triple_kernel(*vectors)
        total = total + sum(values.ravel().tolist(), 0)
    return total / n
