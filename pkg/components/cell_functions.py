"""Piecewise-polynomial functions on products of graphs and their continuous triple pairing.

A CellFunction lives on Γ1 × Γ2 with physical coordinates (u, v) ∈ [0, ℓ(e1)] × [0, ℓ(e2)] on
each cell e1 × e2, measured from ends[0] of each edge. A cell may carry the main diagonal
v = u, the anti-diagonal u + v = ℓ, or both; each region cut out by them holds one 2-D
polynomial (numpy.polynomial coefficient array, entry [i, j] multiplies u^i v^j).
"""
import logging
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np
from numpy.polynomial import legendre
from numpy.polynomial import polynomial as P
from scipy import linalg

from components.admissible import green_diagonal_against_canonical, green_value, tau
from components.graph_core import EdgePoint, VertexPoint, genus
from components.lattice import LatticeDivisor, ProductComplex, discrete_triple
from utils.errors import GenusZero, HypothesisViolated, InvalidSpec

logger = logging.getLogger(__name__)

MAIN = 'main'
ANTI = 'anti'

REGIONS = {
    frozenset(): ('whole',),
    frozenset({MAIN}): ('lower', 'upper'),
    frozenset({ANTI}): ('below', 'above'),
    frozenset({MAIN, ANTI}): ('bottom', 'right', 'top', 'left'),
}


def region_masks(diagonals, length, u, v):
    """Boolean masks per region for coordinate arrays; boundaries go to one side consistently."""
    lower = v <= u
    below = u + v < length
    if not diagonals:
        return {'whole': np.ones_like(u, dtype=bool)}
    if diagonals == {MAIN}:
        return {'lower': lower, 'upper': ~lower}
    if diagonals == {ANTI}:
        return {'below': below, 'above': ~below}
    return {
        'bottom': lower & below,
        'right': lower & ~below,
        'top': ~lower & ~below,
        'left': ~lower & below,
    }


def region_triangles(diagonals, L1, L2):
    c = (L1 / 2, L2 / 2)
    o, x, y, xy = (0, 0), (L1, 0), (0, L2), (L1, L2)
    if not diagonals:
        return {'whole': [(o, x, xy), (o, xy, y)]}
    if diagonals == {MAIN}:
        return {'lower': [(o, x, xy)], 'upper': [(o, xy, y)]}
    if diagonals == {ANTI}:
        return {'below': [(o, x, y)], 'above': [(x, xy, y)]}
    return {'bottom': [(o, x, c)], 'right': [(x, xy, c)], 'top': [(xy, y, c)], 'left': [(y, o, c)]}


def diagonal_sides(diagonals, diagonal, t, centre):
    """Regions just before and just after crossing ``diagonal`` at parameter t, moving in +u."""
    if diagonal == MAIN:
        if diagonals == {MAIN}:
            return 'upper', 'lower'
        return ('left', 'bottom') if t < centre else ('top', 'right')
    if diagonals == {ANTI}:
        return 'below', 'above'
    return ('left', 'top') if t < centre else ('bottom', 'right')


def diagonal_point(diagonal, t, length):
    return (t, t) if diagonal == MAIN else (t, length - t)


@dataclass(frozen=True)
class Cell:
    first: str
    second: str
    lengths: tuple
    diagonals: frozenset = frozenset()
    pieces: dict = field(default_factory=dict)

    def derivative(self, region, du=0, dv=0):
        c = self.pieces[region]
        if du:
            c = P.polyder(c, du, axis=0)
        if dv:
            c = P.polyder(c, dv, axis=1)
        return c

    def evaluate(self, u, v, du=0, dv=0):
        u = np.asarray(u, dtype=float)
        v = np.asarray(v, dtype=float)
        out = np.zeros(np.broadcast(u, v).shape)
        u, v = np.broadcast_arrays(u, v)
        for region, mask in region_masks(self.diagonals, self.lengths[0], u, v).items():
            if mask.any():
                out[mask] = P.polyval2d(u[mask], v[mask], self.derivative(region, du, dv))
        return out

    def region_value(self, region, u, v, du=0, dv=0):
        return P.polyval2d(u, v, self.derivative(region, du, dv))


def _coefficient_array(coefficients):
    c = np.zeros((3, 3))
    array = np.atleast_2d(np.asarray(coefficients, dtype=float))
    rows, cols = array.shape
    if rows > 3 or cols > 3:
        c = np.zeros((max(rows, 3), max(cols, 3)))
    c[:rows, :cols] = array
    return c


class CellFunction:
    """Continuous, cellwise piecewise-polynomial function on a product of two graphs."""

    def __init__(self, first, second, cells, name=''):
        self.first = first
        self.second = second
        self.cells = dict(cells)
        self.name = name
        missing = {(a.id, b.id) for a in first.edges for b in second.edges} - set(self.cells)
        if missing:
            raise InvalidSpec(f"cell function misses cells {sorted(missing)}")

    def __repr__(self):
        return f"CellFunction({self.name or '<anon>'}, {len(self.cells)} cells)"

    def cell(self, key):
        return self.cells[key]

    def __call__(self, e1, u, e2, v):
        return float(self.cells[(e1, e2)].evaluate(u, v))

    @classmethod
    def from_polynomial(cls, first, second, coefficients, name='polynomial'):
        """The same polynomial in (u, v) on every cell."""
        c = _coefficient_array(coefficients)
        cells = {
            (a.id, b.id): Cell(a.id, b.id, (float(a.length), float(b.length)), frozenset(), {'whole': c})
            for a in first.edges for b in second.edges
        }
        return cls(first, second, cells, name=name)

    @classmethod
    def from_pieces(cls, first, second, pieces, name=''):
        """``pieces`` maps (e1, e2) to (diagonals, {region: coefficients})."""
        cells = {}
        for a in first.edges:
            for b in second.edges:
                diagonals, regions = pieces.get((a.id, b.id), ((), {'whole': [[0.0]]}))
                diagonals = frozenset(diagonals)
                expected = set(REGIONS[diagonals])
                if set(regions) != expected:
                    raise InvalidSpec(f"cell ({a.id}, {b.id}) needs regions {sorted(expected)}")
                cells[(a.id, b.id)] = Cell(
                    a.id, b.id, (float(a.length), float(b.length)), diagonals,
                    {r: _coefficient_array(c) for r, c in regions.items()},
                )
        return cls(first, second, cells, name=name)

    @classmethod
    def from_divisor(cls, divisor, name='divisor'):
        """The triangulation-linear function of a level-1 lattice divisor on square cells."""
        complex_ = divisor.complex
        if complex_.level != 1:
            raise InvalidSpec('from_divisor expects a level-1 divisor')
        cells = {}
        for cell in complex_.cells:
            a, b = complex_.first.edge(cell[0]), complex_.second.edge(cell[1])
            L = float(a.length)
            if abs(L - float(b.length)) > 1e-12:
                raise HypothesisViolated(f"cell {cell} is not square; its triangulation has no ±1 diagonals")
            corners, centers = divisor.cell_arrays(cell)
            c1, c2 = float(corners[0][0]), float(corners[1][0])
            c3, c4 = float(corners[0][1]), float(corners[1][1])
            m = float(centers[0][0])
            pieces = {
                'bottom': [[c1, (2 * m - c1 - c2) / L], [(c2 - c1) / L, 0.0]],
                'right': [[2 * m - c4, (c4 - c2) / L], [(c2 + c4 - 2 * m) / L, 0.0]],
                'top': [[2 * m - c4, (c3 + c4 - 2 * m) / L], [(c4 - c3) / L, 0.0]],
                'left': [[c1, (c3 - c1) / L], [(2 * m - c1 - c3) / L, 0.0]],
            }
            cells[cell] = Cell(cell[0], cell[1], (L, L), frozenset({MAIN, ANTI}),
                               {r: _coefficient_array(c) for r, c in pieces.items()})
        return cls(complex_.first, complex_.second, cells, name=name)

    def check_hypotheses(self, tolerance=1e-8, samples=5):
        """Continuity across cell boundaries and diagonals; diagonals only on square cells."""
        ts = np.linspace(0.0, 1.0, samples)
        for key, cell in self.cells.items():
            L1, L2 = cell.lengths
            if cell.diagonals and abs(L1 - L2) > tolerance:
                raise HypothesisViolated(f"cell {key} carries diagonals but is not square")
            for diagonal in cell.diagonals:
                centre = L1 / 2
                for t in ts[1:-1] * L1:
                    if abs(t - centre) < 1e-12:
                        continue
                    before, after = diagonal_sides(cell.diagonals, diagonal, t, centre)
                    u, v = diagonal_point(diagonal, t, L1)
                    jump = cell.region_value(before, u, v) - cell.region_value(after, u, v)
                    if abs(jump) > tolerance:
                        raise HypothesisViolated(f"cell {key} jumps by {jump} across the {diagonal} diagonal")
        self._check_vertex_lines(self.first, self.second, ts, tolerance, swap=False)
        self._check_vertex_lines(self.second, self.first, ts, tolerance, swap=True)

    def _check_vertex_lines(self, graph, other, ts, tolerance, swap):
        for vertex in graph.vertices:
            ends = graph.incident_ends(vertex.id)
            for f in other.edges:
                values = []
                for e, end in ends:
                    key = (f.id, e.id) if swap else (e.id, f.id)
                    cell = self.cells[key]
                    at = 0.0 if end == 0 else float(e.length)
                    along = ts * float(f.length)
                    if swap:
                        values.append(cell.evaluate(along, np.full_like(along, at)))
                    else:
                        values.append(cell.evaluate(np.full_like(along, at), along))
                for other_values in values[1:]:
                    gap = np.max(np.abs(other_values - values[0]))
                    if gap > tolerance:
                        raise HypothesisViolated(
                            f"discontinuous along vertex {vertex.id} × edge {f.id} (gap {gap})")

    def to_divisor(self, level):
        """Level-n lattice divisor with coefficients n·f at the lattice points."""
        complex_ = ProductComplex(self.first, self.second, level)
        n = level
        coefficients = {}
        grid = np.arange(n + 1) / n
        mids = (np.arange(n) + 0.5) / n
        for key in complex_.cells:
            cell = self.cells[key]
            L1, L2 = cell.lengths
            U, V = np.meshgrid(grid * L1, grid * L2, indexing='ij')
            corner_values = cell.evaluate(U, V)
            for i, row in enumerate(complex_.corner_grid(key)):
                for j, corner in enumerate(row):
                    coefficients[corner] = n * float(corner_values[i, j])
            U, V = np.meshgrid(mids * L1, mids * L2, indexing='ij')
            center_values = cell.evaluate(U, V)
            for i, row in enumerate(complex_.center_grid(key)):
                for j, center in enumerate(row):
                    coefficients[center] = n * float(center_values[i, j])
        return LatticeDivisor(complex_, coefficients)


def _point(graph, edge, offset):
    return graph.normalize_point(EdgePoint(edge.id, offset))


def _fit_biquadratic(samples, L1, L2):
    u = np.array([0.0, L1 / 2, L1])
    v = np.array([0.0, L2 / 2, L2])
    U, V = np.meshgrid(u, v, indexing='ij')
    vander = P.polyvander2d(U.ravel(), V.ravel(), [2, 2])
    coefficients = linalg.solve(vander, np.asarray(samples, dtype=float).ravel())
    return coefficients.reshape(3, 3)


def _fit_triangle_quadratic(nodes, values):
    """Total-degree-2 polynomial through six nodes of a triangle."""
    rows = [[1.0, u, v, u * u, u * v, v * v] for u, v in nodes]
    a = linalg.solve(np.array(rows), np.asarray(values, dtype=float))
    c = np.zeros((3, 3))
    c[0, 0], c[1, 0], c[0, 1], c[2, 0], c[1, 1], c[0, 2] = a
    return c


def _require_green_graph(graph):
    if genus(graph) < 1:
        raise GenusZero(f"graph {graph.name or '<anon>'} has genus 0")
    if any(e.is_loop for e in graph.edges):
        raise InvalidSpec('subdivide loops before building functions on the product')


def green_product_function(graph):
    """G(x, y) on Γ × Γ: biquadratic off the diagonal cells, two quadratics on each e × e."""
    _require_green_graph(graph)
    cells = {}
    for a in graph.edges:
        for b in graph.edges:
            L1, L2 = a.length, b.length
            if a.id != b.id:
                samples = [[green_value(graph, _point(graph, a, s), _point(graph, b, t))
                            for t in (0 * L2, L2 / 2, L2)] for s in (0 * L1, L1 / 2, L1)]
                cell = Cell(a.id, b.id, (float(L1), float(L2)), frozenset(),
                            {'whole': _fit_biquadratic(samples, float(L1), float(L2))})
            else:
                L = L1
                lower_nodes = [(0 * L, 0 * L), (L / 2, 0 * L), (L, 0 * L), (L / 2, L / 2), (L, L / 2), (L, L)]
                upper_nodes = [(u, w) for w, u in lower_nodes]
                pieces = {}
                for region, nodes in (('lower', lower_nodes), ('upper', upper_nodes)):
                    values = [green_value(graph, _point(graph, a, s), _point(graph, a, t)) for s, t in nodes]
                    pieces[region] = _fit_triangle_quadratic([(float(s), float(t)) for s, t in nodes], values)
                cell = Cell(a.id, a.id, (float(L), float(L)), frozenset({MAIN}), pieces)
            cells[(a.id, b.id)] = cell
    logger.debug("green function on %s × itself: %d cells", graph.name or '<anon>', len(cells))
    return CellFunction(graph, graph, cells, name='G')


def green_point_function(graph, vertex_id, side):
    """p1*G_e (x, y) = G(x, e) for side 1, p2*G_e (x, y) = G(y, e) for side 2."""
    _require_green_graph(graph)
    if side not in (1, 2):
        raise InvalidSpec('side must be 1 or 2')
    if not graph.has_vertex(vertex_id):
        raise InvalidSpec(f"pullbacks of G_e need e to be a vertex; {vertex_id!r} is not one")
    anchor = VertexPoint(vertex_id)
    profiles = {}
    for e in graph.edges:
        L = e.length
        values = [float(green_value(graph, _point(graph, e, s), anchor)) for s in (0 * L, L / 2, L)]
        Lf = float(L)
        vander = P.polyvander(np.array([0.0, Lf / 2, Lf]), 2)
        profiles[e.id] = linalg.solve(vander, np.array(values))
    cells = {}
    for a in graph.edges:
        for b in graph.edges:
            c = np.zeros((3, 3))
            if side == 1:
                c[:, 0] = profiles[a.id]
            else:
                c[0, :] = profiles[b.id]
            cells[(a.id, b.id)] = Cell(a.id, b.id, (float(a.length), float(b.length)), frozenset(), {'whole': c})
    return CellFunction(graph, graph, cells, name=f"p{side}*G_{vertex_id}")


def _triangle_rule(triangle, order):
    """Gauss–Legendre points and weights on a triangle via the collapsed-square map."""
    x, w = legendre.leggauss(order)
    x, w = (x + 1) / 2, w / 2
    (x0, y0), (x1, y1), (x2, y2) = [(float(a), float(b)) for a, b in triangle]
    xi, eta = np.meshgrid(x, x, indexing='ij')
    wi, wj = np.meshgrid(w, w, indexing='ij')
    u = x0 + xi * (x1 - x0) + xi * eta * (x2 - x1)
    v = y0 + xi * (y1 - y0) + xi * eta * (y2 - y1)
    det = abs((x1 - x0) * (y2 - y1) - (x2 - x1) * (y1 - y0))
    return u.ravel(), v.ravel(), (wi * wj * xi * det).ravel()


def _segment_rule(a, b, order):
    x, w = legendre.leggauss(order)
    return (b - a) * (x + 1) / 2 + a, w * (b - a) / 2


def _same_space(functions):
    first, second = functions[0].first, functions[0].second
    for f in functions[1:]:
        if f.first != first or f.second != second:
            raise InvalidSpec('functions live on different products')
    return first, second


def _refinement(functions, key):
    diagonals = frozenset().union(*(f.cells[key].diagonals for f in functions))
    return diagonals


def _smooth_part(fi, fj, fk, key, diagonals, order):
    L1, L2 = fi.cells[key].lengths
    total = 0.0
    for triangles in region_triangles(diagonals, L1, L2).values():
        for triangle in triangles:
            u, v, w = _triangle_rule(triangle, order)
            integrand = (-fi.cells[key].evaluate(u, v, du=2)
                         * fj.cells[key].evaluate(u, v, dv=1)
                         * fk.cells[key].evaluate(u, v, dv=1))
            total += float(np.dot(w, integrand))
    return total


def _vertex_line_part(fi, fj, fk, order):
    """Atoms of Δ_x f_i on the lines {w} × e2 against f_j,y f_k,y."""
    first, second = fi.first, fi.second
    total = 0.0
    for vertex in first.vertices:
        ends = first.incident_ends(vertex.id)
        for f in second.edges:
            v, w = _segment_rule(0.0, float(f.length), order)
            atom = np.zeros_like(v)
            for e, end in ends:
                at = np.full_like(v, 0.0 if end == 0 else float(e.length))
                slope = fi.cells[(e.id, f.id)].evaluate(at, v, du=1)
                atom -= slope if end == 0 else -slope
            e, end = ends[0]
            at = np.full_like(v, 0.0 if end == 0 else float(e.length))
            fj_y = fj.cells[(e.id, f.id)].evaluate(at, v, dv=1)
            fk_y = fk.cells[(e.id, f.id)].evaluate(at, v, dv=1)
            total += float(np.dot(w, atom * fj_y * fk_y))
    return total


def _diagonal_data(function, key, diagonal, t, length):
    """(δ, averaged f_y) of one function at parameter t on a diagonal of a cell."""
    cell = function.cells[key]
    u, v = diagonal_point(diagonal, t, length)
    if diagonal not in cell.diagonals:
        return 0.0, float(cell.evaluate(u, v, dv=1))
    before, after = diagonal_sides(cell.diagonals, diagonal, t, length / 2)
    jump = cell.region_value(before, u, v, du=1) - cell.region_value(after, u, v, du=1)
    mean_y = (cell.region_value(before, u, v, dv=1) + cell.region_value(after, u, v, dv=1)) / 2
    return float(jump), float(mean_y)


def _diagonal_parts(functions, key, diagonals, order):
    """(Σ_cyc ∫ δ_i ȳ_j ȳ_k, ∫ δ_1 δ_2 δ_3) summed over the diagonals of one cell."""
    L = functions[0].cells[key].lengths[0]
    cyclic, cubic = 0.0, 0.0
    for diagonal in diagonals:
        for a, b in ((0.0, L / 2), (L / 2, L)):
            ts, ws = _segment_rule(a, b, order)
            for t, w in zip(ts, ws):
                data = [_diagonal_data(f, key, diagonal, t, L) for f in functions]
                (d1, y1), (d2, y2), (d3, y3) = data
                cyclic += w * (d1 * y2 * y3 + d2 * y3 * y1 + d3 * y1 * y2)
                cubic += w * d1 * d2 * d3
    return cyclic, cubic


def continuous_triple(f1, f2, f3, order=5, tolerance=1e-8):
    """(f1, f2, f3) = Σ_cyc ∫ Δ_x f_i · f_j,y f_k,y + ¼ ∫_diagonals δ_1 δ_2 δ_3 dx."""
    functions = (f1, f2, f3)
    _same_space(functions)
    for f in functions:
        f.check_hypotheses(tolerance)

    total = 0.0
    for key in f1.cells:
        diagonals = _refinement(functions, key)
        for i, j, k in ((0, 1, 2), (1, 2, 0), (2, 0, 1)):
            total += _smooth_part(functions[i], functions[j], functions[k], key, diagonals, order)
        cyclic, cubic = _diagonal_parts(functions, key, diagonals, order)
        total += cyclic + cubic / 4
    for i, j, k in ((0, 1, 2), (1, 2, 0), (2, 0, 1)):
        total += _vertex_line_part(functions[i], functions[j], functions[k], order)
    return total


def smooth_triple(f1, f2, f3, order=5):
    """Σ over the six orderings (a, b, c) of ∬ f_a,x f_b,y f_c,xy; valid for smooth functions."""
    functions = (f1, f2, f3)
    _same_space(functions)
    orderings = ((0, 1, 2), (0, 2, 1), (1, 0, 2), (1, 2, 0), (2, 0, 1), (2, 1, 0))
    total = 0.0
    for key in f1.cells:
        diagonals = _refinement(functions, key)
        L1, L2 = f1.cells[key].lengths
        for triangles in region_triangles(diagonals, L1, L2).values():
            for triangle in triangles:
                u, v, w = _triangle_rule(triangle, order)
                dx = [f.cells[key].evaluate(u, v, du=1) for f in functions]
                dy = [f.cells[key].evaluate(u, v, dv=1) for f in functions]
                dxy = [f.cells[key].evaluate(u, v, du=1, dv=1) for f in functions]
                for a, b, c in orderings:
                    total += float(np.dot(w, dx[a] * dy[b] * dxy[c]))
    return total


def diagonal_green_integrals(graph):
    """(∫ G(x, x) dμ, ∫ G(x, x) δ_K) with ∫ G(x, x) dμ = τ."""
    return tau(graph), green_diagonal_against_canonical(graph)


def green_identity_targets(graph, vertex_id):
    """Exact values of the three Green triples, e a vertex.

    (G, G, p1*G_e) = G(e, e) − τ and (G, p1*G_e, p2*G_e) = G(e, e); (G, G, G) is what remains
    after moving ∫ G(x, x)(δ_K − 4(g−1)dμ) across, whose sum with it is −φ.
    """
    g = genus(graph)
    t, green_k = diagonal_green_integrals(graph)
    anchor = VertexPoint(vertex_id)
    gee = green_value(graph, anchor, anchor)
    length = graph.total_length
    three_quarters, three_halves = graph.scalar(Fraction(3, 4)), graph.scalar(Fraction(3, 2))
    return {
        '(G,G,p1*G_e)': gee - t,
        '(G,p1*G_e,p2*G_e)': gee,
        '(G,G,G)': length / 4 - three_quarters * green_k + three_halves * (g - 3) * t,
    }


def green_identity_functions(graph, vertex_id):
    G = green_product_function(graph)
    first = green_point_function(graph, vertex_id, 1)
    second = green_point_function(graph, vertex_id, 2)
    return {
        '(G,G,p1*G_e)': (G, G, first),
        '(G,p1*G_e,p2*G_e)': (G, first, second),
        '(G,G,G)': (G, G, G),
    }


def green_identity_report(graph, vertex_id, level=8, order=5):
    """Continuous and level-n discrete Green triples against their exact values."""
    targets = green_identity_targets(graph, vertex_id)
    rows = []
    for label, functions in green_identity_functions(graph, vertex_id).items():
        continuous = continuous_triple(*functions, order=order)
        discrete = float(discrete_triple(*(f.to_divisor(level) for f in functions)))
        expected = float(targets[label])
        rows.append({
            'identity': label,
            'level': level,
            'expected': expected,
            'continuous': continuous,
            'discrete': discrete,
            'continuous_error': abs(continuous - expected),
            'discrete_error': abs(discrete - expected),
        })
        logger.info("%s on %s: continuous %.10g, discrete %.10g, expected %.10g",
                    label, graph.name or '<anon>', continuous, discrete, expected)
    return rows
