from fractions import Fraction
from itertools import combinations_with_replacement

import pytest
from hypothesis import given, settings, strategies as st

from components.lattice import (
    ProductComplex, divisor_from_values, divisor_to_function, discrete_triple, function_to_divisor,
    local_triple_kernel, pullback_subdivide, sample_divisor,
)
from utils.errors import InvalidSpec, LevelMismatch, NotTriangulationLinear

F = Fraction
UNIT = [(1, 0, 0, 0), (0, 1, 0, 0), (0, 0, 1, 0), (0, 0, 0, 1)]


@pytest.fixture(scope="module")
def path_by_segment(path_graph, segment):
    return ProductComplex(path_graph, segment, 1)


@pytest.fixture(scope="module")
def exceptional(unit_square):
    return divisor_from_values(unit_square, centers={('e', 'e'): F(1, 2)})


def test_kernel_table():
    p1, p2, p3, p4 = UNIT
    assert local_triple_kernel(p1, p1, p1) == 2
    assert local_triple_kernel(p1, p1, p2) == -1
    assert local_triple_kernel(p2, p4, p4) == -1
    assert local_triple_kernel(p1, p1, p4) == 0
    assert local_triple_kernel(p1, p2, p3) == 0


def test_kernel_is_symmetric():
    u, v, w = (1, -2, 0, 3), (2, 1, 1, -1), (0, 1, -3, 2)
    values = {local_triple_kernel(*p) for p in [(u, v, w), (v, u, w), (w, v, u), (u, w, v)]}
    assert len(values) == 1


def test_exceptional_cube(exceptional):
    assert discrete_triple(exceptional, exceptional, exceptional) == 2


def test_exceptional_against_corner(unit_square, exceptional):
    corner = divisor_from_values(unit_square, corners={('a', 'a'): 1})
    assert discrete_triple(exceptional, exceptional, corner) == -1


def test_corner_cube_counts_cells(path_by_segment):
    interior = divisor_from_values(path_by_segment, corners={('b', 'a'): 1})
    end = divisor_from_values(path_by_segment, corners={('a', 'a'): 1})
    assert discrete_triple(interior, interior, interior) == 4
    assert discrete_triple(end, end, end) == 2


def test_adjacent_corners(path_by_segment):
    first = divisor_from_values(path_by_segment, corners={('b', 'a'): 1})
    second = divisor_from_values(path_by_segment, corners={('b', 'b'): 1})
    assert discrete_triple(first, first, second) == -2
    far = divisor_from_values(path_by_segment, corners={('c', 'b'): 1})
    assert discrete_triple(first, first, far) == 0


@pytest.mark.parametrize('level', [1, 2, 3, 4])
def test_pullback_preserves_pairing(exceptional, unit_square, level):
    corner = divisor_from_values(unit_square, corners={('a', 'b'): 2, ('b', 'b'): -1})
    e, c = pullback_subdivide(exceptional, level), pullback_subdivide(corner, level)
    assert discrete_triple(e, e, e) == 2
    assert discrete_triple(e, c, c) == discrete_triple(exceptional, corner, corner)


def test_function_divisor_round_trip(unit_square):
    def linear(cell, s, t):
        return s + 2 * t

    complex_ = unit_square.at_level(2)
    divisor = function_to_divisor(complex_, linear)
    assert divisor.coefficient(('m', 'e', 'e', 1, 0)) == 2 * (F(3, 4) + F(1, 2))
    f = divisor_to_function(divisor)
    for s, t in [(F(1, 3), F(1, 5)), (F(7, 8), F(1, 2)), (1, 1)]:
        assert f(('e', 'e'), s, t) == linear(None, s, t)


def test_product_function_is_not_linear(unit_square):
    with pytest.raises(NotTriangulationLinear):
        function_to_divisor(unit_square, lambda cell, s, t: s * t)
    # sampling does not check
    assert sample_divisor(unit_square, lambda cell, s, t: s * t).coefficient(('m', 'e', 'e', 0, 0)) == F(1, 4)


def test_levels_must_match(exceptional):
    finer = pullback_subdivide(exceptional, 2)
    with pytest.raises(LevelMismatch):
        discrete_triple(exceptional, exceptional, finer)
    with pytest.raises(InvalidSpec):
        pullback_subdivide(finer, 4)


def test_loops_are_rejected(dumbbell, segment):
    with pytest.raises(InvalidSpec):
        ProductComplex(dumbbell, segment)
    with pytest.raises(InvalidSpec):
        ProductComplex(segment, segment, 0)


def test_unknown_corner(unit_square):
    with pytest.raises(InvalidSpec):
        divisor_from_values(unit_square, corners={('a', 'z'): 1})


def test_lattice_points_cover_shared_corners(path_by_segment):
    points = path_by_segment.at_level(2).lattice_points()
    corners = [k for k in points if k[0] == 'c']
    centers = [k for k in points if k[0] == 'm']
    # 5 x-nodes along the path, 3 y-nodes along the segment
    assert len(corners) == 15
    assert len(centers) == 8


values = st.integers(min_value=-3, max_value=3)


@settings(max_examples=30, deadline=None)
@given(st.lists(values, min_size=5, max_size=5), st.lists(values, min_size=5, max_size=5))
def test_pairing_is_symmetric(unit_square, first, second):
    def build(vals):
        corners = dict(zip([('a', 'a'), ('a', 'b'), ('b', 'a'), ('b', 'b')], vals[:4]))
        return divisor_from_values(unit_square, corners, {('e', 'e'): vals[4]})

    x, y = build(first), build(second)
    assert discrete_triple(x, x, y) == discrete_triple(y, x, x) == discrete_triple(x, y, x)


def test_two_components_through_a_point_meet_the_exceptional_once(unit_square, exceptional):
    p1, _, p3, _ = UNIT
    assert local_triple_kernel(p1, p3, (-F(1, 2),) * 4) == 1
    bottom = divisor_from_values(unit_square, corners={('a', 'a'): 1})
    side = divisor_from_values(unit_square, corners={('a', 'b'): 1})
    assert discrete_triple(bottom, side, exceptional) == 1
    assert discrete_triple(side, exceptional, bottom) == 1


@pytest.fixture(scope="module")
def four_cells(path_graph):
    return ProductComplex(path_graph, path_graph, 1)


def _basis(complex_):
    vertices = [v.id for v in complex_.first.vertices]
    basis = [divisor_from_values(complex_, corners={(x, y): 1}) for x in vertices for y in vertices]
    basis += [divisor_from_values(complex_, centers={cell: 1}) for cell in complex_.cells]
    return basis


@pytest.mark.parametrize('level', [2, 3])
def test_pairing_is_invariant_under_subdivision_on_four_cells(four_cells, level):
    basis = _basis(four_cells)
    assert len(basis) == 13
    finer = [pullback_subdivide(d, level) for d in basis]
    for i, j, k in combinations_with_replacement(range(len(basis)), 3):
        coarse = discrete_triple(basis[i], basis[j], basis[k])
        assert discrete_triple(finer[i], finer[j], finer[k]) == coarse, (i, j, k)


def test_cubic_bubble_is_not_linear(unit_square):
    # vanishes on the edges of the triangle (0,0), (1,0), center; peaks at its centroid
    def bubble(cell, s, t):
        if t <= s and s + t <= 1:
            return t * (s - t) * (1 - s - t)
        return 0

    assert bubble(None, F(1, 2), F(1, 6)) == F(1, 54)
    with pytest.raises(NotTriangulationLinear):
        function_to_divisor(unit_square, bubble)
    with pytest.raises(NotTriangulationLinear):
        function_to_divisor(unit_square.at_level(2), lambda cell, s, t: bubble(cell, 2 * s % 1, 2 * t % 1))
