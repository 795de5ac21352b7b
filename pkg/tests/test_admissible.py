from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from components.admissible import (
    admissible_measure, consistency_checks, epsilon_invariant, green_diagonal, green_row_integral,
    green_value, invariant_bundle, lambda_from_phi, potential, tau,
)
from components.conjectures import generate_family, parse_family_spec
from components.graph_core import EdgePoint, PolarizedMetrizedGraph, Vertex, VertexPoint
from components.resistance import resistance_kernel, vertex_resistance_matrix
from utils.errors import GenusZero
from utils.graph_io import parse_graph

F = Fraction


def test_dumbbell_invariants(dumbbell):
    bundle = invariant_bundle(dumbbell)
    assert (bundle.tau, bundle.epsilon, bundle.phi, bundle.lam) == (F(3, 8), F(4, 3), F(7, 6), F(2, 5))
    assert bundle.length == 3
    assert bundle.type_length(1) == 1


def test_theta_invariants(theta):
    bundle = invariant_bundle(theta)
    assert (bundle.tau, bundle.epsilon, bundle.phi, bundle.lam) == (F(1, 6), F(5, 9), F(1, 9), F(3, 10))
    assert green_diagonal(theta, VertexPoint('A')) == F(1, 9)


def test_measure_has_unit_mass(theta, dumbbell):
    measure = admissible_measure(theta)
    assert measure.total_mass(theta) == 1
    assert measure.density('e1') == F(1, 3)
    assert measure.atoms == ()

    measure = admissible_measure(dumbbell)
    assert measure.total_mass(dumbbell) == 1
    assert measure.density('bridge') == 0
    assert measure.density('loop_a') == F(1, 2)


def test_genus_zero_is_rejected():
    point = PolarizedMetrizedGraph((Vertex('a', 0),), ())
    with pytest.raises(GenusZero):
        admissible_measure(point)


@pytest.mark.parametrize('point', [
    VertexPoint('A'), EdgePoint('e1', F(1, 3)), EdgePoint('e2', F(1, 2)),
])
def test_green_rows_integrate_to_zero(theta, point):
    assert green_row_integral(theta, point) == 0


def test_green_rows_integrate_to_zero_across_bridges(dumbbell):
    for point in (VertexPoint('a'), EdgePoint('bridge', F(1, 4)), EdgePoint('loop_b', F(2, 3))):
        assert green_row_integral(dumbbell, point) == 0


def test_green_is_symmetric(dumbbell):
    x, y = EdgePoint('loop_a', F(1, 5)), EdgePoint('bridge', F(3, 4))
    assert green_value(dumbbell, x, y) == green_value(dumbbell, y, x)


def test_potential_integrates_to_twice_tau(theta):
    # unit edges; the potential is quadratic along each edge, so Simpson is exact
    measure = admissible_measure(theta)
    total = 0
    for e, d in measure.densities:
        ends = potential(theta, EdgePoint(e, 0)) + potential(theta, EdgePoint(e, 1))
        total += d * (ends + 4 * potential(theta, EdgePoint(e, F(1, 2)))) / 6
    assert total == 2 * tau(theta)


def test_epsilon_from_potential(dumbbell):
    # K = a + b
    expected = potential(dumbbell, VertexPoint('a')) + potential(dumbbell, VertexPoint('b'))
    assert epsilon_invariant(dumbbell) == expected


def test_float_backend_is_close(theta, theta_float):
    exact, approx = invariant_bundle(theta), invariant_bundle(theta_float)
    assert isinstance(approx.tau, float) and isinstance(exact.tau, Fraction)
    assert approx.tau == pytest.approx(float(exact.tau), rel=1e-10)
    assert approx.phi == pytest.approx(float(exact.phi), rel=1e-9)


@settings(max_examples=20, deadline=None)
@given(st.integers(min_value=0, max_value=5_000))
def test_lambda_cross_formula(seed):
    graph = generate_family(parse_family_spec('random-polarized:q_budget=1', seed=seed), 1)[0]
    bundle = invariant_bundle(graph, check=False)
    assert lambda_from_phi(bundle.genus, bundle.phi, bundle.epsilon, bundle.length) == bundle.lam
    consistency_checks(graph, bundle)


def test_backends_keep_separate_caches(fixtures_dir):
    for cached in (tau, admissible_measure, resistance_kernel, vertex_resistance_matrix):
        cached.cache_clear()
    approx = parse_graph(fixtures_dir / 'theta.json', backend='float')
    exact = parse_graph(fixtures_dir / 'theta.json')
    assert approx != exact

    assert isinstance(tau(approx), float)
    value = tau(exact)
    assert isinstance(value, Fraction)
    assert value == F(1, 6)
    assert all(isinstance(d, Fraction) for _, d in admissible_measure(exact).densities)
    assert isinstance(vertex_resistance_matrix(exact)['A']['B'], Fraction)


@settings(max_examples=20, deadline=None)
@given(st.sampled_from(['e1', 'e2', 'e3']), st.fractions(min_value=0, max_value=1, max_denominator=17))
def test_green_rows_integrate_to_zero_at_random_points(theta, edge, s):
    assert green_row_integral(theta, EdgePoint(edge, s)) == 0
