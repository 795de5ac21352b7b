from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from components.admissible import invariant_bundle
from components.closed_forms import (
    additive_bundle, bridge_bundle, circle_bundle, circle_graph, elementary_phi, is_elementary,
    segment_graph, single_vertex_circle_bundle, equality_expected,
)
from components.conjectures import generate_family, parse_family_spec
from components.graph_core import make_graph
from utils.errors import GenusMismatch, InvalidSideGenus, InvalidSpec

F = Fraction
LENGTHS = [F(1), F(3, 2), F(7)]


def _core(bundle):
    record = bundle.as_record()
    return {k: record[k] for k in ('genus', 'length', 'tau', 'epsilon', 'phi', 'lambda')}


@pytest.mark.parametrize('length', LENGTHS)
@pytest.mark.parametrize('g', range(2, 7))
def test_bridge_closed_form(g, length):
    for i in range(1, g):
        assert _core(bridge_bundle(g, i, length)) == _core(invariant_bundle(segment_graph(g, i, length)))


def test_bridge_side_genus_is_symmetric():
    assert bridge_bundle(5, 1, 2) == bridge_bundle(5, 4, 2)


@pytest.mark.parametrize('i', [0, 3])
def test_bridge_rejects_bad_side(i):
    with pytest.raises(InvalidSideGenus):
        bridge_bundle(3, i, 1)


@pytest.mark.parametrize('length', LENGTHS)
@pytest.mark.parametrize('g', range(1, 6))
def test_single_vertex_circle_closed_form(g, length):
    loop = make_graph([('A', g - 1)], [('c', ('A', 'A'), length)])
    assert _core(single_vertex_circle_bundle(g, length)) == _core(invariant_bundle(loop))


def test_circle_fixture_matches_closed_form(fixtures_dir):
    from utils.graph_io import parse_graph

    bundle = invariant_bundle(parse_graph(fixtures_dir / 'circle_g2.json'))
    assert (bundle.tau, bundle.epsilon, bundle.phi, bundle.lam) == (F(3, 32), F(1, 4), F(1, 8), F(3, 20))
    assert _core(bundle) == _core(single_vertex_circle_bundle(2, F(3, 2)))


def test_circle_bundle_checks_marks():
    with pytest.raises(GenusMismatch):
        circle_bundle(3, [(0, 1)], 1)
    with pytest.raises(InvalidSpec):
        circle_graph([(0, 1), (0, 1)], 1)
    with pytest.raises(InvalidSpec):
        circle_graph([(2, 1)], 1)


def test_two_marked_circle_has_cross_term():
    graph = circle_graph([(0, 1), (1, 1)], 2)
    assert is_elementary(graph)
    assert not equality_expected(graph)
    assert elementary_phi(graph) == invariant_bundle(graph).phi


def test_dumbbell_is_additive(dumbbell):
    assert _core(additive_bundle(dumbbell)) == _core(invariant_bundle(dumbbell))
    assert elementary_phi(dumbbell) == F(7, 6)


@settings(max_examples=50, deadline=None)
@given(st.integers(min_value=0, max_value=10_000))
def test_pointed_sums_are_additive(seed):
    graph = generate_family(parse_family_spec('pointed-sum', seed=seed), 1)[0]
    assert _core(additive_bundle(graph)) == _core(invariant_bundle(graph))


@pytest.mark.parametrize('family', ['circles:marks=1', 'circles:marks=2', 'chains-of-circles:k=3'])
def test_elementary_phi_agrees(family):
    for graph in generate_family(parse_family_spec(family, seed=7), 4):
        assert is_elementary(graph)
        assert elementary_phi(graph) == invariant_bundle(graph).phi


def test_theta_is_not_elementary(theta):
    assert not is_elementary(theta)
    with pytest.raises(InvalidSpec):
        elementary_phi(theta)
