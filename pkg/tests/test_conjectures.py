from fractions import Fraction

import pytest

from components.admissible import invariant_bundle
from components.conjectures import (
    EQUALITY, FAILS, HOLDS, SKIPPED, check_bound_equivalence, check_epsilon_two_sided,
    check_lambda_bound, check_phi_bound, check_trivial_bounds, default_constant, generate_family,
    parse_family_spec, phi_bound_rhs, reports_frame, run_batch, summarize_reports,
)
from components.graph_core import make_graph
from utils.errors import GenusTooSmall, InvalidSpec, NotTwoEdgeConnected

F = Fraction


@pytest.fixture(scope="module")
def genus_one():
    return make_graph([('A', 0)], [('c', ('A', 'A'), 1)], name='loop')


def test_default_constant():
    assert default_constant(2) == F(1, 12)
    assert default_constant(3) == F(1, 9)


def test_dumbbell_meets_both_bounds_with_equality(dumbbell):
    phi_report = check_phi_bound(dumbbell)
    assert (phi_report.left, phi_report.right, phi_report.verdict) == (F(7, 6), F(7, 6), EQUALITY)
    lam_report = check_lambda_bound(dumbbell)
    assert (lam_report.left, lam_report.right, lam_report.verdict) == (F(2, 5), F(2, 5), EQUALITY)


def test_theta_fails_default_phi_bound(theta):
    report = check_phi_bound(theta)
    assert report.verdict == FAILS
    assert report.slack == F(1, 9) - F(1, 4)
    assert dict(report.details)['sharp_slack'] == 0
    assert report.graph_json
    assert check_phi_bound(theta, F(1, 27)).verdict == EQUALITY


def test_theta_lambda_and_epsilon(theta):
    assert check_lambda_bound(theta).verdict == EQUALITY
    report = check_epsilon_two_sided(theta)
    assert report.verdict == EQUALITY
    assert report.right == F(5, 9)
    assert dict(report.details)['upper'] == F(3, 4)


def test_epsilon_bound_needs_two_edge_connected(dumbbell):
    with pytest.raises(NotTwoEdgeConnected):
        check_epsilon_two_sided(dumbbell)


def test_bounds_need_genus_two(genus_one):
    with pytest.raises(GenusTooSmall):
        check_phi_bound(genus_one)


def test_bound_equivalence_on_theta(theta):
    slacks = check_bound_equivalence(theta)
    assert slacks['lower'] == (0, 0)
    assert slacks['upper'] == (F(7, 36), F(7, 144))


def test_trivial_bounds_hold_on_random_graphs():
    graphs = generate_family(parse_family_spec('random-polarized:q_budget=2', seed=3), 200)
    assert len(graphs) == 200
    verdicts = [check_trivial_bounds(graph).verdict for graph in graphs]
    assert set(verdicts) <= {HOLDS, EQUALITY}


def test_phi_bound_right_hand_side(theta, dumbbell):
    assert phi_bound_rhs(invariant_bundle(theta), 2, F(1, 12)) == F(1, 4)
    # loops are type 0, the bridge type 1
    assert phi_bound_rhs(invariant_bundle(dumbbell), 2, F(1, 12)) == F(7, 6)


def test_run_batch_keeps_order_and_skips(dumbbell, theta, genus_one):
    reports = run_batch([theta, genus_one, dumbbell], 'phi')
    assert [r.graph_id for r in reports] == [theta.name, 'loop', dumbbell.name]
    assert [r.verdict for r in reports] == [FAILS, SKIPPED, EQUALITY]

    summary = summarize_reports(reports)
    assert (summary['n'], summary[FAILS], summary[SKIPPED], summary[EQUALITY]) == (3, 1, 1, 1)
    assert summary['min_slack'] == '-5/36'
    assert list(reports_frame(reports)['verdict']) == [FAILS, SKIPPED, EQUALITY]


def test_chains_never_fail():
    graphs = generate_family(parse_family_spec('chains-of-circles:k=3', seed=11), 6)
    for bound in ('phi', 'lambda'):
        verdicts = {r.verdict for r in run_batch(graphs, bound)}
        assert verdicts <= {HOLDS, EQUALITY}


def test_families_are_deterministic():
    spec = parse_family_spec('banana:m=3', seed=5)
    first = generate_family(spec, 3)
    second = generate_family(spec, 3)
    assert first == second
    assert [g.name for g in first] == ['banana-5-0', 'banana-5-1', 'banana-5-2']


@pytest.mark.parametrize('text', ['nope', 'banana:m', 'banana:m=x'])
def test_bad_family_specs(text):
    with pytest.raises(InvalidSpec):
        parse_family_spec(text)
