import math
from itertools import product

import pytest

from components.root_numbers import (
    LocalPlaceData, PlaceKind, archimedean_L_factor, epsilon_comparison, global_epsilon,
    hodge_numbers, alternative_local_epsilon, local_epsilon, local_L_factor_log, place_from_graph,
)
from utils.errors import InvalidForGenusOne, InvalidSpec, PoleAt
from utils.graph_io import parse_places

GENERA = range(1, 9)
RANKS = range(0, 6)


def nonarch(g, e, tau=1):
    return LocalPlaceData(PlaceKind.NONARCH, g, e, tau)


@pytest.mark.parametrize('g, real, complex_', [
    (1, 1, -1), (2, -1, 1), (3, -1, 1), (4, 1, 1), (5, 1, -1), (6, -1, 1),
])
def test_archimedean_signs(g, real, complex_):
    assert local_epsilon(LocalPlaceData('real', g)) == real
    assert local_epsilon(LocalPlaceData('complex', g)) == complex_


@pytest.mark.parametrize('g, e, tau, expected', [
    (2, 1, 1, 1), (2, 1, -1, 1), (3, 1, 1, -1), (3, 1, -1, 1),
    (3, 3, 1, 1), (3, 3, -1, 1), (4, 3, 1, -1), (4, 3, -1, 1),
])
def test_nonarchimedean_examples(g, e, tau, expected):
    assert local_epsilon(nonarch(g, e, tau)) == expected


def test_good_reduction_is_trivial():
    for g in GENERA:
        for tau in (1, -1):
            assert local_epsilon(nonarch(g, 0, tau)) == 1


def test_sign_tables_have_period_four():
    for g in GENERA:
        for e in RANKS:
            for tau in (1, -1):
                assert local_epsilon(nonarch(g, e, tau)) == local_epsilon(nonarch(g + 4, e, tau))
        for kind in ('real', 'complex'):
            assert local_epsilon(LocalPlaceData(kind, g)) == local_epsilon(LocalPlaceData(kind, g + 4))


def test_frobenius_sign_flip():
    for g in GENERA:
        for e in range(1, 6):
            flip = -1 if ((e - 1) * (e - 2) // 2 + g) % 2 else 1
            assert local_epsilon(nonarch(g, e, -1)) == flip * local_epsilon(nonarch(g, e, 1))


def test_global_sign_is_the_product(fixtures_dir):
    places = parse_places(fixtures_dir / 'places.json')
    assert len(places) == 5
    assert global_epsilon(places) == -1
    with pytest.raises(InvalidSpec):
        global_epsilon([])


def test_place_validation():
    assert LocalPlaceData('nonarchimedean', 2, 1).kind is PlaceKind.NONARCH
    with pytest.raises(InvalidSpec):
        LocalPlaceData('real', 2, 1)
    with pytest.raises(InvalidSpec):
        LocalPlaceData('nonarch', 2, 1, 0)
    with pytest.raises(InvalidSpec):
        LocalPlaceData('adelic', 2)
    with pytest.raises(InvalidSpec):
        nonarch(2, 3).check_toric_bound()


def test_place_from_reduction_graph(theta, dumbbell):
    place = place_from_graph(theta)
    assert (place.g, place.e) == (2, 2)
    assert local_epsilon(place) == 1
    assert place_from_graph(dumbbell, tau=-1).as_record() == {'kind': 'nonarch', 'g': 2, 'e': 2, 'tau': -1}


def test_hodge_numbers():
    assert hodge_numbers(2) == (0, 0)
    assert hodge_numbers(3) == (1, 6)
    assert hodge_numbers(4) == (4, 20)
    with pytest.raises(InvalidForGenusOne):
        hodge_numbers(1)
    with pytest.raises(InvalidSpec):
        hodge_numbers(0)


def test_alternative_archimedean_signs():
    rows = epsilon_comparison()
    assert len(rows) == 32
    by_key = {(r['kind'], r['g']): r for r in rows}
    assert by_key[('complex', 2)]['agree']
    assert not by_key[('real', 2)]['agree']
    assert alternative_local_epsilon(LocalPlaceData('real', 2)) == 1
    with pytest.raises(InvalidSpec):
        alternative_local_epsilon(nonarch(2, 1))


def test_l_factor_values():
    assert archimedean_L_factor(2, 0.7) == 1.0
    assert archimedean_L_factor(3, 0.0) == pytest.approx(1 / (2 * math.pi ** 8), rel=1e-12)
    assert archimedean_L_factor(3, 0.0, 'real') == archimedean_L_factor(3, 0.0, 'complex')
    assert archimedean_L_factor(3, 0.0, log=True) == pytest.approx(-math.log(2) - 8 * math.log(math.pi))
    assert archimedean_L_factor(3, -2.5) < 0
    assert local_L_factor_log(3, -1.5)[0] == 1


@pytest.mark.parametrize('s', [-1, -2, -3.0])
def test_l_factor_poles(s):
    with pytest.raises(PoleAt):
        archimedean_L_factor(3, s)


def test_l_factor_rejects_genus_one():
    with pytest.raises(InvalidForGenusOne):
        archimedean_L_factor(1, 1.0)


@pytest.mark.parametrize('g, e, tau', list(product(GENERA, RANKS, (1, -1))))
def test_nonarchimedean_sign_matches_exponent(g, e, tau):
    if e == 0:
        expected = 1
    else:
        expected = (-1) ** (e * (e - 1) * (e - 2) // 6 + g * e) * tau ** ((e - 1) * (e - 2) // 2 + g)
    assert local_epsilon(nonarch(g, e, tau)) == expected


@pytest.mark.parametrize('g', GENERA)
def test_archimedean_sign_matches_exponent(g):
    assert local_epsilon(LocalPlaceData('real', g)) == (-1) ** (g * (g - 1) // 2)
    assert local_epsilon(LocalPlaceData('complex', g)) == (-1) ** (g * (g + 1) * (g + 2) // 6)
