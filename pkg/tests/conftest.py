"""Shared fixtures: the JSON graphs under fixtures/ and small product complexes."""
from pathlib import Path

import pytest

from components.closed_forms import circle_graph, segment_graph
from components.graph_core import make_graph
from components.lattice import ProductComplex
from utils.graph_io import parse_graph

FIXTURES = Path(__file__).resolve().parent.parent / 'fixtures'


@pytest.fixture(scope="session")
def fixtures_dir():
    return FIXTURES


@pytest.fixture(scope="session")
def dumbbell():
    return parse_graph(FIXTURES / 'dumbbell.json')


@pytest.fixture(scope="session")
def theta():
    return parse_graph(FIXTURES / 'theta.json')


@pytest.fixture(scope="session")
def theta_float():
    return parse_graph(FIXTURES / 'theta.json', backend='float')


@pytest.fixture(scope="session")
def segment():
    return segment_graph(2, 1, 1)


@pytest.fixture(scope="session")
def path_graph():
    """a – b – c with unit edges; b has two singular points on it."""
    return make_graph([('a', 1), ('b', 0), ('c', 1)],
                      [('f1', ('a', 'b'), 1), ('f2', ('b', 'c'), 1)], name='path')


@pytest.fixture(scope="session")
def unit_square(segment):
    return ProductComplex(segment, segment, 1)


@pytest.fixture(scope="session")
def two_circle():
    """Circle of length 2 split at two antipodal marks, so no loops."""
    return circle_graph([(0, 0), (1, 0)], 2, name='circle-2')
