import math

import pandas as pd
import pytest

from components.cell_functions import CellFunction
from components.statistics import convergence_study, empirical_order, format_error, is_converging


@pytest.fixture(scope="module")
def square(segment):
    return CellFunction.from_polynomial(segment, segment, [[0.0], [0.0], [1.0]])


def test_quadratic_gap_shrinks_like_level_squared(square):
    df = convergence_study([square] * 3, levels=(2, 4, 8, 16))
    assert list(df['level']) == [2, 4, 8, 16]
    assert df['continuous'].abs().max() < 1e-12
    for n, discrete in zip(df['level'], df['discrete']):
        assert discrete == pytest.approx(-1 / (4 * n * n), rel=1e-9)
    assert df['ratio'].iloc[1:].tolist() == pytest.approx([4.0, 4.0, 4.0], rel=1e-6)
    assert is_converging(df)

    fit = empirical_order(df)
    assert fit['order'] == pytest.approx(2.0, abs=1e-6)
    assert fit['r_squared'] == pytest.approx(1.0)
    assert fit['n'] == 4


def test_exact_discretisation_has_infinite_order():
    df = pd.DataFrame({'level': [1, 2, 4], 'error': [0.0, 0.0, 0.0]})
    assert math.isinf(empirical_order(df)['order'])
    assert is_converging(df)


def test_stalled_errors_are_not_converging():
    df = pd.DataFrame({'level': [2, 4, 8], 'error': [0.1, 0.09, 0.08]})
    assert not is_converging(df)


@pytest.mark.parametrize('value, text', [(0, '0'), (1e-15, '< 1e-12'), (0.00123, '1.230e-03')])
def test_format_error(value, text):
    assert format_error(value) == text


def test_distinct_quadratics_converge_at_second_order(segment):
    # x², y² + xy and x² + xy: the discrete pairing is 7/3 − 1/(3n²) on one unit cell
    functions = [
        CellFunction.from_polynomial(segment, segment, coefficients)
        for coefficients in ([[0.0], [0.0], [1.0]],
                             [[0.0, 0.0, 1.0], [0.0, 1.0, 0.0]],
                             [[0.0, 0.0], [0.0, 1.0], [1.0, 0.0]])
    ]
    df = convergence_study(functions, levels=(2, 4, 8, 16, 32))
    assert df['continuous'].iloc[0] == pytest.approx(7 / 3, abs=1e-10)
    for n, discrete in zip(df['level'], df['discrete']):
        assert discrete == pytest.approx(7 / 3 - 1 / (3 * n * n), abs=1e-9)

    length = float(segment.total_length)
    assert df['error'].iloc[-1] < 0.02 * length
    assert is_converging(df, factor=200)

    fit = empirical_order(df)
    assert fit['order'] == pytest.approx(2.0, abs=1e-4)
    assert fit['n'] == 5
