"""Convergence statistics for the discrete triple pairing."""
import math

import numpy as np
import pandas as pd
import statsmodels.api as sm

from components.cell_functions import continuous_triple
from components.lattice import discrete_triple


def convergence_study(functions, levels=(2, 4, 8, 16, 32), order=5):
    """Discrete pairing at each level against the continuous value."""
    continuous = continuous_triple(*functions, order=order)
    rows = []
    for n in levels:
        discrete = float(discrete_triple(*(f.to_divisor(n) for f in functions)))
        rows.append({
            'level': n,
            'discrete': discrete,
            'continuous': continuous,
            'error': abs(discrete - continuous),
        })
    df = pd.DataFrame(rows)
    # Ratio of successive errors; 4 means second order when levels double
    df['ratio'] = df['error'].shift(1) / df['error'].replace(0.0, np.nan)
    return df


def empirical_order(df, level_col='level', error_col='error', floor=1e-14):
    """Fit log(error) = a − p·log(level) by OLS; p is the observed order of convergence."""
    valid = df[df[error_col] > floor]
    if len(valid) < 2:
        return {'order': math.inf, 'intercept': math.nan, 'r_squared': math.nan, 'n': len(valid)}

    X = sm.add_constant(np.log(valid[level_col].astype(float).to_numpy()))
    y = np.log(valid[error_col].to_numpy())
    fit = sm.OLS(y, X).fit()

    return {
        'order': -fit.params[1],
        'intercept': fit.params[0],
        'r_squared': fit.rsquared,
        'n': len(valid),
    }


def format_error(value):
    """Format an absolute error for display."""
    if value == 0:
        return "0"
    elif value < 1e-12:
        return "< 1e-12"
    else:
        return f"{value:.3e}"


def is_converging(df, factor=2.0, slack=1e-9):
    """err(last) ≤ err(first) / factor + slack."""
    errors = df['error'].to_numpy()
    return bool(errors[-1] <= errors[0] / factor + slack)
