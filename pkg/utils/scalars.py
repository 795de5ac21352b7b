"""Exact (Fraction) and float scalar helpers.

Every quantity in the library is a rational function of edge lengths and q-values, so the
exact backend keeps everything as ``fractions.Fraction``. The float backend uses plain
Python floats and compares with a tolerance.
"""
import math
import re
from fractions import Fraction
from numbers import Rational

from utils.errors import ParseError

INFINITY = math.inf
DEFAULT_TOLERANCE = 1e-10

_RATIONAL_PATTERN = re.compile(r'^\s*([+-]?\d+)\s*(?:/\s*(\d+)\s*)?$')


def is_exact(value):
    return isinstance(value, Rational)


def is_infinite(value):
    return isinstance(value, float) and math.isinf(value)


def parse_scalar(raw, backend='exact', location=''):
    """Parse a JSON length: an int, a float (float backend only) or an '<int>/<int>' string."""
    if isinstance(raw, bool):
        raise ParseError(f"expected a number, got {raw!r}", location)

    if isinstance(raw, str):
        match = _RATIONAL_PATTERN.match(raw)
        if match is None:
            try:
                value = float(raw)
            except ValueError:
                raise ParseError(f"not a rational string: {raw!r}", location) from None
            if backend == 'exact':
                raise ParseError(f"decimal {raw!r} not allowed in exact mode; use '<int>/<int>'", location)
            return value
        numerator = int(match.group(1))
        denominator = int(match.group(2)) if match.group(2) is not None else 1
        if denominator == 0:
            raise ParseError(f"zero denominator in {raw!r}", location)
        value = Fraction(numerator, denominator)
    elif isinstance(raw, int):
        value = Fraction(raw)
    elif isinstance(raw, float):
        if backend == 'exact':
            if not raw.is_integer():
                raise ParseError(f"float {raw!r} not allowed in exact mode; use '<int>/<int>'", location)
            value = Fraction(int(raw))
        else:
            return raw
    else:
        raise ParseError(f"expected a number, got {type(raw).__name__}", location)

    return value if backend == 'exact' else float(value)


def convert(value, backend):
    """Move a scalar into the given backend."""
    if backend == 'float':
        return float(value)
    if isinstance(value, float):
        return Fraction(value).limit_denominator(10**12)
    return Fraction(value)


def is_zero(value, tolerance=DEFAULT_TOLERANCE):
    if is_exact(value):
        return value == 0
    return abs(value) < tolerance


def sign(value, tolerance=DEFAULT_TOLERANCE):
    """-1, 0 or +1; floats within tolerance of zero count as zero."""
    if is_zero(value, tolerance):
        return 0
    return 1 if value > 0 else -1


def close(a, b, tolerance=DEFAULT_TOLERANCE):
    if is_exact(a) and is_exact(b):
        return a == b
    return abs(float(a) - float(b)) <= tolerance * max(1.0, abs(float(a)), abs(float(b)))


def format_scalar(value):
    """Serialize a scalar without precision loss: rationals as 'p/q' strings."""
    if is_infinite(value):
        return 'inf'
    if is_exact(value):
        value = Fraction(value)
        if value.denominator == 1:
            return str(value.numerator)
        return f"{value.numerator}/{value.denominator}"
    return repr(float(value))
