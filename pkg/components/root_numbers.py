"""Hodge numbers, epsilon factors and archimedean L-factors of the triple-product motive."""
import logging
import math
from dataclasses import dataclass
from enum import Enum
from functools import reduce

from scipy import special

from components.graph_core import betti_number, genus
from utils.errors import InvalidForGenusOne, InvalidSpec, PoleAt

logger = logging.getLogger(__name__)


class PlaceKind(str, Enum):
    REAL = 'real'
    COMPLEX = 'complex'
    NONARCH = 'nonarch'

    @classmethod
    def parse(cls, raw):
        aliases = {'nonarchimedean': cls.NONARCH, 'non-archimedean': cls.NONARCH}
        if raw in aliases:
            return aliases[raw]
        try:
            return cls(raw)
        except ValueError:
            raise InvalidSpec(f"unknown place kind {raw!r}") from None


@dataclass(frozen=True)
class LocalPlaceData:
    kind: PlaceKind
    g: int
    e: int = 0
    tau: int = 1

    def __post_init__(self):
        object.__setattr__(self, 'kind', PlaceKind.parse(self.kind))
        if self.g < 1:
            raise InvalidSpec(f"place genus must be >= 1, got {self.g}")
        if self.e < 0:
            raise InvalidSpec(f"toric rank must be >= 0, got {self.e}")
        if self.tau not in (1, -1):
            raise InvalidSpec(f"Frobenius determinant must be ±1, got {self.tau}")
        if self.kind is not PlaceKind.NONARCH and self.e:
            raise InvalidSpec('archimedean places have no toric rank')

    @property
    def archimedean(self):
        return self.kind is not PlaceKind.NONARCH

    def check_toric_bound(self):
        """The toric rank of a reduction is at most g."""
        if self.e > self.g:
            raise InvalidSpec(f"toric rank {self.e} exceeds genus {self.g}")
        return self

    def as_record(self):
        return {'kind': self.kind.value, 'g': self.g, 'e': self.e, 'tau': self.tau}


def _hodge(g):
    return g * (g - 1) * (g - 2) // 6, g * (g - 2) * (g + 1) // 2


def hodge_numbers(g):
    """(h^{-2,1}, h^{-1,0}) of the primitive part of ∧³H¹."""
    if g < 1:
        raise InvalidSpec(f"genus must be >= 1, got {g}")
    if g == 1:
        raise InvalidForGenusOne('h^{-1,0} = g(g−2)(g+1)/2 is negative for g = 1')
    return _hodge(g)


def _sign(exponent):
    return -1 if exponent % 2 else 1


def local_epsilon(place):
    e, g, t = place.e, place.g, place.tau
    if place.kind is PlaceKind.REAL:
        return _sign(g * (g - 1) // 2)
    if place.kind is PlaceKind.COMPLEX:
        return _sign(g * (g + 1) * (g + 2) // 6)
    if e == 0:
        return 1
    sign = _sign(e * (e - 1) * (e - 2) // 6 + g * e)
    if t == -1:
        sign *= _sign((e - 1) * (e - 2) // 2 + g)
    return sign


def global_epsilon(places):
    places = list(places)
    if not places:
        raise InvalidSpec('global epsilon needs at least one place')
    signs = [local_epsilon(p) for p in places]
    logger.debug("local signs %s", signs)
    return reduce(lambda a, b: a * b, signs, 1)


def toric_rank_from_graph(graph):
    return betti_number(graph)


def place_from_graph(graph, tau=1):
    """Nonarchimedean place whose reduction graph is ``graph``."""
    return LocalPlaceData(PlaceKind.NONARCH, genus(graph), toric_rank_from_graph(graph), tau)


def alternative_local_epsilon(place):
    """Alternative archimedean signs i^{6h+2h'} (complex) and i^{4h+2h'} (real)."""
    if not place.archimedean:
        raise InvalidSpec('alternative signs exist only for archimedean places')
    h, h_prime = _hodge(place.g)
    exponent = 6 * h + 2 * h_prime if place.kind is PlaceKind.COMPLEX else 4 * h + 2 * h_prime
    return 1 if exponent % 4 == 0 else -1


def epsilon_comparison(genera=range(1, 17)):
    """Rows (kind, g, local sign, alternative sign, agree) for the archimedean kinds."""
    rows = []
    for kind in (PlaceKind.REAL, PlaceKind.COMPLEX):
        for g in genera:
            place = LocalPlaceData(kind, g)
            sign, alternative = local_epsilon(place), alternative_local_epsilon(place)
            rows.append({
                'kind': kind.value,
                'g': g,
                'local': sign,
                'alternative': alternative,
                'agree': sign == alternative,
            })
    return rows


def _is_pole(x):
    return float(x).is_integer() and x <= 0


def local_L_factor_log(g, s):
    """(sign, log|L|) of Γ_C(s+2)^{h^{-2,1}} Γ_C(s+1)^{h^{-1,0}} with Γ_C(s) = 2(2π)^{-s}Γ(s)."""
    h, h_prime = hodge_numbers(g)
    sign, log_abs = 1, 0.0
    for shift, exponent in ((2, h), (1, h_prime)):
        if exponent == 0:
            continue
        x = s + shift
        if _is_pole(x):
            raise PoleAt(s)
        log_abs += exponent * (math.log(2) - x * math.log(2 * math.pi) + special.gammaln(x))
        if special.gammasgn(x) < 0 and exponent % 2:
            sign = -sign
    return sign, float(log_abs)


def archimedean_L_factor(g, s, kind=PlaceKind.COMPLEX, log=False):
    """The archimedean L-factor; the same Γ_C product at real and complex places.

    With ``log`` returns log|L| instead of L.
    """
    PlaceKind.parse(kind)
    sign, log_abs = local_L_factor_log(g, s)
    if log:
        return log_abs
    return sign * math.exp(log_abs)
