"""Admissible measure, admissible Green's function and the invariants τ, ε, φ, λ."""
import logging
from dataclasses import dataclass, field
from functools import lru_cache

from components.graph_core import (
    EdgePoint, VertexPoint, canonical_divisor, genus, type_lengths,
)
from components.resistance import resistance_kernel, resistance_profile
from utils.errors import GenusZero, InvariantAssertionError
from utils.scalars import INFINITY, close, format_scalar

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class AdmissibleMeasure:
    """dμ = (1/g)(Σ q(x) δ_x + Σ dx_e / (ℓ_e + r_e)); bridges carry no density."""
    genus: int
    atoms: tuple
    densities: tuple

    def atom_mass(self, vertex_id):
        return next((m for p, m in self.atoms if p.vertex == vertex_id), 0)

    def density(self, edge_id):
        return next((d for e, d in self.densities if e == edge_id), 0)

    def total_mass(self, graph):
        mass = sum((m for _, m in self.atoms), graph.scalar(0))
        for edge_id, d in self.densities:
            mass += d * graph.edge(edge_id).length
        return mass


@dataclass(frozen=True)
class InvariantBundle:
    genus: int
    length: object
    tau: object
    epsilon: object
    phi: object
    lam: object
    type_lengths: tuple = field(default=())

    def type_length(self, i):
        return dict(self.type_lengths).get(i, 0 * self.length)

    def __add__(self, other):
        if self.genus != other.genus:
            raise ValueError('bundles of different genus cannot be added')
        table = dict(self.type_lengths)
        for i, length in other.type_lengths:
            table[i] = table.get(i, 0) + length
        return InvariantBundle(
            self.genus,
            self.length + other.length,
            self.tau + other.tau,
            self.epsilon + other.epsilon,
            self.phi + other.phi,
            self.lam + other.lam,
            tuple(sorted(table.items())),
        )

    def as_record(self, serialize=False):
        fmt = format_scalar if serialize else (lambda v: v)
        record = {
            'genus': self.genus,
            'length': fmt(self.length),
            'tau': fmt(self.tau),
            'epsilon': fmt(self.epsilon),
            'phi': fmt(self.phi),
            'lambda': fmt(self.lam),
        }
        record['type_lengths'] = {str(i): fmt(v) for i, v in self.type_lengths}
        return record


def _require_genus(graph):
    g = genus(graph)
    if g < 1:
        raise GenusZero(f"graph {graph.name or '<anon>'} has genus {g}")
    return g


@lru_cache(maxsize=256)
def admissible_measure(graph):
    g = _require_genus(graph)
    kernel = resistance_kernel(graph)
    atoms = tuple(
        (VertexPoint(v.id), graph.scalar(v.q) / g) for v in graph.vertices if v.q
    )
    densities = []
    for e in graph.edges:
        R = kernel.complement(e.id)
        if R == INFINITY:
            continue
        densities.append((e.id, 1 / (g * (e.length + R))))
    measure = AdmissibleMeasure(g, atoms, tuple(densities))

    mass = measure.total_mass(graph)
    if not close(mass, graph.scalar(1)):
        raise InvariantAssertionError(f"admissible measure has mass {mass}, expected 1")
    return measure


def potential(graph, x):
    """∫ r(x, y) dμ(y)."""
    measure = admissible_measure(graph)
    kernel = resistance_kernel(graph)
    total = graph.scalar(0)
    for point, mass in measure.atoms:
        total += mass * kernel.between(x, point)
    for edge_id, density in measure.densities:
        total += density * kernel.edge_integral(x, edge_id)
    return total


@lru_cache(maxsize=256)
def tau(graph):
    """τ = ½ ∬ r dμ dμ, expanded into atom and edge terms."""
    measure = admissible_measure(graph)
    kernel = resistance_kernel(graph)
    total = graph.scalar(0)

    for a, ma in measure.atoms:
        for b, mb in measure.atoms:
            total += ma * mb * kernel.between(a, b)
        for edge_id, density in measure.densities:
            total += 2 * ma * density * kernel.edge_integral(a, edge_id)

    for first, d1 in measure.densities:
        for second, d2 in measure.densities:
            total += d1 * d2 * kernel.edge_pair_integral(first, second)
    return total / 2


def epsilon_invariant(graph):
    """ε = Σ_x ord_K(x) ∫ r(x, y) dμ(y)."""
    _require_genus(graph)
    total = graph.scalar(0)
    for point, order in canonical_divisor(graph).terms:
        total += order * potential(graph, point)
    return total


def green_diagonal(graph, x):
    """G(x, x) = ∫ r(x, y) dμ(y) − τ."""
    return potential(graph, x) - tau(graph)


def green_value(graph, x, y):
    """G(x, y) = ½(G(x, x) + G(y, y) − r(x, y))."""
    r = resistance_kernel(graph).between(x, y)
    return (green_diagonal(graph, x) + green_diagonal(graph, y) - r) / 2


def green_row_integral(graph, x):
    """∫ G(x, y) dμ(y), integrating the resistance profiles edge by edge; should be 0."""
    measure = admissible_measure(graph)
    t = tau(graph)
    gxx = green_diagonal(graph, x)
    total = graph.scalar(0)
    for point, mass in measure.atoms:
        total += mass * green_value(graph, x, point)
    for edge_id, density in measure.densities:
        L = graph.edge(edge_id).length
        samples = [potential(graph, EdgePoint(edge_id, s)) for s in (0 * L, L / 2, L)]
        potential_integral = L * (samples[0] + 4 * samples[1] + samples[2]) / 6
        r_integral = resistance_profile(graph, x, edge_id).integral()
        total += density * (L * gxx + potential_integral - L * t - r_integral) / 2
    return total


def phi_from_parts(g, t, eps, length):
    """φ = 3gτ − ¼(ε + ℓ)."""
    return 3 * g * t - (eps + length) / 4


def lambda_from_parts(g, t, eps, length):
    """λ = g(g−1)/(2(2g+1)) τ + (g+1)/(8(2g+1)) (ℓ + ε)."""
    return g * (g - 1) * t / (2 * (2 * g + 1)) + (g + 1) * (length + eps) / (8 * (2 * g + 1))


def lambda_from_phi(g, phi_value, eps, length):
    """λ = (g−1)/(6(2g+1)) φ + (ε + ℓ)/12."""
    return (g - 1) * phi_value / (6 * (2 * g + 1)) + (eps + length) / 12


def phi(graph):
    g = _require_genus(graph)
    return phi_from_parts(g, tau(graph), epsilon_invariant(graph), graph.total_length)


def lambda_invariant(graph):
    g = _require_genus(graph)
    return lambda_from_parts(g, tau(graph), epsilon_invariant(graph), graph.total_length)


def green_diagonal_against_canonical(graph):
    """∫ G(x, x) δ_K = Σ ord_K(v) G(v, v)."""
    total = graph.scalar(0)
    for point, order in canonical_divisor(graph).terms:
        total += order * green_diagonal(graph, point)
    return total


def consistency_checks(graph, bundle):
    """Alternative forms of ε, φ and λ; raise InvariantAssertionError on any mismatch."""
    g, t, eps, length = bundle.genus, bundle.tau, bundle.epsilon, bundle.length
    green_k = green_diagonal_against_canonical(graph)

    checks = {
        'epsilon via G(x,x)': ((2 * g - 2) * t + green_k, eps),
        'phi via (10g+2)dμ − δ_K': (-length / 4 + ((10 * g + 2) * t - green_k) / 4, bundle.phi),
        'lambda via phi': (lambda_from_phi(g, bundle.phi, eps, length), bundle.lam),
    }
    for label, (left, right) in checks.items():
        if not close(left, right):
            raise InvariantAssertionError(f"{label}: {left} != {right}")
    return checks


def invariant_bundle(graph, check=True):
    """All invariants of the graph, cross-checked against their alternative forms."""
    g = _require_genus(graph)
    length = graph.total_length
    t = tau(graph)
    eps = epsilon_invariant(graph)
    bundle = InvariantBundle(
        genus=g,
        length=length,
        tau=t,
        epsilon=eps,
        phi=phi_from_parts(g, t, eps, length),
        lam=lambda_from_parts(g, t, eps, length),
        type_lengths=tuple(type_lengths(graph).items()),
    )
    if check:
        consistency_checks(graph, bundle)
    logger.debug("invariants of %s: tau=%s phi=%s", graph.name or '<anon>', t, bundle.phi)
    return bundle
