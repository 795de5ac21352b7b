"""Bound checkers for the φ/λ/ε conjectures and graph-family generators for batch runs."""
import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np
import pandas as pd

from components.admissible import invariant_bundle
from components.closed_forms import is_elementary, equality_expected
from components.graph_core import genus, is_two_edge_connected, make_graph
from utils.errors import (
    GenusTooSmall, InvalidSpec, InvariantAssertionError, NotTwoEdgeConnected,
)
from utils.graph_io import graph_to_json
from utils.scalars import close, convert, format_scalar, sign

logger = logging.getLogger(__name__)

HOLDS = 'holds'
EQUALITY = 'equality'
FAILS = 'fails'
SKIPPED = 'skipped'

BOUNDS = ('phi', 'lambda', 'epsilon', 'trivial')

# Sharp small-genus constants for the φ bound, reported alongside the verdict only.
SHARP_CONSTANTS = {2: Fraction(1, 27), 3: Fraction(2, 81)}


@dataclass(frozen=True)
class BoundReport:
    graph_id: str
    bound: str
    left: object
    right: object
    slack: object
    verdict: str
    constant: object = None
    details: tuple = field(default=())
    graph_json: str = ''

    @property
    def violated(self):
        return self.verdict == FAILS

    def as_record(self, serialize=False):
        fmt = format_scalar if serialize else (lambda v: v)
        record = {
            'graph_id': self.graph_id,
            'bound': self.bound,
            'left': None if self.left is None else fmt(self.left),
            'right': None if self.right is None else fmt(self.right),
            'slack': None if self.slack is None else fmt(self.slack),
            'verdict': self.verdict,
            'constant': None if self.constant is None else fmt(self.constant),
        }
        for key, value in self.details:
            record[key] = fmt(value) if not isinstance(value, (str, bool)) else value
        if self.graph_json:
            record['graph'] = self.graph_json
        return record


def verdict_for(slack):
    return {1: HOLDS, 0: EQUALITY, -1: FAILS}[sign(slack)]


def _combine(*verdicts):
    if FAILS in verdicts:
        return FAILS
    if EQUALITY in verdicts:
        return EQUALITY
    return HOLDS


def default_constant(g):
    """c(g) = (g − 1)/(6g), proved for elementary graphs."""
    return Fraction(g - 1, 6 * g)


def _require_genus_two(graph):
    g = genus(graph)
    if g < 2:
        raise GenusTooSmall(f"{graph.name or 'graph'} has genus {g}; bounds need g >= 2")
    return g


def _report(graph, bound, left, right, constant, details=(), verdict=None):
    slack = left - right
    verdict = verdict or verdict_for(slack)
    serialized = graph_to_json(graph) if verdict == FAILS else ''
    return BoundReport(graph.name, bound, left, right, slack, verdict, constant, tuple(details), serialized)


def phi_bound_rhs(bundle, g, c):
    table = dict(bundle.type_lengths)
    rhs = c * table.get(0, 0)
    for i, length in table.items():
        if i > 0:
            rhs += 2 * i * (g - i) * length / g
    return rhs


def check_phi_bound(graph, c=None):
    """φ ≥ c·ℓ_0 + Σ_{i>0} 2i(g−i)/g · ℓ_i."""
    g = _require_genus_two(graph)
    c = convert(default_constant(g) if c is None else c, graph.backend)
    bundle = invariant_bundle(graph)
    right = phi_bound_rhs(bundle, g, c)

    details = []
    if g in SHARP_CONSTANTS:
        sharp = convert(SHARP_CONSTANTS[g], graph.backend)
        details.append(('sharp_slack', bundle.phi - phi_bound_rhs(bundle, g, sharp)))
    return _report(graph, 'phi', bundle.phi, right, c, details)


def check_lambda_bound(graph):
    """λ ≥ g/(8g+4) · ℓ_0 + Σ_{i>0} i(g−i)/(2g+1) · ℓ_i."""
    g = _require_genus_two(graph)
    bundle = invariant_bundle(graph)
    table = dict(bundle.type_lengths)
    right = g * table.get(0, graph.scalar(0)) / (8 * g + 4)
    for i, length in table.items():
        if i > 0:
            right += i * (g - i) * length / (2 * g + 1)
    return _report(graph, 'lambda', bundle.lam, right, None)


def check_epsilon_two_sided(graph, c=None):
    """(g−1)/(g+1)(ℓ − 4gτ) ≤ ε ≤ 12gτ − (1 + c)ℓ for 2-edge-connected graphs."""
    g = _require_genus_two(graph)
    if not is_two_edge_connected(graph):
        raise NotTwoEdgeConnected(f"{graph.name or 'graph'} has bridges")
    c = convert(default_constant(g) if c is None else c, graph.backend)
    bundle = invariant_bundle(graph)
    length, t, eps = bundle.length, bundle.tau, bundle.epsilon

    lower = (g - 1) * (length - 4 * g * t) / (g + 1)
    upper = 12 * g * t - (1 + c) * length
    upper_slack = upper - eps
    verdict = _combine(verdict_for(eps - lower), verdict_for(upper_slack))
    details = [('upper', upper), ('upper_slack', upper_slack)]
    return _report(graph, 'epsilon', eps, lower, c, details, verdict=verdict)


def check_trivial_bounds(graph):
    """−(2g−1)ℓ/4 ≤ φ ≤ 3gℓ/2; must hold for every polarized graph."""
    g = _require_genus_two(graph)
    bundle = invariant_bundle(graph)
    lower = -(2 * g - 1) * bundle.length / 4
    upper = 3 * g * bundle.length / 2
    upper_slack = upper - bundle.phi
    verdict = _combine(verdict_for(bundle.phi - lower), verdict_for(upper_slack))
    details = [('upper', upper), ('upper_slack', upper_slack)]
    return _report(graph, 'trivial', bundle.phi, lower, None, details, verdict=verdict)


def check_bound_equivalence(graph, c=None):
    """For 2-edge-connected graphs the ε bounds are rescaled φ and λ bounds.

    lower ε slack × (g+1)/(8(2g+1)) = λ slack, and
    upper ε slack with constant c = 4 × φ slack with constant c/4.
    """
    g = _require_genus_two(graph)
    c = convert(default_constant(g) if c is None else c, graph.backend)
    eps_report = check_epsilon_two_sided(graph, c)
    lam_report = check_lambda_bound(graph)
    phi_report = check_phi_bound(graph, c / 4)
    upper_slack = dict(eps_report.details)['upper_slack']

    lower_scaled = eps_report.slack * (g + 1) / (8 * (2 * g + 1))
    if not close(lower_scaled, lam_report.slack):
        raise InvariantAssertionError(f"lower epsilon slack {lower_scaled} != lambda slack {lam_report.slack}")
    if not close(upper_slack, 4 * phi_report.slack):
        raise InvariantAssertionError(f"upper epsilon slack {upper_slack} != 4 x phi slack {phi_report.slack}")
    return {'lower': (eps_report.slack, lam_report.slack), 'upper': (upper_slack, phi_report.slack)}


def check_bound(graph, bound, c=None):
    if bound == 'phi':
        return check_phi_bound(graph, c)
    if bound == 'lambda':
        return check_lambda_bound(graph)
    if bound == 'epsilon':
        return check_epsilon_two_sided(graph, c)
    if bound == 'trivial':
        return check_trivial_bounds(graph)
    raise InvalidSpec(f"unknown bound {bound!r}; expected one of {BOUNDS}")


def _checked(args):
    graph, bound, c = args
    try:
        report = check_bound(graph, bound, c)
    except (GenusTooSmall, NotTwoEdgeConnected) as e:
        return BoundReport(graph.name, bound, None, None, None, SKIPPED, c, (('reason', str(e)),))
    elementary = is_elementary(graph)
    details = report.details + (('elementary', elementary),)
    if bound == 'phi' and elementary and c is None:
        expected = EQUALITY if equality_expected(graph) else HOLDS
        if report.verdict != expected:
            raise InvariantAssertionError(
                f"{graph.name}: elementary phi verdict {report.verdict}, expected {expected}")
    return BoundReport(report.graph_id, report.bound, report.left, report.right, report.slack,
                       report.verdict, report.constant, details, report.graph_json)


def run_batch(graphs, bound, c=None, workers=1):
    """Check every graph; violations are recorded, never raised. Output keeps input order."""
    jobs = [(graph, bound, c) for graph in graphs]
    if workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            reports = list(pool.map(_checked, jobs))
    else:
        reports = [_checked(job) for job in jobs]

    failures = [r for r in reports if r.violated]
    logger.info("checked %d graphs against %s bound: %d violations", len(reports), bound, len(failures))
    for r in failures:
        logger.warning("counterexample candidate %s (slack %s)", r.graph_id, format_scalar(r.slack))
    return reports


def reports_frame(reports):
    return pd.DataFrame([r.as_record(serialize=True) for r in reports])


def summarize_reports(reports):
    """Counts per verdict and the smallest slack seen."""
    counts = {HOLDS: 0, EQUALITY: 0, FAILS: 0, SKIPPED: 0}
    for r in reports:
        counts[r.verdict] += 1
    slacks = [r.slack for r in reports if r.slack is not None]
    return {
        'n': len(reports),
        **counts,
        'min_slack': format_scalar(min(slacks)) if slacks else None,
    }


# --- graph families -------------------------------------------------------------

FAMILIES = (
    'circles', 'chains-of-circles', 'banana', 'theta-variants', 'random-polarized',
    'wheel', 'complete', 'pointed-sum',
)


@dataclass(frozen=True)
class FamilySpec:
    name: str
    params: tuple = ()
    seed: int = 0

    def param(self, key, default=None):
        return dict(self.params).get(key, default)


def parse_family_spec(text, seed=0):
    """'banana:m=3' or 'random-polarized:n_vertices=6,n_edges=9,q_budget=2'."""
    name, _, rest = text.partition(':')
    name = name.strip()
    if name not in FAMILIES:
        raise InvalidSpec(f"unknown family {name!r}; expected one of {FAMILIES}")
    params = []
    for item in filter(None, (s.strip() for s in rest.split(','))):
        key, sep, value = item.partition('=')
        if not sep:
            raise InvalidSpec(f"family parameter {item!r} is not key=value")
        try:
            params.append((key.strip(), int(value)))
        except ValueError:
            raise InvalidSpec(f"family parameter {item!r} must be an integer") from None
    return FamilySpec(name, tuple(params), seed)


class _Builder:
    """Collects vertices and edges for one generated graph."""

    def __init__(self, rng, unit):
        self.rng = rng
        self.unit = unit
        self.q = {}
        self.edges = []

    def length(self):
        if self.unit:
            return Fraction(1)
        return Fraction(int(self.rng.integers(1, 7)), int(self.rng.integers(1, 5)))

    def vertex(self, q=0):
        vid = f"v{len(self.q)}"
        self.q[vid] = q
        return vid

    def edge(self, a, b):
        self.edges.append((f"e{len(self.edges)}", (a, b), self.length()))

    def valence(self, vid):
        return sum((a == vid) + (b == vid) for _, (a, b), _ in self.edges)

    def make_effective(self):
        for vid in self.q:
            while self.valence(vid) + 2 * self.q[vid] - 2 < 0:
                self.q[vid] += 1

    def build(self, name):
        self.make_effective()
        return make_graph(list(self.q.items()), self.edges, name=name)


def _cycle(builder, size, first=None):
    vertices = [first or builder.vertex()] + [builder.vertex() for _ in range(size - 1)]
    for k in range(size):
        builder.edge(vertices[k], vertices[(k + 1) % size])
    return vertices


def _circles(spec, rng, b):
    g = spec.param('g') or int(rng.integers(2, 6))
    marks = max(1, min(spec.param('marks', 1), g - 1))
    vertices = _cycle(b, marks)
    if g == 1:
        return
    for vid in vertices:
        b.q[vid] = 1
    for _ in range(g - 1 - marks):
        b.q[vertices[int(rng.integers(0, marks))]] += 1


def _chain(spec, rng, b):
    k = spec.param('k') or int(rng.integers(2, 5))
    previous = None
    for index in range(k):
        size = 1 if index in (0, k - 1) else int(rng.integers(1, 3))
        cycle = _cycle(b, size)
        if previous is not None:
            b.edge(previous, cycle[0])
        previous = cycle[-1]
    extra = spec.param('extra_q', 0)
    for _ in range(extra):
        vid = list(b.q)[int(rng.integers(0, len(b.q)))]
        b.q[vid] += 1


def _banana(spec, rng, b):
    m = spec.param('m') or int(rng.integers(2, 6))
    u, v = b.vertex(), b.vertex()
    for _ in range(m):
        b.edge(u, v)


def _theta(spec, rng, b):
    u, v = b.vertex(int(rng.integers(0, 2))), b.vertex(int(rng.integers(0, 2)))
    b.edge(u, v)
    b.edge(u, v)
    if rng.random() < 0.5:
        w = b.vertex(int(rng.integers(0, 2)))
        b.edge(u, w)
        b.edge(w, v)
    else:
        b.edge(u, v)


def _random_polarized(spec, rng, b):
    n = spec.param('n_vertices') or int(rng.integers(2, 7))
    m = spec.param('n_edges') or n + int(rng.integers(0, 4))
    budget = spec.param('q_budget', 0)
    vertices = [b.vertex() for _ in range(n)]
    for k in range(1, n):
        b.edge(vertices[int(rng.integers(0, k))], vertices[k])
    for _ in range(max(m - (n - 1), 0)):
        b.edge(vertices[int(rng.integers(0, n))], vertices[int(rng.integers(0, n))])
    for _ in range(budget):
        b.q[vertices[int(rng.integers(0, n))]] += 1


def _wheel(spec, rng, b):
    k = spec.param('k') or int(rng.integers(3, 6))
    hub = b.vertex()
    rim = _cycle(b, k)
    for vid in rim:
        b.edge(hub, vid)


def _complete(spec, rng, b):
    k = spec.param('k') or int(rng.integers(3, 6))
    vertices = [b.vertex() for _ in range(k)]
    for i in range(k):
        for j in range(i + 1, k):
            b.edge(vertices[i], vertices[j])


def _pointed_sum(spec, rng, b):
    count = spec.param('components') or int(rng.integers(2, 6))
    anchors = [b.vertex()]
    for _ in range(count):
        at = anchors[int(rng.integers(0, len(anchors)))]
        kind = int(rng.integers(0, 4))
        if kind == 0:
            anchors.extend(_cycle(b, int(rng.integers(1, 3)), first=at)[1:])
        elif kind == 1:
            other = b.vertex()
            for _ in range(int(rng.integers(2, 4))):
                b.edge(at, other)
            anchors.append(other)
        elif kind == 2:
            other = b.vertex(1)
            b.edge(at, other)
            anchors.append(other)
        else:
            u, v = b.vertex(), b.vertex()
            b.edge(at, u)
            b.edge(u, v)
            b.edge(u, v)
            anchors.extend([u, v])


_GENERATORS = {
    'circles': _circles,
    'chains-of-circles': _chain,
    'banana': _banana,
    'theta-variants': _theta,
    'random-polarized': _random_polarized,
    'wheel': _wheel,
    'complete': _complete,
    'pointed-sum': _pointed_sum,
}


def generate_family(spec, count=1):
    """Deterministic list of validated graphs for a FamilySpec (or spec string)."""
    if isinstance(spec, str):
        spec = parse_family_spec(spec)
    if spec.name not in _GENERATORS:
        raise InvalidSpec(f"unknown family {spec.name!r}")
    if count < 1:
        raise InvalidSpec('count must be >= 1')

    rng = np.random.default_rng(spec.seed)
    unit = bool(spec.param('unit', 0))
    min_genus = spec.param('min_genus', 2)
    graphs = []
    for index in range(count):
        builder = _Builder(rng, unit)
        _GENERATORS[spec.name](spec, rng, builder)
        builder.make_effective()
        first = next(iter(builder.q))
        while sum(builder.q.values()) + len(builder.edges) - len(builder.q) + 1 < min_genus:
            builder.q[first] += 1
        graphs.append(builder.build(f"{spec.name}-{spec.seed}-{index}"))
    logger.debug("generated %d graphs for family %s", len(graphs), spec.name)
    return graphs
