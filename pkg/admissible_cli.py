"""Command-line entry point: invariants, decompositions, bound checks, triple pairings, root numbers.

Exit codes: 0 success, 1 input error, 2 internal assertion failure, 3 a bound check found a
violation (the batch still completes and is reported).
"""
import argparse
import logging
import sys
import time

from components.admissible import invariant_bundle
from components.cell_functions import (
    CellFunction, continuous_triple, green_identity_report, green_point_function,
    green_product_function,
)
from components.closed_forms import additive_bundle
from components.conjectures import (
    BOUNDS, generate_family, parse_family_spec, run_batch, summarize_reports,
)
from components.graph_core import BRIDGE, decompose_pointed_sum, genus, validate
from components.lattice import (
    ProductComplex, discrete_triple, divisor_from_values, pullback_subdivide, sample_divisor,
)
from components.root_numbers import (
    PlaceKind, archimedean_L_factor, global_epsilon, hodge_numbers, local_epsilon,
)
from utils.config import load_settings
from utils.errors import (
    AdmissibleError, BadFlag, InputError, InvalidSpec, InvariantAssertionError, UnknownCommand,
)
from utils.graph_io import (
    build_report, parse_complex_file, parse_graph, parse_places, write_csv, write_json,
)
from utils.log import configure_logging
from utils.scalars import convert, format_scalar, parse_scalar

logger = logging.getLogger('admissible_cli')

EXIT_OK = 0
EXIT_INPUT = 1
EXIT_ASSERTION = 2
EXIT_VIOLATION = 3


class _Parser(argparse.ArgumentParser):
    """argparse that raises instead of exiting, so every failure maps to our exit codes."""

    def error(self, message):
        if message.startswith('argument command'):
            raise UnknownCommand(message)
        raise BadFlag(message)


def _common_flags():
    """Flags every subcommand accepts after its positional arguments."""
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument('-v', '--verbose', action='count', default=0)
    common.add_argument('-q', '--quiet', action='store_true')
    common.add_argument('--timing', action='store_true', help='include wall-clock timing in the report')
    backend = common.add_mutually_exclusive_group()
    backend.add_argument('--exact', dest='backend', action='store_const', const='exact')
    backend.add_argument('--float', dest='backend', action='store_const', const='float')
    fmt = common.add_mutually_exclusive_group()
    fmt.add_argument('--json', dest='format', action='store_const', const='json')
    fmt.add_argument('--csv', dest='format', action='store_const', const='csv')
    return common


def build_parser():
    parser = _Parser(prog='admissible', description=__doc__.splitlines()[0])
    common = _common_flags()
    commands = parser.add_subparsers(dest='command', required=True)

    p = commands.add_parser('invariants', parents=[common], help='τ, ε, φ, λ of a graph file')
    p.add_argument('file')
    p.add_argument('--additive', action='store_true', help='also sum over the pointed-sum components')

    p = commands.add_parser('decompose', parents=[common], help='pointed-sum decomposition')
    p.add_argument('file')

    p = commands.add_parser('check', parents=[common], help='conjectural bounds on a file or a family')
    p.add_argument('file', nargs='?')
    p.add_argument('--family')
    p.add_argument('--count', type=int, default=10)
    p.add_argument('--seed', type=int, default=0)
    p.add_argument('--bound', choices=BOUNDS, default='phi')
    p.add_argument('--c', dest='constant')
    p.add_argument('--workers', type=int)

    p = commands.add_parser('triple', parents=[common], help='triple pairing on a product complex')
    p.add_argument('file')
    p.add_argument('--level', type=int, default=1)
    p.add_argument('--continuous', action='store_true')

    p = commands.add_parser('identities', parents=[common], help='Green-function triple identities on Γ × Γ')
    p.add_argument('file')
    p.add_argument('--vertex', required=True)
    p.add_argument('--level', type=int, default=8)

    p = commands.add_parser('epsilon', parents=[common], help='local and global root numbers')
    p.add_argument('--places', required=True)

    p = commands.add_parser('lfactor', parents=[common], help='archimedean L-factor')
    p.add_argument('--genus', type=int, required=True)
    p.add_argument('--s', type=float, required=True)
    p.add_argument('--kind', choices=[k.value for k in PlaceKind if k is not PlaceKind.NONARCH],
                   default='complex')
    p.add_argument('--log', action='store_true')
    return parser


def _with_backend(graph, backend):
    if graph.backend == backend:
        return graph
    raw = {
        'vertices': [{'id': v.id, 'q': v.q} for v in graph.vertices],
        'edges': [{'id': e.id, 'ends': list(e.ends), 'length': convert(e.length, backend)}
                  for e in graph.edges],
    }
    return validate(raw, name=graph.name)


def _flatten(record):
    row = {}
    for key, value in record.items():
        if isinstance(value, dict):
            for inner, v in value.items():
                row[f"{key}_{inner}"] = v
        else:
            row[key] = value
    return row


def cmd_invariants(args, settings):
    graph = parse_graph(args.file, settings.backend)
    bundle = invariant_bundle(graph)
    record = {'graph': graph.name, **bundle.as_record(serialize=True)}
    if args.additive:
        additive = additive_bundle(graph)
        record['additive'] = additive.as_record(serialize=True)
        if additive.as_record() != bundle.as_record() and settings.backend == 'exact':
            raise InvariantAssertionError(f"{graph.name}: component sums differ from direct values")
    return record, [_flatten({k: v for k, v in record.items() if k != 'additive'})], EXIT_OK


def cmd_decompose(args, settings):
    graph = parse_graph(args.file, settings.backend)
    rows = []
    for component in decompose_pointed_sum(graph):
        piece = component.graph
        rows.append({
            'kind': component.kind,
            'edges': [e.id for e in piece.edges],
            'attachments': component.attachments,
            'genus': genus(piece),
            'length': format_scalar(piece.total_length),
        })
    record = {
        'graph': graph.name,
        'genus': genus(graph),
        'bridges': sum(1 for r in rows if r['kind'] == BRIDGE),
        'components': rows,
    }
    flat = [{**r, 'edges': ' '.join(r['edges']), 'attachments': str(r['attachments'])} for r in rows]
    return record, flat, EXIT_OK


def cmd_check(args, settings):
    if bool(args.file) == bool(args.family):
        raise BadFlag('check needs either a graph file or --family')
    constant = parse_scalar(args.constant, 'exact', '--c') if args.constant else None
    if args.family:
        spec = parse_family_spec(args.family, seed=args.seed)
        graphs = generate_family(spec, args.count)
    else:
        graphs = [parse_graph(args.file, settings.backend)]
    graphs = [_with_backend(g, settings.backend) for g in graphs]
    if constant is not None:
        constant = convert(constant, settings.backend)

    reports = run_batch(graphs, args.bound, constant, workers=args.workers or settings.workers)
    records = [r.as_record(serialize=True) for r in reports]
    record = {'summary': summarize_reports(reports), 'reports': records}
    code = EXIT_VIOLATION if any(r.violated for r in reports) else EXIT_OK
    return record, records, code


def _polynomial_sampler(coefficients, first, second):
    def f(cell, s, t):
        u = s * first.edge(cell[0]).length
        v = t * second.edge(cell[1]).length
        return sum(c * u ** i * v ** j
                   for i, row in enumerate(coefficients) for j, c in enumerate(row))
    return f


def _parse_coefficients(spec, backend, where):
    rows = spec.get('coefficients')
    if not isinstance(rows, list) or not rows:
        raise InvalidSpec(f"{where}: polynomial needs a nested 'coefficients' list")
    return [[parse_scalar(c, backend, where) for c in row] for row in rows]


def _divisor(spec, complex_, backend, where):
    corners = {(a, b): parse_scalar(c, backend, where) for a, b, c in spec.get('corners', [])}
    centers = {(a, b): parse_scalar(c, backend, where) for a, b, c in spec.get('centers', [])}
    return divisor_from_values(complex_, corners, centers)


def _discrete(spec, complex_, level, backend, where):
    kind = spec['kind']
    if kind == 'divisor':
        return pullback_subdivide(_divisor(spec, complex_, backend, where), level)
    if kind == 'polynomial':
        coefficients = _parse_coefficients(spec, backend, where)
        return sample_divisor(complex_.at_level(level),
                              _polynomial_sampler(coefficients, complex_.first, complex_.second))
    return _continuous(spec, complex_, backend, where).to_divisor(level)


def _continuous(spec, complex_, backend, where):
    kind = spec['kind']
    first, second = complex_.first, complex_.second
    if kind == 'divisor':
        return CellFunction.from_divisor(_divisor(spec, complex_, backend, where))
    if kind == 'polynomial':
        return CellFunction.from_polynomial(first, second, _parse_coefficients(spec, 'float', where))
    if first != second:
        raise InvalidSpec(f"{where}: Green functions live on Γ × Γ; the two factors differ")
    if kind == 'green':
        return green_product_function(first)
    return green_point_function(first, str(spec.get('vertex', '')), int(spec.get('side', 1)))


def cmd_triple(args, settings):
    if args.level < 1:
        raise BadFlag('--level must be >= 1')
    first, second, specs = parse_complex_file(args.file, settings.backend)
    complex_ = ProductComplex(first, second, 1)
    where = [f"functions[{k}]" for k in range(3)]

    divisors = [_discrete(s, complex_, args.level, settings.backend, w) for s, w in zip(specs, where)]
    value = discrete_triple(*divisors)
    record = {'factors': [first.name, second.name], 'level': args.level, 'discrete': format_scalar(value)}
    if args.continuous:
        functions = [_continuous(s, complex_, settings.backend, w) for s, w in zip(specs, where)]
        record['continuous'] = format_scalar(continuous_triple(*functions, order=settings.quadrature_order))
    return record, [record], EXIT_OK


def cmd_identities(args, settings):
    graph = parse_graph(args.file, settings.backend)
    rows = green_identity_report(graph, args.vertex, args.level, settings.quadrature_order)
    return {'graph': graph.name, 'rows': rows}, rows, EXIT_OK


def cmd_epsilon(args, settings):
    places = parse_places(args.places)
    locals_ = [{**p.as_record(), 'epsilon': local_epsilon(p)} for p in places]
    return {'locals': locals_, 'global': global_epsilon(places)}, locals_, EXIT_OK


def cmd_lfactor(args, settings):
    value = archimedean_L_factor(args.genus, args.s, args.kind, log=args.log)
    h, h_prime = hodge_numbers(args.genus)
    record = {
        'genus': args.genus,
        's': args.s,
        'kind': args.kind,
        'hodge': [h, h_prime],
        'log_abs' if args.log else 'value': value,
    }
    return record, [record], EXIT_OK


COMMANDS = {
    'invariants': cmd_invariants,
    'decompose': cmd_decompose,
    'check': cmd_check,
    'triple': cmd_triple,
    'identities': cmd_identities,
    'epsilon': cmd_epsilon,
    'lfactor': cmd_lfactor,
}


def run_command(argv, stdout=None, stderr=None):
    """Parse argv, run one command and write its report. Returns the exit code."""
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    try:
        args = build_parser().parse_args(argv)
        configure_logging(-1 if args.quiet else args.verbose)
        settings = load_settings().with_overrides(backend=args.backend, workers=getattr(args, 'workers', None))
        fmt = args.format or 'json'

        started = time.perf_counter()
        record, rows, code = COMMANDS[args.command](args, settings)
        elapsed = time.perf_counter() - started if args.timing else None

        if fmt == 'csv':
            write_csv(rows, stdout, settings.backend)
        else:
            write_json(build_report(args.command, settings.backend, record, elapsed), stdout)
        return code
    except InputError as e:
        print(f"error: {e}", file=stderr)
        return EXIT_INPUT
    except InvariantAssertionError as e:
        print(f"internal assertion failed: {e}", file=stderr)
        return EXIT_ASSERTION
    except AdmissibleError as e:
        print(f"error: {e}", file=stderr)
        return EXIT_ASSERTION


def main():
    sys.exit(run_command(sys.argv[1:]))


if __name__ == "__main__":
    main()
