"""Graph, place and complex files, and report envelopes."""
import io
import json
import logging
import sys
from importlib import metadata
from pathlib import Path

import pandas as pd

from components.graph_core import validate
from components.root_numbers import LocalPlaceData
from utils.errors import InvalidSpec, ParseError
from utils.scalars import format_scalar, parse_scalar

logger = logging.getLogger(__name__)

SCHEMA_VERSION = 1
PACKAGE_NAME = 'admissible-graphs'


def library_version():
    try:
        return metadata.version(PACKAGE_NAME)
    except metadata.PackageNotFoundError:
        return '0.1.0'


def load_document(source):
    """JSON from a path, '-' for stdin, or an open text stream. Returns (document, location)."""
    if hasattr(source, 'read'):
        text, location = source.read(), getattr(source, 'name', '<stream>')
    elif str(source) == '-':
        text, location = sys.stdin.read(), '<stdin>'
    else:
        path = Path(source)
        try:
            text = path.read_text(encoding='utf-8')
        except OSError as e:
            raise ParseError(f"cannot read file: {e.strerror}", str(path)) from e
        location = str(path)

    try:
        return json.loads(text), location
    except json.JSONDecodeError as e:
        raise ParseError(f"invalid JSON: {e.msg}", f"{location}:{e.lineno}:{e.colno}") from e


def _require(mapping, key, location, kind=None):
    if not isinstance(mapping, dict) or key not in mapping:
        raise ParseError(f"missing field {key!r}", location)
    value = mapping[key]
    if kind is not None and not isinstance(value, kind):
        raise ParseError(f"field {key!r} must be {kind.__name__}", location)
    return value


def graph_from_document(doc, backend='exact', name='', location=''):
    """Turn a GraphFile document into a validated graph."""
    vertices = _require(doc, 'vertices', location, list)
    edges = _require(doc, 'edges', location, list)

    raw = {'vertices': [], 'edges': []}
    for k, item in enumerate(vertices):
        where = f"{location}: vertices[{k}]"
        vid = _require(item, 'id', where)
        q = item.get('q', 0)
        if isinstance(q, bool) or not isinstance(q, int):
            raise ParseError(f"q must be an integer, got {q!r}", where)
        raw['vertices'].append({'id': str(vid), 'q': q})

    for k, item in enumerate(edges):
        where = f"{location}: edges[{k}]"
        eid = _require(item, 'id', where)
        ends = _require(item, 'ends', where, list)
        length = parse_scalar(_require(item, 'length', where), backend, f"{where}.length")
        raw['edges'].append({'id': str(eid), 'ends': [str(x) for x in ends], 'length': length})

    return validate(raw, name=name or doc.get('name', '') or Path(location).stem)


def parse_graph(source, backend='exact'):
    doc, location = load_document(source)
    graph = graph_from_document(doc, backend, location=location)
    logger.info("Loaded %s: %d vertices, %d edges", graph.name, len(graph.vertices), len(graph.edges))
    return graph


def parse_graph_text(text, backend='exact', name=''):
    doc, location = load_document(io.StringIO(text))
    return graph_from_document(doc, backend, name=name, location=location)


def graph_to_dict(graph):
    doc = {
        'vertices': [{'id': v.id, 'q': v.q} for v in graph.vertices],
        'edges': [
            {'id': e.id, 'ends': list(e.ends), 'length': format_scalar(e.length)}
            for e in graph.edges
        ],
    }
    if graph.name:
        doc['name'] = graph.name
    return doc


def graph_to_json(graph):
    return json.dumps(graph_to_dict(graph), sort_keys=True)


def parse_places(source):
    """Places file: {"places": [{"kind", "g", "e", "tau"}]}."""
    doc, location = load_document(source)
    items = _require(doc, 'places', location, list)
    places = []
    for k, item in enumerate(items):
        where = f"{location}: places[{k}]"
        try:
            place = LocalPlaceData(
                kind=_require(item, 'kind', where),
                g=_require(item, 'g', where, int),
                e=item.get('e', 0),
                tau=item.get('tau', 1),
            )
        except InvalidSpec as e:
            raise ParseError(str(e), where) from e
        places.append(place.check_toric_bound())
    return places


def parse_complex_file(source, backend='exact'):
    """Complex file: two factor graph files (relative to the complex file) and function specs.

    Returns (first graph, second graph, list of function specs).
    """
    doc, location = load_document(source)
    base = Path(location).parent if not location.startswith('<') else Path('.')
    factors = _require(doc, 'factors', location, list)
    if len(factors) != 2:
        raise ParseError('a complex names exactly two factor graphs', location)
    graphs = tuple(parse_graph(base / f, backend) for f in factors)

    functions = _require(doc, 'functions', location, list)
    if len(functions) != 3:
        raise ParseError('the triple pairing needs exactly three functions', location)
    for k, spec in enumerate(functions):
        kind = _require(spec, 'kind', f"{location}: functions[{k}]", str)
        if kind not in ('divisor', 'polynomial', 'green', 'green_point'):
            raise ParseError(f"unknown function kind {kind!r}", f"{location}: functions[{k}]")
    return graphs[0], graphs[1], functions


def build_report(command, backend, payload, elapsed=None):
    """Schema-versioned envelope around a command's result."""
    report = {
        'schema_version': SCHEMA_VERSION,
        'library_version': library_version(),
        'command': command,
        'backend': backend,
        'result': payload,
    }
    if elapsed is not None:
        report['timing_seconds'] = round(elapsed, 6)
    return report


def write_json(report, stream):
    json.dump(report, stream, indent=2, sort_keys=True)
    stream.write('\n')


def write_csv(rows, stream, backend):
    """Flat rows as CSV; rational values are only representable in float mode."""
    if backend != 'float':
        raise InvalidSpec('CSV output is available in float mode only; use --float')
    pd.DataFrame(rows).to_csv(stream, index=False)
