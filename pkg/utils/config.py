"""Runtime settings read from the environment."""
import os
from dataclasses import dataclass, replace
from pathlib import Path

from utils.errors import ConfigError

BACKENDS = ('exact', 'float')


@dataclass(frozen=True)
class Settings:
    backend: str = 'exact'
    tolerance: float = 1e-10
    quadrature_order: int = 5
    workers: int = 1
    report_dir: Path = Path('reports')

    def with_overrides(self, **changes):
        """Return a copy with the non-None overrides applied."""
        changes = {k: v for k, v in changes.items() if v is not None}
        updated = replace(self, **changes)
        _check(updated)
        return updated


def _check(settings):
    if settings.backend not in BACKENDS:
        raise ConfigError(f"backend must be one of {BACKENDS}, got {settings.backend!r}")
    if settings.tolerance <= 0:
        raise ConfigError('tolerance must be positive')
    if settings.quadrature_order < 1:
        raise ConfigError('quadrature_order must be >= 1')
    if settings.workers < 1:
        raise ConfigError('workers must be >= 1')


def load_settings(environ=None):
    """Build Settings from ADMISSIBLE_* environment variables."""
    environ = os.environ if environ is None else environ
    values = {}
    try:
        if 'ADMISSIBLE_BACKEND' in environ:
            values['backend'] = environ['ADMISSIBLE_BACKEND'].strip().lower()
        if 'ADMISSIBLE_TOLERANCE' in environ:
            values['tolerance'] = float(environ['ADMISSIBLE_TOLERANCE'])
        if 'ADMISSIBLE_WORKERS' in environ:
            values['workers'] = int(environ['ADMISSIBLE_WORKERS'])
        if 'ADMISSIBLE_REPORT_DIR' in environ:
            values['report_dir'] = Path(environ['ADMISSIBLE_REPORT_DIR'])
    except ValueError as e:
        raise ConfigError(f"Bad environment setting: {e}") from e

    settings = Settings(**values)
    _check(settings)
    return settings
