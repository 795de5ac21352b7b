from pathlib import Path

import pytest

from utils.config import Settings, load_settings
from utils.errors import ConfigError


def test_defaults():
    settings = load_settings({})
    assert settings == Settings()
    assert settings.backend == 'exact'
    assert settings.report_dir == Path('reports')


def test_environment_overrides():
    settings = load_settings({
        'ADMISSIBLE_BACKEND': ' Float ',
        'ADMISSIBLE_WORKERS': '4',
        'ADMISSIBLE_TOLERANCE': '1e-6',
        'ADMISSIBLE_REPORT_DIR': '/tmp/out',
    })
    assert (settings.backend, settings.workers, settings.tolerance) == ('float', 4, 1e-6)
    assert settings.report_dir == Path('/tmp/out')


@pytest.mark.parametrize('environ', [
    {'ADMISSIBLE_WORKERS': 'many'},
    {'ADMISSIBLE_WORKERS': '0'},
    {'ADMISSIBLE_BACKEND': 'decimal'},
    {'ADMISSIBLE_TOLERANCE': '-1'},
])
def test_bad_environment(environ):
    with pytest.raises(ConfigError):
        load_settings(environ)


def test_overrides_skip_none():
    settings = Settings().with_overrides(backend=None, workers=2)
    assert (settings.backend, settings.workers) == ('exact', 2)
    with pytest.raises(ConfigError):
        Settings().with_overrides(backend='decimal')
