"""Logging setup for the command-line tools."""
import logging
import sys

LOG_FORMAT = '%(asctime)s %(levelname)-7s %(name)s: %(message)s'


def configure_logging(verbosity=0):
    """verbosity < 0 -> WARNING, 0 -> INFO, > 0 -> DEBUG. Logs go to stderr."""
    if verbosity < 0:
        level = logging.WARNING
    elif verbosity == 0:
        level = logging.INFO
    else:
        level = logging.DEBUG

    root = logging.getLogger()
    root.handlers.clear()
    handler = logging.StreamHandler(sys.stderr)
    handler.setFormatter(logging.Formatter(LOG_FORMAT, datefmt='%H:%M:%S'))
    root.addHandler(handler)
    root.setLevel(level)
    return root
