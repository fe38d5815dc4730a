"""Numerical defaults shipped as package data.

The defaults are read once from ``defaults.json`` next to this module. The
module level :py:data:`defaults` instance is shared by all modules (only one
instance exists).
"""

import json
import os

_CONFIG_NAME = 'defaults.json'


def _load_defaults():
    """Load the default tolerances and solver parameters.

    Returns:
        dict: defaults by section.
    """
    path = os.path.dirname(os.path.abspath(__file__))
    with open(os.path.join(path, _CONFIG_NAME), 'r') as cfg_file:
        config = json.load(cfg_file)
    return config


def thread_count():
    """Get the worker cap for parallel mode solves.

    The environment variable ``TORSIONCTL_THREADS`` overrides the packaged
    default.

    Returns:
        int: number of worker threads (at least 1).
    """
    env_value = os.environ.get("TORSIONCTL_THREADS")
    if env_value:
        try:
            return max(1, int(env_value))
        except ValueError:
            raise ValueError("Invalid TORSIONCTL_THREADS: %s" % env_value)
    return max(1, int(defaults["threads"]))


defaults = _load_defaults()
