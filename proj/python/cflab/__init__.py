"""Continued-fraction convergence exponent laboratory."""

import json as _json

from ._cflab import *  # noqa: F401,F403
from ._cflab import run_cli

__version__ = "0.1.0"


def cli_json(*args):
    """Run a cflab command and parse its JSON output; raises on a nonzero exit."""
    code, out, err = run_cli([str(a) for a in args])
    if code != 0:
        raise RuntimeError(f"cflab exited with {code}: {err.strip()}")
    return _json.loads(out)
