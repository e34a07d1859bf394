"""Suite execution and report assembly.

Reports are JSON documents with sorted keys.  They contain no wall-clock
data unless timings are requested, so identical configurations produce
byte-identical reports whatever the degree of parallelism.
"""

from __future__ import annotations

import json
import platform
from concurrent.futures import ProcessPoolExecutor

from .config import SUITES

__all__ = ["SCHEMA_VERSION", "run_suites", "build_report", "dump_report", "report_exit_code"]

SCHEMA_VERSION = "1.0"

_MODELS = {}


def _model_for(config):
    from .model import Model

    key = json.dumps(config, sort_keys=True)
    if key not in _MODELS:
        _MODELS.clear()
        _MODELS[key] = Model(config)
    return _MODELS[key]


def _run_one(args):
    config, suite, timings = args
    from .suites import run_suite

    return run_suite(_model_for(config), suite, config.get("tolerances"), timings)


def run_suites(config, suites=None, jobs=1, timings=False):
    """Records of every check, in canonical suite order."""
    chosen = [s for s in SUITES if s in (suites or config["suites"])]
    tasks = [(config, s, timings) for s in chosen]
    if jobs > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=min(jobs, len(tasks))) as ex:
            results = list(ex.map(_run_one, tasks))
    else:
        results = [_run_one(t) for t in tasks]
    return [rec for recs in results for rec in recs]


def _environment():
    import numpy
    import scipy

    from . import __version__

    return {
        "package": __version__,
        "python": platform.python_version(),
        "numpy": numpy.__version__,
        "scipy": scipy.__version__,
    }


def build_report(config, records):
    from .brst_states import NORMALIZATION
    from .suites import CONVENTIONS

    counts = {"pass": 0, "fail": 0, "skipped": 0, "error": 0}
    for r in records:
        key = "skipped" if r["status"].startswith("skipped") else r["status"]
        counts[key] += 1
    status = "error" if counts["error"] else ("fail" if counts["fail"] else "pass")
    return {
        "schema_version": SCHEMA_VERSION,
        "environment": _environment(),
        "config": config,
        "conventions": list(CONVENTIONS),
        "normalization": NORMALIZATION,
        "checks": records,
        "summary": dict(counts, total=len(records), status=status),
    }


def dump_report(report):
    return json.dumps(report, sort_keys=True, indent=2) + "\n"


def report_exit_code(report):
    return {"pass": 0, "fail": 1, "error": 3}[report["summary"]["status"]]
