"""Run configuration: schema, defaults and loading.

A configuration is a JSON or YAML mapping.  Missing keys take the defaults
below; the merged result is validated against ``SCHEMA`` before any
computation.  ``WORKBENCH_CONFIG`` names a default file used when no
``--config`` is given.
"""

from __future__ import annotations

import copy
import json
import math
import os
from pathlib import Path

from .errors import ConfigurationError

__all__ = ["SUITES", "DEFAULTS", "SCHEMA", "ENV_VAR", "load_config", "validate_config", "merge"]

ENV_VAR = "WORKBENCH_CONFIG"

SUITES = ("geometry", "propagation", "one_particle", "fock", "algebra", "gauge_param", "brst", "frequency")

DEFAULTS = {
    "spatial": {"dimension": 2, "divisions": 8, "length": 2.0 * math.pi},
    "time": {"window": 3.0, "samples": 400},
    "truncation": {"particles": 3, "hermite": 8, "scalar_modes": 2, "coexact_modes": 2},
    "gauge": {"kind": "random"},
    "xi": [0.5, 1.0, 2.0],
    "seed": 20240917,
    "suites": list(SUITES),
    "samples": {
        "bridge_pairs": 200,
        "frequency_pairs": 50,
        "words": 1000,
        "separation": 20,
        "brst_pairs": 20,
        "cross_pairs": 100,
        "dual_forms": 30,
        "pairs": 10,
    },
    "fock": {"npoint": [2, 4]},
    "tolerances": {},
}

_pos_int = {"type": "integer", "minimum": 1}
_pos_num = {"type": "number", "exclusiveMinimum": 0}

SCHEMA = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "type": "object",
    "additionalProperties": False,
    "properties": {
        "spatial": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "dimension": {"type": "integer", "enum": [1, 2]},
                "divisions": {"type": "integer", "minimum": 3, "maximum": 64},
                "length": _pos_num,
            },
        },
        "time": {
            "type": "object",
            "additionalProperties": False,
            "properties": {"window": _pos_num, "samples": {"type": "integer", "minimum": 16}},
        },
        "truncation": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "particles": {"type": "integer", "minimum": 1, "maximum": 6},
                "hermite": {"type": "integer", "minimum": 2, "maximum": 16},
                "scalar_modes": _pos_int,
                "coexact_modes": {"type": "integer", "minimum": 0},
            },
        },
        "gauge": {
            "type": "object",
            "additionalProperties": False,
            "properties": {"kind": {"enum": ["none", "random"]}},
        },
        "xi": {"type": "array", "items": _pos_num, "minItems": 1},
        "seed": {"type": "integer", "minimum": 0},
        "suites": {"type": "array", "items": {"enum": list(SUITES)}, "uniqueItems": True},
        "samples": {
            "type": "object",
            "additionalProperties": False,
            "properties": {k: _pos_int for k in DEFAULTS["samples"]},
        },
        "fock": {
            "type": "object",
            "additionalProperties": False,
            "properties": {"npoint": {"type": "array", "items": {"type": "integer", "minimum": 1}}},
        },
        "tolerances": {"type": "object", "additionalProperties": _pos_num},
    },
}


def merge(base, override):
    """Recursive dictionary merge; lists and scalars in ``override`` replace."""
    out = copy.deepcopy(base)
    for k, v in override.items():
        if isinstance(v, dict) and isinstance(out.get(k), dict):
            out[k] = merge(out[k], v)
        else:
            out[k] = copy.deepcopy(v)
    return out


def validate_config(cfg):
    """Raise ``ConfigurationError`` listing every schema violation by field path."""
    import jsonschema

    validator = jsonschema.Draft202012Validator(SCHEMA)
    errors = sorted(validator.iter_errors(cfg), key=lambda e: list(e.absolute_path))
    if errors:
        lines = []
        for e in errors:
            path = "/".join(str(p) for p in e.absolute_path) or "<root>"
            lines.append(f"{path}: {e.message}")
        raise ConfigurationError("invalid configuration:\n  " + "\n  ".join(lines))
    return cfg


def _read(path):
    text = Path(path).read_text()
    if str(path).endswith((".yaml", ".yml")):
        import yaml

        try:
            data = yaml.safe_load(text)
        except yaml.YAMLError as exc:
            raise ConfigurationError(f"{path}: {exc}") from exc
    else:
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ConfigurationError(f"{path}: {exc}") from exc
    if data is None:
        data = {}
    if not isinstance(data, dict):
        raise ConfigurationError(f"{path}: top level must be a mapping")
    return data


def load_config(path=None, overrides=None):
    """Defaults, then the file (``path`` or ``$WORKBENCH_CONFIG``), then ``overrides``."""
    path = path or os.environ.get(ENV_VAR)
    user = {}
    if path:
        if not Path(path).is_file():
            raise ConfigurationError(f"config file not found: {path}")
        user = _read(path)
    validate_config(user)
    cfg = merge(DEFAULTS, user)
    if overrides:
        cfg = merge(cfg, overrides)
    return validate_config(cfg)
