import json
import re

import numpy as np
import pandas as pd

from defaults import defaults
from errors import ConfigError
from logger import logger

# Explicit type mappings for every emitted CSV, keyed by schema name
SCHEMAS = {
    "trajectory": {
        "t": "float64",
        "j1": "float64",
        "j2": "float64",
        "j3": "float64",
        "e_body": "float64",
        "j_sq": "float64",
    },
    "floquet_trajectory": {
        "t": "float64",
        "j1": "float64",
        "j2": "float64",
        "j3": "float64",
        "e_body": "float64",
        "j_sq": "float64",
        "shape": str,
    },
    "ensemble": {
        "t": "float64",
        "var_major": "float64",
        "var_minor": "float64",
        "tilt_rad": "float64",
    },
    "stationary": {
        "j1": "float64",
        "j2": "float64",
        "j3": "float64",
        "energy": "float64",
        "r1": "float64",
        "r2": "float64",
        "stability": str,
        "branch": str,
    },
    "phase_diagram": {
        "omega_mag": "float64",
        "point_id": "Int64",
        "j1": "float64",
        "j2": "float64",
        "j3": "float64",
        "energy": "float64",
        "stability": str,
    },
    "spectrum": {
        "omega_mag": "float64",
        "level_index": "Int64",
        "energy": "float64",
    },
    "density": {
        "energy": "float64",
        "density": "float64",
    },
    "moments": {
        "t": "float64",
        "m1": "float64",
        "m2": "float64",
        "m3": "float64",
        "c11": "float64",
        "c12": "float64",
        "c13": "float64",
        "c22": "float64",
        "c23": "float64",
        "c33": "float64",
        "var_major": "float64",
        "var_minor": "float64",
        "tilt_rad": "float64",
        "norm": "float64",
    },
    "classical_track": {
        "t": "float64",
        "j1": "float64",
        "j2": "float64",
        "j3": "float64",
    },
    "stroboscopic": {
        "period_index": "Int64",
        "j1": "float64",
        "j2": "float64",
        "j3": "float64",
    },
    "dwell_scan": {
        "tau0": "float64",
        "escaped": "boolean",
        "escape_period": "Int64",
        "period": "Int64",
        "dispersion": "float64",
    },
}


def write_csv(df, path, schema):
    columns = list(SCHEMAS[schema])
    missing = [c for c in columns if c not in df.columns]
    if missing:
        raise KeyError(f"frame is missing {missing} for schema {schema}")
    df[columns].to_csv(path, index=False, float_format=defaults["float_format"])
    logger.debug("Wrote %s rows to %s (%s)", len(df), path, schema)
    return path


def read_csv(path, schema):
    df = pd.read_csv(path, dtype=SCHEMAS[schema])
    logger.debug("Data loaded from %s. Shape: %s", path, df.shape)
    return df


def _plain(value):
    if isinstance(value, np.ndarray):
        return value.tolist()
    if isinstance(value, np.generic):
        return value.item()
    raise TypeError(f"cannot serialize {type(value).__name__}")


def write_json(payload, path):
    with open(path, "w") as f:
        json.dump(payload, f, indent=2, sort_keys=True, default=_plain)
        f.write("\n")
    return path


def line_of(text, key):
    """1-based line of the first occurrence of ``"key":`` in a JSON text, or None."""
    pattern = re.compile(r'"' + re.escape(key) + r'"\s*:')
    for number, line in enumerate(text.splitlines(), start=1):
        if pattern.search(line):
            return number
    return None


def load_config(path):
    """Parse a JSON experiment config; returns (config dict, raw text)."""
    try:
        with open(path) as f:
            text = f.read()
    except OSError as e:
        raise ConfigError(f"cannot read config: {e.strerror}", path=path) from e
    try:
        config = json.loads(text)
    except json.JSONDecodeError as e:
        raise ConfigError(f"invalid JSON: {e.msg}", path=path, line=e.lineno) from e
    if not isinstance(config, dict):
        raise ConfigError("config must be a JSON object", path=path, line=1)
    logger.debug("Config loaded from %s: %s", path, sorted(config))
    return config, text
