import math

import numpy as np

from correspondence import TwistingConfig
from data import line_of
from dynamics import InertiaConfig
from errors import ConfigError, EulerTopError
from floquet import FloquetProtocol
from logger import logger


class SYSTEM_KEYS:
    inertia = "inertia"
    twisting = "twisting"
    protocol = "protocol"


SYSTEM_FIELDS = {
    SYSTEM_KEYS.inertia: {"required": ["i1", "i2", "i3"], "optional": ["k1", "k2", "k3"]},
    SYSTEM_KEYS.twisting: {"required": ["chi1", "chi2", "chi3"], "optional": ["omega1", "omega2", "omega3", "n"]},
    SYSTEM_KEYS.protocol: {"required": ["i0", "k3", "tau0"], "optional": ["tau_swap", "steps_per_period"]},
}


class ConfigReader:
    """Field access on one parsed config with errors anchored to its source lines."""

    def __init__(self, config, text="", path=None):
        self.config = config
        self.text = text
        self.path = path

    def error(self, message, key=None):
        line = line_of(self.text, key) if key else None
        return ConfigError(message, path=self.path, line=line)

    def _number(self, value, key, kind):
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise self.error(f"'{key}' must be a number, got {value!r}", key)
        if kind == "int":
            if float(value) != int(value):
                raise self.error(f"'{key}' must be an integer, got {value!r}", key)
            return int(value)
        if not math.isfinite(value):
            raise self.error(f"'{key}' must be finite", key)
        return float(value)

    def _vector(self, value, key):
        if not isinstance(value, list) or len(value) != 3:
            raise self.error(f"'{key}' must be a list of three numbers", key)
        return np.array([self._number(v, key, "float") for v in value])

    def _grid(self, value, key):
        if isinstance(value, dict):
            missing = [k for k in ("start", "stop", "num") if k not in value]
            if missing:
                raise self.error(f"'{key}' grid is missing {missing}", key)
            grid = np.linspace(
                self._number(value["start"], key, "float"),
                self._number(value["stop"], key, "float"),
                self._number(value["num"], key, "int"),
            )
        elif isinstance(value, list) and value:
            grid = np.array([self._number(v, key, "float") for v in value])
        else:
            raise self.error(f"'{key}' must be a list or a {{start, stop, num}} grid", key)
        if len(grid) > 1 and np.any(np.diff(grid) <= 0):
            raise self.error(f"'{key}' must be strictly ascending", key)
        return grid

    def value(self, key, kind, default=None, required=False):
        if key not in self.config:
            if required:
                raise self.error(f"missing required field '{key}'", "kind")
            return default
        raw = self.config[key]
        if kind in ("float", "int"):
            return self._number(raw, key, kind)
        if kind == "positive":
            number = self._number(raw, key, "float")
            if number <= 0.0:
                raise self.error(f"'{key}' must be positive, got {raw!r}", key)
            return number
        if kind == "bool":
            if not isinstance(raw, bool):
                raise self.error(f"'{key}' must be true or false", key)
            return raw
        if kind == "vector":
            return self._vector(raw, key)
        if kind == "grid":
            return self._grid(raw, key)
        if kind == "str":
            if not isinstance(raw, str):
                raise self.error(f"'{key}' must be a string", key)
            return raw
        raise ValueError(f"unknown field kind {kind}")

    def resolve(self, fields):
        """Validate the kind-specific fields and return them with defaults applied."""
        resolved = {}
        for key, kind in fields.get("required", {}).items():
            resolved[key] = self.value(key, kind, required=True)
        for key, (kind, default) in fields.get("optional", {}).items():
            resolved[key] = self.value(key, kind, default=default)
        return resolved

    def system(self, allowed):
        """Build the single system parameterization the config carries."""
        present = [key for key in SYSTEM_FIELDS if key in self.config]
        if len(present) != 1:
            anchor = present[1] if len(present) > 1 else "kind"
            raise self.error(f"expected exactly one of {sorted(allowed)}, found {present}", anchor)
        key = present[0]
        if key not in allowed:
            raise self.error(f"'{key}' is not accepted here; use one of {sorted(allowed)}", key)
        section = self.config[key]
        if not isinstance(section, dict):
            raise self.error(f"'{key}' must be an object", key)
        spec = SYSTEM_FIELDS[key]
        missing = [f for f in spec["required"] if f not in section]
        unknown = [f for f in section if f not in spec["required"] + spec["optional"]]
        if missing:
            raise self.error(f"'{key}' is missing {missing}", key)
        if unknown:
            raise self.error(f"'{key}' has unknown fields {unknown}", unknown[0])
        for field_name, raw in section.items():
            kind = "int" if field_name in ("n", "steps_per_period") else "float"
            self._number(raw, field_name, kind)

        logger.debug("System section %s: %s", key, section)
        try:
            if key == SYSTEM_KEYS.inertia:
                return InertiaConfig.from_json(section)
            if key == SYSTEM_KEYS.twisting:
                return TwistingConfig.from_json(section)
            return FloquetProtocol.build(
                section["i0"],
                section["k3"],
                section["tau0"],
                tau_swap=section.get("tau_swap"),
                steps_per_period=section.get("steps_per_period"),
            )
        except EulerTopError as e:
            raise self.error(f"invalid '{key}': {e}", key) from e

    def prepare(self, fields):
        """Validate everything an experiment needs before any computation runs."""
        system = self.system(fields["systems"])
        key = next(k for k in SYSTEM_FIELDS if k in self.config)
        extra = fields.get("by_system", {}).get(key, {})
        merged = {
            "required": {**fields.get("required", {}), **extra.get("required", {})},
            "optional": {**fields.get("optional", {}), **extra.get("optional", {})},
        }
        known = set(merged["required"]) | set(merged["optional"]) | {"kind", "description", "out", key}
        unknown = [k for k in self.config if k not in known]
        if unknown:
            raise self.error(f"unknown fields {unknown}", unknown[0])
        resolved = self.resolve(merged)
        resolved["system"] = system
        resolved["reader"] = self
        return resolved
