import traceback

import numpy as np

from data import write_csv, write_json
from dynamics import count_flips, integrate, wobble_ratio
from errors import NotApplicableError
from logger import logger


def experiment():
    """Fixed-step integration of one momentum under an inertia config."""
    return {
        "fields": {
            "systems": ["inertia"],
            "required": {"initial": "vector", "dt": "float", "steps": "int"},
            "optional": {"every": ("int", 1), "renormalize": ("bool", False)},
        },
        "test_inputs": {
            "kind": "simulate",
            "inertia": {"i1": 1.0, "i2": 1.0, "i3": 2.0},
            "initial": [0.05, 0.0, 2.0],
            "dt": 1e-3,
            "steps": 2000,
            "every": 10,
        },
    }


def _drift(values):
    return float(np.max(np.abs(values - values[0])) / abs(values[0])) if values[0] else 0.0


def run(config, prefix, threads=1):
    try:
        cfg = config["system"]
        trajectory = integrate(
            config["initial"],
            cfg,
            config["dt"],
            config["steps"],
            renormalize=config["renormalize"],
            every=config["every"],
        )
        frame = trajectory.frame
        summary = {
            "samples": len(frame),
            "e_body_drift": _drift(frame["e_body"].to_numpy()),
            "j_sq_drift": _drift(frame["j_sq"].to_numpy()),
            "flips": {f"j{axis}": count_flips(trajectory, axis) for axis in (1, 2, 3)},
        }
        try:
            summary["wobble_ratio"] = wobble_ratio(trajectory, cfg)
        except NotApplicableError:
            logger.debug("No wobble ratio: not a symmetric top with coaxial rotor")

        logger.debug("Simulation summary: %s", summary)
        outputs = [
            write_csv(frame, f"{prefix}_trajectory.csv", "trajectory"),
            write_json(summary, f"{prefix}_summary.json"),
        ]
        return {"outputs": outputs, "summary": summary}
    except Exception as e:
        logger.debug("Error running simulate: %s\n%s", e, traceback.format_exc())
        raise
