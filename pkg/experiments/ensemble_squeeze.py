import traceback

import numpy as np

from correspondence import TwistingConfig
from data import write_csv, write_json
from dynamics import EnsembleCone, ensemble_squeeze
from logger import logger
from quantum import classical_track, evolve_moments, spin_coherent_state


def experiment():
    """Squeezing of a cone of classical momenta, or of a spin coherent state."""
    return {
        "fields": {
            "systems": ["inertia", "twisting"],
            "required": {},
            "optional": {},
            "by_system": {
                "inertia": {
                    "required": {
                        "center": "vector",
                        "half_angle": "float",
                        "count": "int",
                        "magnitude": "float",
                        "dt": "float",
                        "steps": "int",
                    },
                    "optional": {"every": ("int", 1)},
                },
                "twisting": {
                    "required": {"theta": "float", "phi": "float", "times": "grid"},
                    "optional": {},
                },
            },
        },
        "test_inputs": {
            "kind": "ensemble",
            "twisting": {"chi1": 0.0, "chi2": 0.0, "chi3": 1.0, "n": 100},
            "theta": 1.5707963267948966,
            "phi": 0.0,
            "times": {"start": 0.0, "stop": 0.05, "num": 11},
        },
    }


def _classical(config, prefix):
    cone = EnsembleCone.build(config["center"], config["half_angle"], config["count"], config["magnitude"])
    frame = ensemble_squeeze(cone, config["system"], config["dt"], config["steps"], every=config["every"])
    outputs = [write_csv(frame, f"{prefix}_ensemble.csv", "ensemble")]
    return {"outputs": outputs, "summary": {"samples": len(frame)}}


def _quantum(config, prefix):
    cfg = config["system"]
    if cfg.n < 1:
        raise config["reader"].error("'twisting' needs a particle count 'n' >= 1", "twisting")
    state = spin_coherent_state(config["theta"], config["phi"], cfg.n)
    moments = evolve_moments(state, cfg, config["times"])
    track = classical_track(config["theta"], config["phi"], cfg, config["times"])
    gap = np.linalg.norm(moments[["m1", "m2", "m3"]].to_numpy() - track[["j1", "j2", "j3"]].to_numpy(), axis=1)
    summary = {
        "samples": len(moments),
        "max_norm_drift": float(np.max(np.abs(moments["norm"] - 1.0))),
        "max_classical_gap_over_j": float(np.max(gap) / cfg.j),
    }
    outputs = [
        write_csv(moments, f"{prefix}_moments.csv", "moments"),
        write_csv(track, f"{prefix}_classical.csv", "classical_track"),
        write_json(summary, f"{prefix}_summary.json"),
    ]
    return {"outputs": outputs, "summary": summary}


def run(config, prefix, threads=1):
    try:
        if isinstance(config["system"], TwistingConfig):
            return _quantum(config, prefix)
        return _classical(config, prefix)
    except Exception as e:
        logger.debug("Error running ensemble: %s\n%s", e, traceback.format_exc())
        raise
