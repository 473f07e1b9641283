import traceback

from data import write_csv, write_json
from logger import logger
from stationary import phase_sweep


def experiment():
    """Stationary-point census along a ray of linear terms, with critical magnitudes."""
    return {
        "fields": {
            "systems": ["twisting"],
            "required": {"direction": "vector", "omega": "grid"},
            "optional": {"bigj": ("positive", None)},
        },
        "test_inputs": {
            "kind": "sweep",
            "twisting": {"chi1": 4.0, "chi2": 3.0, "chi3": 2.0},
            "direction": [0.0, 0.0, 1.0],
            "omega": {"start": 0.1, "stop": 6.0, "num": 60},
            "bigj": 1.0,
        },
    }


def run(config, prefix, threads=1):
    try:
        cfg = config["system"]
        bigj = config["bigj"]
        if bigj is None:
            if cfg.n < 1:
                raise config["reader"].error("'bigj' is required without a particle count", "kind")
            bigj = cfg.j

        diagram = phase_sweep(cfg, config["direction"], config["omega"], bigj, threads=threads)
        report = diagram.report()
        outputs = [
            write_csv(diagram.to_frame(), f"{prefix}_phase_diagram.csv", "phase_diagram"),
            write_json(report, f"{prefix}_criticals.json"),
        ]
        return {"outputs": outputs, "summary": {"criticals": diagram.criticals}}
    except Exception as e:
        logger.debug("Error running sweep: %s\n%s", e, traceback.format_exc())
        raise
