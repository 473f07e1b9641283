import traceback

from data import write_csv, write_json
from floquet import BISTABLE_INITIAL, run_protocol, scan_dwell
from logger import logger


def experiment():
    """Periodic reshaping between the plate and the coaxial top, sampled once per period."""
    return {
        "fields": {
            "systems": ["protocol"],
            "required": {"initial": "vector", "periods": "int"},
            "optional": {"sample_every": ("int", None), "scan": ("grid", None), "scan_periods": ("int", 50)},
        },
        "test_inputs": {
            "kind": "floquet",
            "protocol": {"i0": 1.0, "k3": 1.0, "tau0": 45.2},
            "initial": list(BISTABLE_INITIAL.vector),
            "periods": 20,
        },
    }


def run(config, prefix, threads=1):
    try:
        protocol = config["system"]
        trajectory, record = run_protocol(
            protocol, config["initial"], config["periods"], sample_every=config["sample_every"]
        )
        report = {"protocol": protocol.to_json(), **record.summary()}
        outputs = [
            write_csv(trajectory.frame, f"{prefix}_floquet_trajectory.csv", "floquet_trajectory"),
            write_csv(record.samples, f"{prefix}_stroboscopic.csv", "stroboscopic"),
            write_json(report, f"{prefix}_floquet.json"),
        ]
        if config["scan"] is not None:
            scan = scan_dwell(protocol, config["initial"], config["scan"], config["scan_periods"], threads=threads)
            outputs.append(write_csv(scan, f"{prefix}_dwell_scan.csv", "dwell_scan"))
        return {"outputs": outputs, "summary": record.summary()}
    except Exception as e:
        logger.debug("Error running floquet: %s\n%s", e, traceback.format_exc())
        raise
