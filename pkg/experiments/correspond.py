import traceback

from correspondence import (
    TwistingConfig,
    classical_from_quantum,
    energy_offset,
    lmg_from_twisting,
    quantum_from_classical,
    regime_of,
)
from data import write_json
from dynamics import coaxial_regime, oat_chi
from errors import NotApplicableError, NotLmgError
from logger import logger


def experiment():
    """Map a config to the other side of the body/spin correspondence."""
    return {
        "fields": {
            "systems": ["inertia", "twisting"],
            "required": {},
            "optional": {"n": ("int", 0), "bigj": ("positive", None)},
        },
        "test_inputs": {
            "kind": "correspond",
            "inertia": {"i1": 1.0, "i2": 2.0, "i3": 3.0, "k3": 0.5},
            "n": 40,
        },
    }


def _from_twisting(cfg):
    body, gauge = classical_from_quantum(cfg)
    report = {
        "twisting": cfg.to_json(),
        "inertia": body.to_json(),
        "gauge": {"chi0": gauge.chi0, "i0": gauge.i0, "total_chi0": gauge.total_chi0},
        "energy_offset": energy_offset(body),
    }
    try:
        lmg = lmg_from_twisting(cfg)
        report["lmg"] = {"epsilon": lmg.epsilon, "v": lmg.v, "w": lmg.w}
    except NotLmgError:
        logger.debug("Config has transverse linear terms; no LMG parameters")
    try:
        report["regime"] = regime_of(cfg)
    except NotApplicableError:
        logger.debug("Config is not of twist-and-turn form")
    return report


def _from_inertia(cfg, n, bigj):
    twisting = quantum_from_classical(cfg, n=n)
    report = {
        "inertia": cfg.to_json(),
        "twisting": twisting.to_json(),
        "energy_offset": energy_offset(cfg),
    }
    try:
        report["oat_chi"] = oat_chi(cfg)
        if bigj:
            report["coaxial_regime"] = coaxial_regime(cfg, bigj)
    except NotApplicableError:
        logger.debug("Not a symmetric top with coaxial rotor")
    return report


def run(config, prefix, threads=1):
    try:
        cfg = config["system"]
        if isinstance(cfg, TwistingConfig):
            report = _from_twisting(cfg)
        else:
            report = _from_inertia(cfg, config["n"], config["bigj"])
        return {"outputs": [write_json(report, f"{prefix}_correspondence.json")], "summary": {}}
    except Exception as e:
        logger.debug("Error running correspond: %s\n%s", e, traceback.format_exc())
        raise
