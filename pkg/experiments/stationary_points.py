import traceback

import pandas as pd

from correspondence import TwistingConfig
from data import write_csv, write_json
from errors import NotLmgError
from logger import logger
from stationary import (
    ORACLE_KINDS,
    brute_force_stationary,
    degenerate_rings,
    lmg_curvature_radii,
    lmg_stationary_energies,
    stationary_points,
)


def experiment():
    """Stationary momenta on the sphere |J| = bigj with their stability."""
    return {
        "fields": {
            "systems": ["inertia", "twisting"],
            "required": {},
            "optional": {"bigj": ("positive", None), "oracle": ("bool", False)},
        },
        "test_inputs": {
            "kind": "stationary",
            "twisting": {"chi1": 4.0, "chi2": 3.0, "chi3": 2.0, "omega3": 3.0},
            "bigj": 1.0,
            "oracle": True,
        },
    }


def _lmg_report(cfg, bigj):
    try:
        levels = lmg_stationary_energies(cfg, bigj)
        radii = lmg_curvature_radii(cfg, bigj)
    except NotLmgError:
        return None
    return {
        "levels": [{"label": l.label, "energy": l.energy, "exists": l.exists} for l in levels],
        "radii": [{"label": r.label, "j": r.j, "r1": r.r1, "r2": r.r2} for r in radii],
    }


def _oracle_report(cfg, bigj, points):
    hits = brute_force_stationary(cfg, bigj)
    found = sorted(ORACLE_KINDS[h.kind] for h in hits)
    expected = sorted(p.stability for p in points if p.stability in ORACLE_KINDS.values())
    return {
        "hits": [{"direction": h.direction, "energy": h.energy, "kind": h.kind, "cells": h.cells} for h in hits],
        "agrees": found == expected,
    }


def run(config, prefix, threads=1):
    try:
        cfg = config["system"]
        bigj = config["bigj"]
        if bigj is None:
            if not isinstance(cfg, TwistingConfig) or cfg.n < 1:
                raise config["reader"].error("'bigj' is required without a particle count", "kind")
            bigj = cfg.j

        points = stationary_points(cfg, bigj)
        frame = pd.DataFrame(
            [(*p.vector, p.energy, p.r1, p.r2, p.stability, p.branch) for p in points],
            columns=["j1", "j2", "j3", "energy", "r1", "r2", "stability", "branch"],
        )
        report = {
            "bigj": bigj,
            "count": len(points),
            "rings": [vars(r) for r in degenerate_rings(cfg, bigj)],
            "lmg": _lmg_report(cfg, bigj),
        }
        if config["oracle"]:
            report["oracle"] = _oracle_report(cfg, bigj, points)

        outputs = [
            write_csv(frame, f"{prefix}_stationary.csv", "stationary"),
            write_json(report, f"{prefix}_stationary.json"),
        ]
        return {"outputs": outputs, "summary": {"count": len(points)}}
    except Exception as e:
        logger.debug("Error running stationary: %s\n%s", e, traceback.format_exc())
        raise
