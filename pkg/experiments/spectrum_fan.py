import math
import traceback

import numpy as np

from data import write_csv, write_json
from logger import logger
from quantum import build_hamiltonian, eigensystem, spectra_frame, spectral_singularities, spectrum_sweep
from stationary import stationary_points


def experiment():
    """Eigenvalue fan of the generalized LMG Hamiltonian along a ray of linear terms.

    With ``analyze_at`` set, the level density at that magnitude is compared
    with the classical stationary energies on the Casimir sphere.
    """
    return {
        "fields": {
            "systems": ["twisting"],
            "required": {"direction": "vector", "omega": "grid"},
            "optional": {"analyze_at": ("float", None)},
        },
        "test_inputs": {
            "kind": "spectrum",
            "twisting": {"chi1": 2.0, "chi2": 0.0, "chi3": -2.0, "n": 40},
            "direction": [1.0, 1.0, 1.0],
            "omega": {"start": 0.0, "stop": 2.0, "num": 21},
            "analyze_at": 0.8660254037844386,
        },
    }


def run(config, prefix, threads=1):
    try:
        cfg = config["system"]
        if cfg.n < 1:
            raise config["reader"].error("'twisting' needs a particle count 'n' >= 1", "twisting")
        bigj = cfg.j
        spectra = spectrum_sweep(cfg, config["direction"], config["omega"], threads=threads)
        outputs = [
            write_csv(spectra_frame(spectra, config["omega"], bigj), f"{prefix}_spectrum.csv", "spectrum"),
        ]
        summary = {"levels": cfg.n + 1, "grid": len(spectra)}

        if config["analyze_at"] is not None:
            direction = np.asarray(config["direction"]) / np.linalg.norm(config["direction"])
            point = cfg.with_omega(config["analyze_at"] * direction)
            spectrum = eigensystem(build_hamiltonian(point), config=point)
            casimir = math.sqrt(bigj * (bigj + 1.0))
            classical = stationary_points(point, casimir)
            report = spectral_singularities(spectrum, classical)
            payload = report.to_json()
            payload["config"] = point.to_json()
            payload["casimir_radius"] = casimir
            payload["mean_spacing"] = spectrum.mean_spacing
            outputs.append(write_csv(report.density, f"{prefix}_density.csv", "density"))
            outputs.append(write_json(payload, f"{prefix}_singularities.json"))
            summary["max_offset_spacings"] = float(report.matches["offset_spacings"].max())

        return {"outputs": outputs, "summary": summary}
    except Exception as e:
        logger.debug("Error running spectrum: %s\n%s", e, traceback.format_exc())
        raise
