"""Two-way map between rigid-body parameters (I, K) and collective-spin
parameters (chi, Omega), gauge freedom, and the LMG parameterization.

chi_k = -1/(2 I_k), Omega_k = K_k / I_k. A constant added to every chi_k
only shifts the Hamiltonian by chi0 * J^2 and leaves the dynamics alone.
"""
import math
from dataclasses import dataclass, replace

import numpy as np

from defaults import defaults
from dynamics import InertiaConfig
from errors import InvalidGaugeError, NotApplicableError, NotLmgError
from logger import logger


@dataclass(frozen=True)
class TwistingConfig:
    chi1: float
    chi2: float
    chi3: float
    omega1: float = 0.0
    omega2: float = 0.0
    omega3: float = 0.0
    n: int = 0

    @property
    def chi(self):
        return np.array([self.chi1, self.chi2, self.chi3])

    @property
    def omega(self):
        return np.array([self.omega1, self.omega2, self.omega3])

    @property
    def j(self):
        return self.n / 2.0

    def with_omega(self, omega):
        o = np.asarray(omega, dtype=float)
        return replace(self, omega1=float(o[0]), omega2=float(o[1]), omega3=float(o[2]))

    def with_chi(self, chi):
        c = np.asarray(chi, dtype=float)
        return replace(self, chi1=float(c[0]), chi2=float(c[1]), chi3=float(c[2]))

    def to_json(self):
        return {
            "chi1": self.chi1, "chi2": self.chi2, "chi3": self.chi3,
            "omega1": self.omega1, "omega2": self.omega2, "omega3": self.omega3,
            "n": self.n,
        }

    @classmethod
    def from_json(cls, payload):
        n = payload.get("n")
        if n is None and "j" in payload:
            n = int(round(2 * float(payload["j"])))
        return cls(
            float(payload.get("chi1", 0.0)),
            float(payload.get("chi2", 0.0)),
            float(payload.get("chi3", 0.0)),
            float(payload.get("omega1", 0.0)),
            float(payload.get("omega2", 0.0)),
            float(payload.get("omega3", 0.0)),
            int(n or 0),
        )


@dataclass(frozen=True)
class LmgParams:
    epsilon: float
    v: float
    w: float


@dataclass(frozen=True)
class Gauge:
    """Gauge constants used when mapping a twisting config to a body.

    ``chi0`` is the additive shift applied before inversion; ``i0`` is the
    extra moment of the triangle repair, or None when no repair was needed.
    """
    chi0: float
    i0: float = None

    @property
    def total_chi0(self):
        if self.i0 is None:
            return self.chi0
        return self.chi0 - 1.0 / (2.0 * self.i0)


def quantum_from_classical(cfg, n=0):
    moments = cfg.moments
    chi = -1.0 / (2.0 * moments)
    omega = cfg.rotor / moments
    return TwistingConfig(*chi, *omega, n=n)


def _repair_bound(moments):
    a = int(np.argmax(moments))
    b, c = [k for k in range(3) if k != a]
    ia, ib, ic = moments[a], moments[b], moments[c]
    excess = ia - ib - ic
    return (ib * ic + math.sqrt((ib * ic) ** 2 + ia * ib * ic * excess)) / excess


def classical_from_quantum(cfg):
    """Return a physical InertiaConfig with the same vector field, plus the Gauge used."""
    chi = cfg.chi
    spread = float(np.max(np.abs(chi)))
    unit = min(1.0, spread) if spread > 0.0 else 1.0
    chi0 = -float(np.max(chi)) - unit
    shifted = chi + chi0
    moments = -1.0 / (2.0 * shifted)
    rotor = -cfg.omega / (2.0 * shifted)
    body = InertiaConfig.formal(*moments, *rotor)
    if body.satisfies_triangle():
        return body, Gauge(chi0=chi0)

    i0 = 0.5 * _repair_bound(moments)
    logger.debug("Triangle repair of moments %s with i0=%s", moments, i0)
    repaired, _ = gauge_shift_classical(body, i0)
    return InertiaConfig.physical(*repaired.moments, *repaired.rotor), Gauge(chi0=chi0, i0=i0)


def gauge_shift_quantum(cfg, chi0):
    return cfg.with_chi(cfg.chi + chi0)


def gauge_shift_classical(cfg, i0, bigj=0.0):
    """Apply 1/I_k -> 1/I_k + 1/i0; returns (shifted config, energy offset at |J| = bigj)."""
    if i0 == 0 or not math.isfinite(i0):
        raise InvalidGaugeError(f"gauge moment must be finite and non-zero, got {i0}")
    moments = cfg.moments
    inverse = 1.0 / moments + 1.0 / i0
    if np.any(inverse <= 0.0):
        raise InvalidGaugeError(f"gauge i0={i0} makes a moment of {moments} non-positive")
    shifted = 1.0 / inverse
    rotor = cfg.rotor / (1.0 + moments / i0)
    offset = bigj**2 / (2.0 * i0) - float(np.sum(cfg.rotor**2 / (2.0 * (i0 + moments))))
    return InertiaConfig.formal(*shifted, *rotor), offset


def twisting_rates(state, cfg):
    """Classical limit of the Heisenberg equations for sum chi J^2 + Omega J."""
    j = state.vector if hasattr(state, "vector") else np.asarray(state, dtype=float)
    gradient = 2.0 * cfg.chi * j + cfg.omega
    return np.cross(gradient, j)


def hamiltonian_energy(state, cfg):
    j = state.vector if hasattr(state, "vector") else np.asarray(state, dtype=float)
    return float(np.sum(cfg.chi * j**2 + cfg.omega * j))


def energy_offset(cfg):
    """Constant relating the two energies: H = -E_body + offset."""
    return float(np.sum(cfg.rotor**2 / (2.0 * cfg.moments)))


def lmg_from_twisting(cfg):
    if cfg.omega1 != 0.0 or cfg.omega2 != 0.0:
        raise NotLmgError(f"transverse linear terms ({cfg.omega1}, {cfg.omega2}) present")
    return LmgParams(
        epsilon=cfg.omega3,
        v=(cfg.chi1 - cfg.chi2) / 2.0,
        w=(cfg.chi1 + cfg.chi2) / 2.0 - cfg.chi3,
    )


def twisting_from_lmg(params, n=0):
    return TwistingConfig(params.w + params.v, params.w - params.v, 0.0, 0.0, 0.0, params.epsilon, n=n)


def classify_regime(chi, omega, n, band=None):
    """Rabi / Josephson / Fock label of a twist-and-turn pair; chi = 0 counts as Rabi."""
    band = defaults["regime_band"] if band is None else band
    if chi == 0:
        return "Rabi"
    ratio = abs(omega / chi)
    for edge in (n, 1.0 / n):
        if abs(ratio - edge) <= band * edge:
            return "boundary"
    if ratio > n:
        return "Rabi"
    if ratio < 1.0 / n:
        return "Fock"
    return "Josephson"


def twist_and_turn_form(cfg, tol=None):
    """Reduce a config with two equal chi and Omega perpendicular to the odd axis to (chi, Omega)."""
    tol = defaults["symmetric_top_tolerance"] if tol is None else tol
    chi = cfg.chi
    scale = max(float(np.max(np.abs(chi))), 1e-300)
    for odd in range(3):
        a, b = [k for k in range(3) if k != odd]
        if abs(chi[a] - chi[b]) <= tol * scale:
            if abs(cfg.omega[odd]) > tol * max(1.0, float(np.max(np.abs(cfg.omega)))):
                continue
            return float(chi[odd] - chi[a]), float(np.linalg.norm(cfg.omega))
    raise NotApplicableError(f"chi={chi}, omega={cfg.omega} is not of twist-and-turn form")


def regime_of(cfg, band=None):
    chi, omega = twist_and_turn_form(cfg)
    return classify_regime(chi, omega, cfg.n, band=band)


def twist_and_turn_phase(chi, omega, bigj, band=None):
    band = defaults["regime_band"] if band is None else band
    threshold = 2.0 * bigj * abs(chi)
    if threshold > 0 and abs(abs(omega) - threshold) <= band * threshold:
        return "boundary"
    return "dominant-rotation" if abs(omega) > threshold else "dominant-twisting"
