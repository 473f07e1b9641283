"""Euler top with an embedded rotor: equations of motion, invariants and
fixed-step integration in the body frame.

Axes are labelled 1, 2, 3 throughout (the principal axes of inertia).
The rotor contributes a constant body-frame angular momentum K, so the
total momentum is J = L + K with L_k = I_k * omega_k.
"""
import math
from dataclasses import dataclass, field

import numpy as np
import pandas as pd

from defaults import defaults
from errors import (
    IntegrationDivergedError,
    InvalidStateError,
    NotApplicableError,
    PreconditionError,
)
from logger import logger

try:
    from numba import njit

    NUMBA_AVAILABLE = True
except ImportError:  # pragma: no cover - exercised only without numba
    NUMBA_AVAILABLE = False

    def njit(*args, **kwargs):
        if len(args) == 1 and callable(args[0]) and not kwargs:
            return args[0]
        return lambda func: func


TRAJECTORY_COLUMNS = ["t", "j1", "j2", "j3", "e_body", "j_sq"]


@dataclass(frozen=True)
class InertiaConfig:
    i1: float
    i2: float
    i3: float
    k1: float = 0.0
    k2: float = 0.0
    k3: float = 0.0

    def __post_init__(self):
        values = (self.i1, self.i2, self.i3, self.k1, self.k2, self.k3)
        if not all(math.isfinite(v) for v in values):
            raise PreconditionError(f"non-finite inertia config {values}")
        if min(self.i1, self.i2, self.i3) <= 0.0:
            raise PreconditionError(
                f"moments of inertia must be positive, got {(self.i1, self.i2, self.i3)}"
            )

    @classmethod
    def physical(cls, i1, i2, i3, k1=0.0, k2=0.0, k3=0.0):
        """Build a config that a real mass distribution can have."""
        cfg = cls(i1, i2, i3, k1, k2, k3)
        if not cfg.satisfies_triangle():
            raise PreconditionError(
                f"moments {(i1, i2, i3)} violate the triangle inequality"
            )
        return cfg

    @classmethod
    def formal(cls, i1, i2, i3, k1=0.0, k2=0.0, k3=0.0):
        """Build a config without the triangle check (correspondence round trips)."""
        return cls(i1, i2, i3, k1, k2, k3)

    @property
    def moments(self):
        return np.array([self.i1, self.i2, self.i3])

    @property
    def rotor(self):
        return np.array([self.k1, self.k2, self.k3])

    def satisfies_triangle(self, tol=None):
        tol = defaults["moment_tolerance"] if tol is None else tol
        i = sorted(self.moments)
        return i[2] <= (i[0] + i[1]) * (1.0 + tol)

    def to_json(self):
        return {
            "i1": self.i1, "i2": self.i2, "i3": self.i3,
            "k1": self.k1, "k2": self.k2, "k3": self.k3,
        }

    @classmethod
    def from_json(cls, payload):
        return cls(**{key: float(payload.get(key, 0.0)) for key in
                      ("i1", "i2", "i3", "k1", "k2", "k3")})


@dataclass(frozen=True)
class BodyState:
    j1: float
    j2: float
    j3: float

    @classmethod
    def from_vector(cls, vector):
        v = np.asarray(vector, dtype=float)
        return cls(float(v[0]), float(v[1]), float(v[2]))

    @property
    def vector(self):
        return np.array([self.j1, self.j2, self.j3])

    @property
    def norm(self):
        return float(np.linalg.norm(self.vector))


@dataclass
class Trajectory:
    frame: pd.DataFrame
    dt: float
    method: str = "rk4"

    def __len__(self):
        return len(self.frame)

    @property
    def times(self):
        return self.frame["t"].to_numpy()

    @property
    def states(self):
        return self.frame[["j1", "j2", "j3"]].to_numpy()

    def state(self, index):
        return BodyState.from_vector(self.states[index])


@dataclass
class EnsembleCone:
    center: np.ndarray
    half_angle: float
    count: int
    samples: list = field(default_factory=list)

    @classmethod
    def build(cls, center, half_angle, count, magnitude):
        """Place ``count`` momenta of norm ``magnitude`` on a circular cone."""
        c = np.asarray(center, dtype=float)
        c = c / np.linalg.norm(c)
        e_theta, e_phi = tangent_basis(c)
        psi = 2.0 * np.pi * np.arange(count) / count
        ring = np.cos(psi)[:, None] * e_theta + np.sin(psi)[:, None] * e_phi
        dirs = math.cos(half_angle) * c + math.sin(half_angle) * ring
        samples = [BodyState.from_vector(magnitude * d) for d in dirs]
        return cls(center=c, half_angle=float(half_angle), count=int(count), samples=samples)


def _check_state(state):
    v = state.vector if isinstance(state, BodyState) else np.asarray(state, dtype=float)
    if not np.all(np.isfinite(v)):
        raise InvalidStateError(f"non-finite momentum components {v}")
    return v


def djdt(state, cfg):
    """Rate of change of the total body-frame momentum, dJ/dt = J x omega."""
    j = _check_state(state)
    omega = (j - cfg.rotor) / cfg.moments
    return np.cross(j, omega)


def convert(state, cfg):
    """Return (L, omega) for a total momentum J."""
    j = _check_state(state)
    body = j - cfg.rotor
    return body, body / cfg.moments


def body_energy(state, cfg):
    j = _check_state(state)
    body = j - cfg.rotor
    return float(np.sum(body**2 / (2.0 * cfg.moments)))


def dldt(state, cfg):
    """Body-momentum form of the equations of motion."""
    body, _ = convert(state, cfg)
    l1, l2, l3 = body
    i1, i2, i3 = cfg.moments
    k1, k2, k3 = cfg.rotor
    return np.array([
        (1 / i3 - 1 / i2) * l2 * l3 + k2 * l3 / i3 - k3 * l2 / i2,
        (1 / i1 - 1 / i3) * l3 * l1 + k3 * l1 / i1 - k1 * l3 / i3,
        (1 / i2 - 1 / i1) * l1 * l2 + k1 * l2 / i2 - k2 * l1 / i1,
    ])


def domega_dt(state, cfg):
    """Angular-velocity form of the equations of motion."""
    _, omega = convert(state, cfg)
    w1, w2, w3 = omega
    i1, i2, i3 = cfg.moments
    k1, k2, k3 = cfg.rotor
    return np.array([
        ((i2 - i3) * w2 * w3 + k2 * w3 - k3 * w2) / i1,
        ((i3 - i1) * w3 * w1 + k3 * w1 - k1 * w3) / i2,
        ((i1 - i2) * w1 * w2 + k1 * w2 - k2 * w1) / i3,
    ])


def audit(samples, cfg):
    """Body energy and squared norm for an (n, 3) array of momenta."""
    samples = np.asarray(samples, dtype=float)
    body = samples - cfg.rotor
    e_body = np.sum(body**2 / (2.0 * cfg.moments), axis=-1)
    j_sq = np.sum(samples**2, axis=-1)
    return e_body, j_sq


@njit(cache=True)
def _rates(j, inv_i, k, out):
    w0 = (j[0] - k[0]) * inv_i[0]
    w1 = (j[1] - k[1]) * inv_i[1]
    w2 = (j[2] - k[2]) * inv_i[2]
    out[0] = j[1] * w2 - j[2] * w1
    out[1] = j[2] * w0 - j[0] * w2
    out[2] = j[0] * w1 - j[1] * w0


@njit(cache=True, nogil=True)
def _rk4_path(start, inv_i, k, dt, n, renormalize, every):
    m = start.shape[0]
    n_out = n // every + 1
    out = np.empty((n_out, m, 3))
    state = start.copy()
    norms = np.empty(m)
    for a in range(m):
        norms[a] = math.sqrt(state[a, 0] ** 2 + state[a, 1] ** 2 + state[a, 2] ** 2)
        for c in range(3):
            out[0, a, c] = state[a, c]

    k1 = np.empty(3)
    k2 = np.empty(3)
    k3 = np.empty(3)
    k4 = np.empty(3)
    tmp = np.empty(3)
    row = 1
    for step in range(1, n + 1):
        for a in range(m):
            j = state[a]
            _rates(j, inv_i, k, k1)
            for c in range(3):
                tmp[c] = j[c] + 0.5 * dt * k1[c]
            _rates(tmp, inv_i, k, k2)
            for c in range(3):
                tmp[c] = j[c] + 0.5 * dt * k2[c]
            _rates(tmp, inv_i, k, k3)
            for c in range(3):
                tmp[c] = j[c] + dt * k3[c]
            _rates(tmp, inv_i, k, k4)
            for c in range(3):
                j[c] = j[c] + dt / 6.0 * (k1[c] + 2.0 * k2[c] + 2.0 * k3[c] + k4[c])
            if renormalize:
                norm = math.sqrt(j[0] ** 2 + j[1] ** 2 + j[2] ** 2)
                if norm > 0.0:
                    for c in range(3):
                        j[c] = j[c] * norms[a] / norm
            if not (math.isfinite(j[0]) and math.isfinite(j[1]) and math.isfinite(j[2])):
                return out[:row], step
        if step % every == 0:
            for a in range(m):
                for c in range(3):
                    out[row, a, c] = state[a, c]
            row += 1
    return out, -1


def propagate(start, cfg, dt, n, renormalize=False, every=1):
    """Integrate an (m, 3) batch of momenta; returns an (n // every + 1, m, 3) array."""
    if not dt or not math.isfinite(dt):
        raise PreconditionError(f"time step must be finite and non-zero, got {dt}")
    if n < 1 or every < 1:
        raise PreconditionError(f"need n >= 1 and every >= 1, got n={n} every={every}")
    start = np.atleast_2d(np.asarray(start, dtype=float))
    if not np.all(np.isfinite(start)):
        raise InvalidStateError(f"non-finite initial momenta {start}")
    inv_i = 1.0 / cfg.moments
    path, failed = _rk4_path(start, inv_i, cfg.rotor, float(dt), int(n), bool(renormalize), int(every))
    if failed >= 0:
        last = len(path) - 1
        logger.warning("Integration diverged at step %s", failed)
        raise IntegrationDivergedError(
            f"non-finite state at step {failed}", last_valid_index=last, samples=path
        )
    return path


def trajectory_from_samples(samples, cfg, dt, t0=0.0, method=None):
    samples = np.asarray(samples, dtype=float)
    e_body, j_sq = audit(samples, cfg)
    t = t0 + dt * np.arange(len(samples))
    frame = pd.DataFrame({
        "t": t,
        "j1": samples[:, 0],
        "j2": samples[:, 1],
        "j3": samples[:, 2],
        "e_body": e_body,
        "j_sq": j_sq,
    })
    return Trajectory(frame=frame, dt=dt, method=method or defaults["rk4_method"])


def integrate(initial, cfg, dt, n, renormalize=False, every=1):
    """Fixed-step classical RK4 integration of dJ/dt from ``initial``."""
    if dt <= 0:
        raise PreconditionError(f"dt must be positive, got {dt}")
    start = _check_state(initial)
    logger.debug("Integrating %s steps dt=%s renormalize=%s numba=%s", n, dt, renormalize, NUMBA_AVAILABLE)
    path = propagate(start, cfg, dt, n, renormalize=renormalize, every=every)
    return trajectory_from_samples(path[:, 0, :], cfg, dt * every)


def _require_symmetric_top(cfg):
    tol = defaults["symmetric_top_tolerance"]
    if not math.isclose(cfg.i1, cfg.i2, rel_tol=tol):
        raise NotApplicableError(f"not a symmetric top: i1={cfg.i1}, i2={cfg.i2}")
    if cfg.k1 != 0.0 or cfg.k2 != 0.0:
        raise NotApplicableError(f"rotor is not coaxial: k1={cfg.k1}, k2={cfg.k2}")


def precession_frequency(cfg, j3):
    """Body-frame precession rate of (J1, J2) for a symmetric top with coaxial rotor."""
    _require_symmetric_top(cfg)
    return (1.0 / cfg.i1 - 1.0 / cfg.i3) * j3 + cfg.k3 / cfg.i3


def wobble_ratio(trajectory, cfg):
    """Measured wobble-to-spin ratio (omega3 + precession) / omega3."""
    _require_symmetric_top(cfg)
    frame = trajectory.frame
    phase = np.unwrap(np.arctan2(frame["j2"].to_numpy(), frame["j1"].to_numpy()))
    precession = np.polyfit(frame["t"].to_numpy(), phase, 1)[0]
    omega3 = float(np.mean((frame["j3"].to_numpy() - cfg.k3) / cfg.i3))
    if omega3 == 0.0:
        raise NotApplicableError("no spin about the symmetry axis")
    logger.debug("Measured precession %s spin %s", precession, omega3)
    return (omega3 + precession) / omega3


def coaxial_regime(cfg, bigj, band=None):
    """Classify a symmetric top with coaxial rotor as rotor- or body-dominated."""
    _require_symmetric_top(cfg)
    band = defaults["regime_band"] if band is None else band
    ratio = abs(cfg.k3) / bigj
    threshold = abs(1.0 - cfg.i3 / cfg.i1)
    if threshold > 0 and abs(ratio - threshold) <= band * threshold:
        return "boundary"
    return "dominant-rotor" if ratio > threshold else "dominant-body"


def oat_chi(cfg):
    """One-axis twisting strength of a symmetric top."""
    _require_symmetric_top(cfg)
    return 1.0 / (2.0 * cfg.i1) - 1.0 / (2.0 * cfg.i3)


def tact_inertia(i1, i2):
    """Middle moment turning an asymmetric top into a two-axis countertwister."""
    return 2.0 * i1 * i2 / (i1 + i2)


def tact_chi(i1, i2):
    return (i2 - i1) / (4.0 * i1 * i2)


def _axis_index(axis):
    if axis not in (1, 2, 3):
        raise PreconditionError(f"axis must be 1, 2 or 3, got {axis}")
    return axis - 1


def instability_rate(cfg, axis, bigj):
    """Linearized growth rate about the stationary momentum bigj * e_axis.

    The rotor must be parallel to the axis. Returns 0 for a stable axis.
    """
    p = _axis_index(axis)
    q, r = (p + 1) % 3, (p + 2) % 3
    rotor = cfg.rotor
    if rotor[q] != 0.0 or rotor[r] != 0.0:
        raise NotApplicableError(f"rotor {rotor} is not parallel to axis {axis}")
    moments = cfg.moments
    w = (bigj - rotor[p]) / moments[p]
    product = (w - bigj / moments[r]) * (bigj / moments[q] - w)
    return math.sqrt(product) if product > 0.0 else 0.0


def measure_growth_rate(trajectory, axis, lo=1e-6, hi=1e-3):
    """Fit the exponential growth of the deviation from ``axis``."""
    p = _axis_index(axis)
    states = trajectory.states
    bigj = float(np.linalg.norm(states[0]))
    others = [c for c in range(3) if c != p]
    deviation = np.linalg.norm(states[:, others], axis=1)
    start = np.argmax(deviation >= lo * bigj)
    above = np.nonzero(deviation[start:] > hi * bigj)[0]
    stop = start + (above[0] if len(above) else len(deviation) - start)
    if stop - start < 10:
        raise PreconditionError(
            f"only {stop - start} samples between {lo} and {hi} of J; run longer or perturb less"
        )
    t = trajectory.times[start:stop]
    slope = np.polyfit(t, np.log(deviation[start:stop]), 1)[0]
    logger.debug("Growth fit over %s samples: %s", stop - start, slope)
    return float(slope)


def count_flips(trajectory, axis):
    """Number of sign changes of one momentum component between samples."""
    values = trajectory.states[:, _axis_index(axis)]
    signs = np.sign(values)
    signs = signs[signs != 0]
    return int(np.count_nonzero(signs[1:] != signs[:-1]))


def tangent_basis(direction):
    """Orthonormal (e_theta, e_phi) at a direction on the unit sphere."""
    d = np.asarray(direction, dtype=float)
    d = d / np.linalg.norm(d)
    theta = math.acos(max(-1.0, min(1.0, d[2])))
    phi = math.atan2(d[1], d[0])
    e_theta = np.array([
        math.cos(theta) * math.cos(phi),
        math.cos(theta) * math.sin(phi),
        -math.sin(theta),
    ])
    e_phi = np.array([-math.sin(phi), math.cos(phi), 0.0])
    return e_theta, e_phi


def tangent_ellipse(points, center):
    """Covariance ellipse of directions around ``center`` in its tangent plane.

    Returns (var_major, var_minor, tilt) with tilt measured from e_theta.
    """
    c = np.asarray(center, dtype=float)
    c = c / np.linalg.norm(c)
    e_theta, e_phi = tangent_basis(c)
    u = points / np.linalg.norm(points, axis=1)[:, None]
    along = u @ c
    perp = u - along[:, None] * c
    size = np.linalg.norm(perp, axis=1)
    angle = np.arctan2(size, along)
    scale = np.divide(angle, size, out=np.zeros_like(angle), where=size > 0)
    coords = np.column_stack([perp @ e_theta, perp @ e_phi]) * scale[:, None]
    return covariance_ellipse(np.cov(coords.T, bias=True))


def covariance_ellipse(cov):
    """(var_major, var_minor, tilt) of a 2x2 covariance; tilt in (-pi/2, pi/2]."""
    values, vectors = np.linalg.eigh(cov)
    major = vectors[:, 1]
    tilt = math.atan2(major[1], major[0])
    if tilt <= -math.pi / 2:
        tilt += math.pi
    elif tilt > math.pi / 2:
        tilt -= math.pi
    return float(values[1]), float(values[0]), tilt


def ensemble_squeeze(cone, cfg, dt, n, every=1):
    """Track the covariance ellipse of a cone of rotation axes."""
    if cone.half_angle > defaults["cone_half_angle_warning"]:
        logger.warning("Cone half-angle %s rad is wide; small-angle picture degrades", cone.half_angle)
    samples = np.array([s.vector for s in cone.samples])
    magnitude = float(np.mean(np.linalg.norm(samples, axis=1)))
    start = np.vstack([magnitude * cone.center, samples])
    path = propagate(start, cfg, dt, n, every=every)
    rows = []
    for index, snapshot in enumerate(path):
        major, minor, tilt = tangent_ellipse(snapshot[1:], snapshot[0])
        rows.append((index * dt * every, major, minor, tilt))
    logger.debug("Ensemble of %s members tracked over %s samples", cone.count, len(rows))
    return pd.DataFrame(rows, columns=["t", "var_major", "var_minor", "tilt_rad"])
