"""Stationary angular momenta on the J-sphere.

Points are located in the twisting picture (chi, Omega), where the
stationarity condition reads 2 chi_k J_k + Omega_k = 2 lam J_k for a
multiplier lam. Stability comes from comparing the principal radii of the
energy ellipsoid at the contact point with the sphere radius J.
"""
import math
from collections import deque
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np
import pandas as pd
from numpy.polynomial import polynomial as P

from correspondence import (
    TwistingConfig,
    hamiltonian_energy,
    quantum_from_classical,
    twisting_rates,
)
from defaults import defaults
from dynamics import BodyState, InertiaConfig, body_energy
from ellipsoid import ellipsoid_principal_radii
from errors import DegenerateAxisError, NotLmgError, PreconditionError
from logger import logger
from polynomial import Degree6Poly, real_roots

STABILITY_LABELS = ("StableMin", "StableMax", "Saddle", "Marginal")
ORACLE_KINDS = {"min": "StableMin", "max": "StableMax", "saddle": "Saddle"}


@dataclass
class StationaryPoint:
    j: BodyState
    energy: float
    r1: float
    r2: float
    stability: str
    branch: str

    @property
    def vector(self):
        return self.j.vector


@dataclass(frozen=True)
class LmgLevel:
    label: str
    energy: float
    exists: bool


@dataclass(frozen=True)
class LmgRadii:
    label: str
    j: np.ndarray
    r1: float
    r2: float


@dataclass(frozen=True)
class DegenerateRing:
    axis: int
    height: float
    radius: float
    energy: float


@dataclass(frozen=True)
class OracleHit:
    direction: np.ndarray
    energy: float
    kind: str
    cells: int


@dataclass
class PhaseInterval:
    lo: float
    hi: float
    points: int
    saddles: int
    degenerate_saddles: bool
    degenerate_extrema: bool

    @property
    def zone(self):
        return lmg_zone(self)


@dataclass
class PhaseDiagram:
    direction: np.ndarray
    magnitudes: np.ndarray
    bigj: float
    points: list
    criticals: list = field(default_factory=list)
    intervals: list = field(default_factory=list)

    def to_frame(self):
        """Long table, one row per stationary point; magnitudes normalized by J."""
        rows = []
        for magnitude, points in zip(self.magnitudes, self.points):
            for point_id, point in enumerate(points):
                rows.append((magnitude / self.bigj, point_id, *point.vector, point.energy, point.stability))
        return pd.DataFrame(
            rows, columns=["omega_mag", "point_id", "j1", "j2", "j3", "energy", "stability"]
        )

    def report(self):
        return {
            "direction": [float(x) for x in self.direction],
            "bigj": self.bigj,
            "criticals": [
                {"omega": c, "omega_over_j": c / self.bigj} for c in self.criticals
            ],
            "intervals": [
                {
                    "lo": i.lo,
                    "hi": i.hi,
                    "points": i.points,
                    "saddles": i.saddles,
                    "degenerate_saddles": i.degenerate_saddles,
                    "degenerate_extrema": i.degenerate_extrema,
                    "zone": i.zone,
                }
                for i in self.intervals
            ],
        }


@dataclass
class _System:
    cfg: object
    chi: np.ndarray
    omega: np.ndarray
    classical: bool

    def energy(self, vector):
        if self.classical:
            return body_energy(vector, self.cfg)
        return hamiltonian_energy(vector, self.cfg)

    def rate_scale(self, bigj):
        return (float(np.max(np.abs(self.chi))) * bigj + float(np.max(np.abs(self.omega)))) * bigj

    def energy_scale(self, bigj):
        return float(np.max(np.abs(self.chi))) * bigj**2 + float(np.max(np.abs(self.omega))) * bigj


def _system(cfg):
    if isinstance(cfg, InertiaConfig):
        twisting = quantum_from_classical(cfg)
        return _System(cfg, twisting.chi, twisting.omega, classical=True)
    if isinstance(cfg, TwistingConfig):
        return _System(cfg, cfg.chi, cfg.omega, classical=False)
    raise PreconditionError(f"unsupported config type {type(cfg).__name__}")


def _permute(cfg, order):
    if isinstance(cfg, InertiaConfig):
        m, k = cfg.moments[order], cfg.rotor[order]
        return InertiaConfig.formal(*m, *k)
    return TwistingConfig(*cfg.chi[order], *cfg.omega[order], n=cfg.n)


# Polynomial in the third component ------------------------------------------------

def poly_coeffs_classical(cfg, bigj):
    i1, i2, i3 = cfg.moments
    k1, k2, k3 = cfg.rotor
    tol = defaults["moment_tolerance"] * i3
    if abs(i3 - i1) <= tol or abs(i3 - i2) <= tol:
        raise DegenerateAxisError(
            f"I3={i3} coincides with I1={i1} or I2={i2}; use the analytic branch"
        )
    d13, d23 = i3 - i1, i3 - i2
    d = d13**2 * d23**2
    p = i1 * i3 - 2 * i1 * i2 + i2 * i3
    q = p**2 + 2 * i1 * i2 * d13 * d23
    jj = bigj**2
    a = [
        -jj * k3**4 * i1**2 * i2**2 / d,
        -2 * jj * k3**3 * i1 * i2 * p / d,
        (i1**2 * i2**2 * k3**4 + i3**2 * k3**2 * (i1**2 * k2**2 + i2**2 * k1**2) - jj * k3**2 * q) / d,
        (2 * k3**3 * i1 * i2 * p + 2 * k3 * i3**2 * (i2 * d23 * k1**2 + i1 * d13 * k2**2)) / d
        - 2 * jj * k3 * p / (d13 * d23),
        k3**2 * q / d + i3**2 * (k1**2 / d13**2 + k2**2 / d23**2) - jj,
        2 * k3 * p / (d13 * d23),
        1.0,
    ]
    return Degree6Poly(np.array(a))


def poly_coeffs_quantum(cfg, bigj):
    chi1, chi2, chi3 = cfg.chi
    w1, w2, w3 = cfg.omega
    scale = max(float(np.max(np.abs(cfg.chi))), 1e-300)
    d1, d2 = chi1 - chi3, chi2 - chi3
    if abs(d1) <= defaults["moment_tolerance"] * scale or abs(d2) <= defaults["moment_tolerance"] * scale:
        raise DegenerateAxisError(
            f"chi3={chi3} coincides with chi1={chi1} or chi2={chi2}; use the analytic branch"
        )
    s = chi1 + chi2 - 2 * chi3
    dd = d1**2 * d2**2
    jj = bigj**2
    a = [
        -jj * w3**4 / (16 * dd),
        jj * w3**3 * s / (4 * dd),
        w3**2 * (w1**2 + w2**2 + w3**2 - 4 * jj * (s**2 + 2 * d1 * d2)) / (16 * dd),
        w3 * (w1**2 * (chi3 - chi2) + w2**2 * (chi3 - chi1) - w3**2 * s) / (4 * dd)
        + jj * w3 * s / (d1 * d2),
        w3**2 * (s**2 + 2 * d1 * d2) / (4 * dd) + w1**2 / (4 * d1**2) + w2**2 / (4 * d2**2) - jj,
        -w3 * s / (d1 * d2),
        1.0,
    ]
    return Degree6Poly(np.array(a))


# Locating points ---------------------------------------------------------------

def _zero_omega(system, bigj):
    return defaults["omega_zero"] * max(system.energy_scale(bigj) / bigj, 1e-300)


def _chi_tol(system):
    return defaults["symmetric_top_tolerance"] * max(float(np.max(np.abs(system.chi))), 1e-300)


def _flat_axes(system, bigj):
    zero = _zero_omega(system, bigj)
    return [k for k in range(3) if abs(system.omega[k]) <= zero]


def _branch_of(vector, bigj):
    small = np.abs(vector) <= defaults["point_dedupe"] * bigj
    return "axis-pole" if np.count_nonzero(small) == 2 else None


def _analytic_candidates(system, bigj):
    """Solutions with the multiplier pinned to chi_q of an axis with Omega_q = 0."""
    chi, omega = system.chi, system.omega
    zero = _zero_omega(system, bigj)
    chi_tol = _chi_tol(system)
    flat = _flat_axes(system, bigj)
    tiny = (defaults["sphere_residual"] * bigj) ** 2
    found = []
    for q in flat:
        vector = np.zeros(3)
        solvable = True
        for k in range(3):
            if k == q:
                continue
            gap = chi[q] - chi[k]
            if abs(gap) <= chi_tol:
                if abs(omega[k]) <= zero:
                    logger.debug("Axes %s and %s span a degenerate ring; not enumerated", q + 1, k + 1)
                solvable = False
                break
            vector[k] = omega[k] / (2.0 * gap)
        if not solvable:
            continue
        remainder = bigj**2 - float(np.sum(vector**2))
        if remainder > tiny:
            for sign in (1.0, -1.0):
                v = vector.copy()
                v[q] = sign * math.sqrt(remainder)
                found.append((v, _branch_of(v, bigj) or "analytic-lmg"))
        elif remainder >= -tiny:
            v = vector * bigj / np.linalg.norm(vector)
            found.append((v, _branch_of(v, bigj) or "analytic-lmg"))

    if len(flat) == 2:
        # The remaining axis carries the linear term; its poles are always stationary
        p = ({0, 1, 2} - set(flat)).pop()
        for sign in (1.0, -1.0):
            v = np.zeros(3)
            v[p] = sign * bigj
            found.append((v, "axis-pole"))
    return found


def _pivot(system, bigj):
    chi, omega = system.chi, system.omega
    zero = _zero_omega(system, bigj)
    chi_tol = _chi_tol(system)
    best = None
    for p in range(3):
        if abs(omega[p]) <= zero:
            continue
        if any(abs(chi[p] - chi[k]) <= chi_tol for k in range(3) if k != p):
            continue
        if best is None or abs(omega[p]) > abs(omega[best]):
            best = p
    return best


def _reconstruct(system, permuted, x):
    """Components 1 and 2 of the permuted problem from the pivot value x."""
    values = []
    if system.classical:
        i, k = permuted.moments, permuted.rotor
        for a in (0, 1):
            coef, const = i[2] - i[a], i[a] * k[2]
            numerator = i[2] * k[a] * x
            values.append((numerator, coef * x + const, abs(coef * x) + abs(const)))
    else:
        chi, omega = permuted.chi, permuted.omega
        for a in (0, 1):
            coef, const = 2.0 * (chi[2] - chi[a]), omega[2]
            values.append((omega[a] * x, coef * x + const, abs(coef * x) + abs(const)))
    return values


def _generic_candidates(system, bigj):
    if len(_flat_axes(system, bigj)) >= 2:
        return []
    p = _pivot(system, bigj)
    if p is None:
        return _secular_candidates(system, bigj)

    order = [k for k in range(3) if k != p] + [p]
    permuted = _permute(system.cfg, order)
    if system.classical:
        poly = poly_coeffs_classical(permuted, bigj)
    else:
        poly = poly_coeffs_quantum(permuted, bigj)

    floor = defaults["denominator_floor"]
    residual = defaults["sphere_residual"] * bigj
    found = []
    for root in real_roots(poly, bigj):
        parts = _reconstruct(system, permuted, root.x)
        if any(abs(den) <= floor * max(size, 1e-300) for _, den, size in parts):
            # 0/0 roots belong to an analytic branch
            continue
        local = np.array([parts[0][0] / parts[0][1], parts[1][0] / parts[1][1], root.x])
        if abs(np.linalg.norm(local) - bigj) > residual:
            continue
        vector = np.empty(3)
        vector[order] = local
        found.append((vector, _branch_of(vector, bigj) or "generic-root"))
    logger.debug("Pivot axis %s gave %s generic points", p + 1, len(found))
    return found


def _secular_candidates(system, bigj):
    """Fallback through sum Omega_k^2 / (4 (lam - chi_k)^2) = J^2."""
    chi, omega = system.chi, system.omega
    zero = _zero_omega(system, bigj)
    chi_tol = _chi_tol(system)
    groups = []
    for k in range(3):
        if abs(omega[k]) <= zero:
            continue
        for g in groups:
            if abs(g[0] - chi[k]) <= chi_tol:
                g[1] += omega[k] ** 2
                break
        else:
            groups.append([chi[k], omega[k] ** 2])
    if not groups:
        return []

    factors = [P.polypow([-c, 1.0], 2) for c, _ in groups]
    total = np.array([0.0])
    for index, (_, weight) in enumerate(groups):
        term = np.array([weight / 4.0])
        for other, factor in enumerate(factors):
            if other != index:
                term = P.polymul(term, factor)
        total = P.polyadd(total, term)
    product = np.array([1.0])
    for factor in factors:
        product = P.polymul(product, factor)
    total = P.polysub(total, bigj**2 * product)

    residual = defaults["sphere_residual"] * bigj
    found = []
    for lam in P.polyroots(total):
        if abs(lam.imag) > 1e-9 * (1.0 + abs(lam.real)):
            continue
        lam = lam.real
        gaps = lam - chi
        vector = np.where(np.abs(omega) > zero, omega / (2.0 * np.where(gaps == 0, np.inf, gaps)), 0.0)
        if abs(np.linalg.norm(vector) - bigj) > residual:
            continue
        found.append((vector, _branch_of(vector, bigj) or "generic-root"))
    return found


def _dedupe_points(candidates, bigj):
    tol = defaults["point_dedupe"] * bigj
    kept = []
    for vector, branch in candidates:
        if all(np.linalg.norm(vector - v) > tol for v, _ in kept):
            kept.append((vector, branch))
    return kept


def _locate(system, bigj):
    if bigj <= 0:
        raise PreconditionError(f"J must be positive, got {bigj}")
    return _dedupe_points(_analytic_candidates(system, bigj) + _generic_candidates(system, bigj), bigj)


def stationary_points(cfg, bigj):
    """All isolated stationary momenta of norm ``bigj``, sorted by energy."""
    system = _system(cfg)
    points = []
    for vector, branch in _locate(system, bigj):
        r1, r2, stability = _contact(vector, system, bigj)
        points.append(
            StationaryPoint(
                j=BodyState.from_vector(vector),
                energy=system.energy(vector),
                r1=r1,
                r2=r2,
                stability=stability,
                branch=branch,
            )
        )
    points.sort(key=lambda s: (s.energy, *s.vector))
    rings = degenerate_rings(cfg, bigj)
    if rings:
        logger.warning("Skipping %s degenerate ring(s) of stationary momenta", len(rings))
    elif points and not any(p.stability == "Marginal" for p in points):
        saddles = sum(p.stability == "Saddle" for p in points)
        if len(points) - 2 * saddles != 2:
            # Index sum over the sphere is its Euler characteristic
            logger.error(
                "Stationary points break the index count: %s extrema, %s saddles",
                len(points) - saddles, saddles,
                extra={"bigj": bigj},
            )
    logger.debug("Found %s stationary points at J=%s", len(points), bigj)
    return points


# Stability ---------------------------------------------------------------------

def _positive_shift(chi):
    if np.min(chi) > 0.0:
        return 0.0
    unit = float(np.max(np.abs(chi))) or 1.0
    return -float(np.min(chi)) + unit


def _ellipsoid(vector, system, bigj):
    """Center, semi-axes and degeneracy flag of the level ellipsoid through ``vector``.

    The interior of the ellipsoid always holds the lower energies.
    """
    if system.classical:
        cfg = system.cfg
        level = body_energy(vector, cfg)
        center = cfg.rotor
        scale = (bigj + float(np.linalg.norm(center))) ** 2 / (2.0 * float(np.min(cfg.moments)))
        axes = np.sqrt(2.0 * max(level, 0.0) * cfg.moments)
    else:
        chi = system.chi + _positive_shift(system.chi)
        center = -system.omega / (2.0 * chi)
        level = float(np.sum(chi * (vector - center) ** 2))
        scale = float(np.max(chi)) * (bigj + float(np.linalg.norm(center))) ** 2
        axes = np.sqrt(max(level, 0.0) / chi)
    degenerate = level <= defaults["degenerate_energy"] * scale
    return center, axes, degenerate


def _contact(vector, system, bigj):
    center, axes, degenerate = _ellipsoid(vector, system, bigj)
    if degenerate:
        # The ellipsoid shrank to a point: the global minimum
        return 0.0, 0.0, "StableMin"
    offset = vector - center
    r1, r2 = ellipsoid_principal_radii(*axes, *offset)
    normal = vector / np.linalg.norm(vector)
    if normal @ (center - vector) >= 0.0:
        return r1, r2, "StableMin"
    band = defaults["marginal_band"] * bigj
    if abs(r1 - bigj) <= band or abs(r2 - bigj) <= band:
        return r1, r2, "Marginal"
    if r2 > bigj:
        return r1, r2, "StableMax"
    if r1 < bigj:
        return r1, r2, "StableMin"
    return r1, r2, "Saddle"


def classify_stability(point, cfg, bigj):
    """StableMin / StableMax / Saddle / Marginal, in terms of the config's own energy."""
    vector = point.vector if hasattr(point, "vector") else np.asarray(point, dtype=float)
    system = _system(cfg)
    twisting = quantum_from_classical(cfg) if system.classical else cfg
    rate = np.linalg.norm(twisting_rates(vector, twisting))
    if rate > defaults["sphere_residual"] * system.rate_scale(bigj):
        raise PreconditionError(f"{vector} is not stationary (|dJ/dt| = {rate})")
    return _contact(vector, system, bigj)[2]


# Closed forms for Omega along axis 3 ------------------------------------------------

def _require_lmg(cfg):
    if not isinstance(cfg, TwistingConfig):
        raise NotLmgError("closed forms are stated for twisting configs")
    if cfg.omega1 != 0.0 or cfg.omega2 != 0.0:
        raise NotLmgError(f"transverse linear terms ({cfg.omega1}, {cfg.omega2}) present")


def lmg_stationary_energies(cfg, bigj):
    _require_lmg(cfg)
    chi1, chi2, chi3 = cfg.chi
    w = cfg.omega3
    levels = [
        LmgLevel("i", chi3 * bigj**2 + w * bigj, True),
        LmgLevel("ii", chi3 * bigj**2 - w * bigj, True),
    ]
    for labels, chi_k in ((("iii", "iv"), chi1), (("v", "vi"), chi2)):
        gap = chi_k - chi3
        if gap == 0.0:
            levels.extend(LmgLevel(label, math.nan, False) for label in labels)
            continue
        exists = abs(w) < 2.0 * abs(gap) * bigj
        energy = chi_k * bigj**2 + w**2 / (4.0 * gap)
        levels.extend(LmgLevel(label, energy, exists) for label in labels)
    return levels


def lmg_curvature_radii(cfg, bigj):
    """Closed-form ellipsoid radii at the existing points i..vi (chi shifted positive)."""
    _require_lmg(cfg)
    chi1, chi2, chi3 = cfg.chi + _positive_shift(cfg.chi)
    w = cfg.omega3
    out = []
    for label, sign in (("i", 1.0), ("ii", -1.0)):
        a3 = abs(bigj + sign * w / (2.0 * chi3))
        radii = sorted(((chi3 / chi1) * a3, (chi3 / chi2) * a3), reverse=True)
        out.append(LmgRadii(label, np.array([0.0, 0.0, sign * bigj]), *radii))

    for labels, axis, chi_k, chi_other in ((("iii", "iv"), 0, chi1, chi2), (("v", "vi"), 1, chi2, chi1)):
        gap = chi_k - chi3
        if gap == 0.0 or abs(w) >= 2.0 * abs(gap) * bigj:
            continue
        j3 = w / (2.0 * gap)
        transverse = math.sqrt(bigj**2 - j3**2)
        r1 = abs(chi_k * bigj / (chi3 * (1.0 - w**2 / (4.0 * chi3 * (chi3 - chi_k) * bigj**2))))
        r2 = abs(bigj * chi_k / chi_other)
        radii = sorted((r1, r2), reverse=True)
        for label, sign in zip(labels, (1.0, -1.0)):
            j = np.zeros(3)
            j[axis] = sign * transverse
            j[2] = j3
            out.append(LmgRadii(label, j, *radii))
    return out


def degenerate_rings(cfg, bigj):
    """Circles of stationary momenta that appear when two equal chi carry no linear term."""
    system = _system(cfg)
    chi, omega = system.chi, system.omega
    zero = _zero_omega(system, bigj)
    chi_tol = _chi_tol(system)
    rings = []
    for q, k in ((0, 1), (0, 2), (1, 2)):
        if abs(chi[q] - chi[k]) > chi_tol or abs(omega[q]) > zero or abs(omega[k]) > zero:
            continue
        axis = 3 - q - k
        if abs(chi[axis] - chi[q]) <= chi_tol:
            if abs(omega[axis]) <= zero and not rings:
                point = np.array([bigj, 0.0, 0.0])
                rings.append(DegenerateRing(axis + 1, 0.0, bigj, system.energy(point)))
            continue
        height = omega[axis] / (2.0 * (chi[q] - chi[axis]))
        remainder = bigj**2 - height**2
        if remainder <= (defaults["sphere_residual"] * bigj) ** 2:
            continue
        point = np.zeros(3)
        point[axis] = height
        point[q] = math.sqrt(remainder)
        rings.append(DegenerateRing(axis + 1, height, math.sqrt(remainder), system.energy(point)))
    return rings


# Sweeps ------------------------------------------------------------------------

def lmg_zone(interval):
    """Zone label from saddle count and saddle degeneracy; None outside the four zones."""
    if interval.saddles == 0:
        return "I"
    if interval.saddles == 1:
        return "II"
    if interval.saddles == 2:
        return "IV" if interval.degenerate_saddles else "III"
    return None


def _degenerate(energies, tol):
    energies = sorted(energies)
    return any(b - a <= tol for a, b in zip(energies, energies[1:]))


def _interval(cfg, lo, hi, bigj):
    points = stationary_points(cfg, bigj)
    tol = defaults["degenerate_energy"] * _system(cfg).energy_scale(bigj)
    saddles = [p.energy for p in points if p.stability == "Saddle"]
    extrema = [p.energy for p in points if p.stability in ("StableMin", "StableMax")]
    return PhaseInterval(
        lo=lo,
        hi=hi,
        points=len(points),
        saddles=len(saddles),
        degenerate_saddles=_degenerate(saddles, tol),
        degenerate_extrema=_degenerate(extrema, tol),
    )


def _count(base, direction, magnitude, bigj):
    return len(_locate(_system(base.with_omega(magnitude * direction)), bigj))


def _refine(base, direction, lo, hi, bigj, count_lo):
    for _ in range(defaults["critical_bisection_steps"]):
        mid = 0.5 * (lo + hi)
        if mid in (lo, hi):
            break
        if _count(base, direction, mid, bigj) == count_lo:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def phase_sweep(base, direction, omega_magnitudes, bigj, threads=1):
    """Stationary points along Omega = m * direction for every m of the grid."""
    direction = np.asarray(direction, dtype=float)
    direction = direction / np.linalg.norm(direction)
    grid = np.asarray(omega_magnitudes, dtype=float)
    if grid.ndim != 1 or len(grid) < 2 or np.any(np.diff(grid) <= 0):
        raise PreconditionError("sweep grid must be strictly ascending with at least two values")

    def evaluate(magnitude):
        return stationary_points(base.with_omega(magnitude * direction), bigj)

    with ThreadPoolExecutor(max_workers=max(1, threads)) as pool:
        points = list(pool.map(evaluate, grid))

    criticals = []
    for i in range(len(grid) - 1):
        if len(points[i]) != len(points[i + 1]):
            criticals.append(_refine(base, direction, grid[i], grid[i + 1], bigj, len(points[i])))
    edges = [float(grid[0])] + criticals + [float(grid[-1])]
    intervals = []
    for lo, hi in zip(edges, edges[1:]):
        mid = 0.5 * (lo + hi)
        intervals.append(_interval(base.with_omega(mid * direction), lo, hi, bigj))

    logger.info("Phase sweep over %s values: criticals %s", len(grid), criticals)
    return PhaseDiagram(
        direction=direction,
        magnitudes=grid,
        bigj=bigj,
        points=points,
        criticals=criticals,
        intervals=intervals,
    )


# Grid oracle -------------------------------------------------------------------

# Grid pole tilted off every principal axis
_ORACLE_FRAME = np.array([
    [0.36, 0.48, 0.80],
    [-0.80, 0.60, 0.00],
    [-0.48, -0.64, 0.60],
])

_RING = [(-1, -1), (-1, 0), (-1, 1), (0, 1), (1, 1), (1, 0), (1, -1), (0, -1)]


def _grid_energy(system, directions, bigj):
    j = bigj * directions
    if system.classical:
        body = j - system.cfg.rotor
        return np.sum(body**2 / (2.0 * system.cfg.moments), axis=-1)
    return np.sum(system.chi * j**2 + system.omega * j, axis=-1)


def _neighbour(i, k, di, dk, n_theta, n_phi):
    """Grid index one step away; stepping over a grid pole lands half a turn
    around with phi running backwards."""
    ni, nk = i + di, k + dk
    over = (ni < 0) | (ni >= n_theta)
    ni = np.clip(ni, 0, n_theta - 1)
    nk = np.where(over, k + n_phi // 2 - dk, nk) % n_phi
    return ni, nk


def _clusters(mask):
    n_theta, n_phi = mask.shape
    seen = np.zeros_like(mask)
    groups = []
    for start in zip(*np.nonzero(mask)):
        if seen[start]:
            continue
        seen[start] = True
        queue, members = deque([start]), []
        while queue:
            i, k = queue.popleft()
            members.append((i, k))
            for di, dk in _RING:
                ni, nk = (int(x) for x in _neighbour(i, k, di, dk, n_theta, n_phi))
                if mask[ni, nk] and not seen[ni, nk]:
                    seen[ni, nk] = True
                    queue.append((ni, nk))
        groups.append(members)
    return groups


def brute_force_stationary(cfg, bigj, grid_resolution=None):
    """Scan the energy on a latitude-longitude grid and report local extrema and saddles."""
    n_theta, n_phi = grid_resolution or defaults["oracle_grid"]
    min_theta, min_phi = defaults["oracle_min_grid"]
    if n_theta < min_theta or n_phi < min_phi or n_phi % 2:
        raise PreconditionError(f"oracle grid {n_theta}x{n_phi} is too coarse")
    system = _system(cfg)

    theta = (np.arange(n_theta) + 0.5) * np.pi / n_theta
    phi = np.arange(n_phi) * 2.0 * np.pi / n_phi
    th, ph = np.meshgrid(theta, phi, indexing="ij")
    local = np.stack([np.sin(th) * np.cos(ph), np.sin(th) * np.sin(ph), np.cos(th)], axis=-1)
    directions = local @ _ORACLE_FRAME
    energy = _grid_energy(system, directions, bigj)

    ii, kk = np.meshgrid(np.arange(n_theta), np.arange(n_phi), indexing="ij")
    diffs = np.stack([
        energy[_neighbour(ii, kk, di, dk, n_theta, n_phi)] - energy for di, dk in _RING
    ])
    is_max = np.all(diffs < 0, axis=0)
    is_min = np.all(diffs > 0, axis=0)
    signs = diffs >= 0
    changes = np.sum(signs != np.roll(signs, 1, axis=0), axis=0)
    is_saddle = (changes >= 4) & ~is_max & ~is_min

    hits = []
    for kind, mask in (("max", is_max), ("min", is_min), ("saddle", is_saddle)):
        for members in _clusters(mask):
            rows, cols = zip(*members)
            mean = directions[list(rows), list(cols)].mean(axis=0)
            direction = mean / np.linalg.norm(mean)
            hits.append(OracleHit(direction, float(_grid_energy(system, direction, bigj)), kind, len(members)))
    logger.debug("Oracle found %s clusters on a %sx%s grid", len(hits), n_theta, n_phi)
    return hits
