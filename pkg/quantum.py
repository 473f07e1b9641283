"""Generalized LMG Hamiltonian H = sum_k chi_k J_k^2 + Omega_k J_k in the
Dicke basis |j, m>, m ascending from -j to j."""
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np
import pandas as pd
from scipy.signal import find_peaks
from scipy.special import comb

from correspondence import classical_from_quantum
from defaults import defaults
from dynamics import covariance_ellipse, propagate, tangent_basis
from errors import PreconditionError
from jacobi import jacobi_hermitian
from logger import logger

MOMENT_COLUMNS = [
    "t", "m1", "m2", "m3",
    "c11", "c12", "c13", "c22", "c23", "c33",
    "var_major", "var_minor", "tilt_rad", "norm",
]


@dataclass(frozen=True)
class SpinMatrices:
    n: int
    j: float
    j1: np.ndarray
    j2: np.ndarray
    j3: np.ndarray

    @property
    def ops(self):
        return (self.j1, self.j2, self.j3)


@dataclass
class Spectrum:
    config: object
    energies: np.ndarray
    groups: list = field(default_factory=list)
    vectors: np.ndarray = None

    @property
    def mean_spacing(self):
        if len(self.energies) < 2:
            return 0.0
        return float(self.energies[-1] - self.energies[0]) / (len(self.energies) - 1)


@dataclass
class QuantumState:
    amplitudes: np.ndarray
    n: int

    def __post_init__(self):
        self.amplitudes = np.asarray(self.amplitudes, dtype=complex)
        if len(self.amplitudes) != self.n + 1:
            raise PreconditionError(f"state of length {len(self.amplitudes)} for n={self.n}")
        if abs(self.norm - 1.0) > 1e-12:
            raise PreconditionError(f"state norm {self.norm} is not 1")

    @property
    def norm(self):
        return float(np.linalg.norm(self.amplitudes))


@dataclass
class SingularityReport:
    endpoints: list
    peaks: list
    discontinuities: list
    density: pd.DataFrame
    matches: pd.DataFrame

    def to_json(self):
        return {
            "endpoints": self.endpoints,
            "peaks": self.peaks,
            "discontinuities": self.discontinuities,
            "matches": self.matches.to_dict(orient="records"),
        }


def spin_matrices(n):
    if n < 0:
        raise PreconditionError(f"particle count must be non-negative, got {n}")
    j = n / 2.0
    m = np.arange(n + 1) - j
    raise_op = np.zeros((n + 1, n + 1), dtype=complex)
    if n:
        raise_op[np.arange(1, n + 1), np.arange(n)] = np.sqrt(j * (j + 1) - m[:-1] * (m[:-1] + 1))
    lower_op = raise_op.conj().T
    return SpinMatrices(
        n=n,
        j=j,
        j1=(raise_op + lower_op) / 2.0,
        j2=(raise_op - lower_op) / 2j,
        j3=np.diag(m).astype(complex),
    )


def build_hamiltonian(cfg, spins=None):
    if cfg.n < 1:
        raise PreconditionError(f"need at least one particle, got n={cfg.n}")
    spins = spins or spin_matrices(cfg.n)
    h = np.zeros((cfg.n + 1, cfg.n + 1), dtype=complex)
    for chi, omega, op in zip(cfg.chi, cfg.omega, spins.ops):
        h += chi * (op @ op) + omega * op
    # J2 is the only imaginary operator and J2^2 is real
    if cfg.omega2 == 0.0:
        return np.ascontiguousarray(h.real)
    return h


def eigensystem(h, config=None, vectors=False):
    values, basis = jacobi_hermitian(h, want_vectors=vectors)
    tol = defaults["degeneracy_tolerance"] * max(1.0, float(np.max(np.abs(values))))
    groups, start = [], 0
    for i in range(1, len(values) + 1):
        if i == len(values) or values[i] - values[i - 1] > tol:
            if i - start > 1:
                groups.append(list(range(start, i)))
            start = i
    return Spectrum(config=config, energies=values, groups=groups, vectors=basis)


def spectrum_sweep(base, direction, grid, threads=1):
    direction = np.asarray(direction, dtype=float)
    direction = direction / np.linalg.norm(direction)
    grid = np.asarray(grid, dtype=float)
    if np.any(np.diff(grid) <= 0):
        raise PreconditionError("sweep grid must be strictly ascending")
    spins = spin_matrices(base.n)

    def diagonalize(magnitude):
        cfg = base.with_omega(magnitude * direction)
        return eigensystem(build_hamiltonian(cfg, spins), config=cfg)

    with ThreadPoolExecutor(max_workers=max(1, threads)) as pool:
        spectra = list(pool.map(diagonalize, grid))
    logger.info("Diagonalized %s Hamiltonians of dimension %s", len(spectra), base.n + 1)
    return spectra


def spectra_frame(spectra, magnitudes, bigj):
    rows = []
    for magnitude, spectrum in zip(magnitudes, spectra):
        for index, energy in enumerate(spectrum.energies):
            rows.append((magnitude / bigj, index, energy))
    return pd.DataFrame(rows, columns=["omega_mag", "level_index", "energy"])


def level_density(energies, half_window=None):
    """Inverse-spacing level density over 2h + 1 levels, centered on each level."""
    h = defaults["density_half_window"] if half_window is None else half_window
    e = np.asarray(energies, dtype=float)
    widths = e[2 * h:] - e[:-2 * h]
    positive = widths[widths > 0]
    floor = positive.min() if len(positive) else 1.0
    return pd.DataFrame({"energy": e[h:-h], "density": 2 * h / np.maximum(widths, floor)})


def _doublet_edges(energies, spacing):
    tol = defaults["doublet_fraction"] * spacing
    close = np.diff(energies) <= tol
    paired = np.zeros(len(energies), dtype=bool)
    paired[:-1] |= close
    paired[1:] |= close
    edges = np.nonzero(paired[1:] != paired[:-1])[0]
    return [float(0.5 * (energies[i] + energies[i + 1])) for i in edges]


def spectral_singularities(spectrum, classical_points, half_window=None):
    """Density peaks, interior discontinuities and support endpoints, matched to classical energies."""
    e = np.asarray(spectrum.energies, dtype=float)
    if len(e) < defaults["min_levels_for_density"]:
        raise PreconditionError(f"{len(e)} levels are too few for a level density")
    spacing = spectrum.mean_spacing
    density = level_density(e, half_window)
    rho = density["density"].to_numpy()
    centers = density["energy"].to_numpy()
    fraction = defaults["density_prominence"]

    peak_index = find_peaks(rho, prominence=fraction * (rho.max() - rho.min()))[0]
    peaks = [float(centers[i]) for i in peak_index]

    jumps = np.abs(np.diff(rho))
    jump_index = find_peaks(np.concatenate([[0.0], jumps, [0.0]]), prominence=fraction * jumps.max())[0] - 1
    discontinuities = [float(0.5 * (centers[i] + centers[i + 1])) for i in jump_index]
    discontinuities += _doublet_edges(e, spacing)
    discontinuities = sorted(set(discontinuities))
    endpoints = [float(e[0]), float(e[-1])]

    candidates = (
        [("endpoint", x) for x in endpoints]
        + [("peak", x) for x in peaks]
        + [("discontinuity", x) for x in discontinuities]
    )
    rows = []
    for point in classical_points:
        energy = float(point.energy if hasattr(point, "energy") else point)
        kind, nearest = min(candidates, key=lambda c: abs(c[1] - energy))
        offset = abs(nearest - energy)
        rows.append((energy, kind, nearest, offset, offset / spacing if spacing else math.inf))
    matches = pd.DataFrame(
        rows, columns=["classical_energy", "kind", "spectral_energy", "offset", "offset_spacings"]
    )
    logger.debug("Singularities: %s peaks, %s discontinuities", len(peaks), len(discontinuities))
    return SingularityReport(endpoints, peaks, discontinuities, density, matches)


def spin_coherent_state(theta, phi, n):
    if n < 1:
        raise PreconditionError(f"need at least one particle, got n={n}")
    j = n / 2.0
    m = np.arange(n + 1) - j
    up = np.arange(n + 1)
    amplitudes = (
        np.sqrt(comb(n, up))
        * np.cos(theta / 2.0) ** up
        * np.sin(theta / 2.0) ** (n - up)
        * np.exp(-1j * m * phi)
    )
    amplitudes /= np.linalg.norm(amplitudes)
    return QuantumState(amplitudes, n)


def _moments(psi, ops, products):
    mean = np.array([np.real(np.vdot(psi, op @ psi)) for op in ops])
    second = np.array([[np.real(np.vdot(psi, prod @ psi)) for prod in row] for row in products])
    return mean, second - np.outer(mean, mean)


def evolve_moments(state, cfg, times, spectrum=None):
    """First and second moments of J along exp(-iHt)|state>."""
    if cfg.n != state.n:
        raise PreconditionError(f"state has n={state.n}, config has n={cfg.n}")
    spins = spin_matrices(cfg.n)
    if spectrum is None or spectrum.vectors is None:
        spectrum = eigensystem(build_hamiltonian(cfg, spins), config=cfg, vectors=True)
    basis = spectrum.vectors
    coefficients = basis.conj().T @ state.amplitudes
    ops = spins.ops
    products = [[(a @ b + b @ a) / 2.0 for b in ops] for a in ops]

    rows = []
    for t in np.asarray(times, dtype=float):
        psi = basis @ (np.exp(-1j * spectrum.energies * t) * coefficients)
        mean, cov = _moments(psi, ops, products)
        e_theta, e_phi = tangent_basis(mean)
        frame = np.column_stack([e_theta, e_phi])
        major, minor, tilt = covariance_ellipse(frame.T @ cov @ frame)
        rows.append((
            t, *mean,
            cov[0, 0], cov[0, 1], cov[0, 2], cov[1, 1], cov[1, 2], cov[2, 2],
            major, minor, tilt, float(np.linalg.norm(psi)),
        ))
    return pd.DataFrame(rows, columns=MOMENT_COLUMNS)


def classical_track(theta, phi, cfg, times):
    """Classical trajectory of the mapped rigid body from J = (N/2) n(theta, phi)."""
    body, gauge = classical_from_quantum(cfg)
    bigj = cfg.n / 2.0
    start = bigj * np.array([
        math.sin(theta) * math.cos(phi),
        math.sin(theta) * math.sin(phi),
        math.cos(theta),
    ])
    rate = float(np.max(np.abs(cfg.chi))) * bigj + float(np.max(np.abs(cfg.omega))) or 1.0
    dt_max = 1e-3 / rate
    times = np.asarray(times, dtype=float)
    logger.debug("Classical track with gauge %s over %s times", gauge, len(times))

    rows, state, now = [], start, 0.0
    for t in times:
        span = t - now
        if span < 0:
            raise PreconditionError("times must be ascending from 0")
        if span > 0:
            steps = max(1, math.ceil(span / dt_max))
            state = propagate(state, body, span / steps, steps)[-1, 0]
            now = t
        rows.append((t, *state))
    return pd.DataFrame(rows, columns=["t", "j1", "j2", "j3"])


def extreme_dicke_index(chi, omega, n):
    """m of the extreme-energy Dicke state of chi J3^2 + Omega J3, and whether it is degenerate."""
    if chi == 0:
        raise PreconditionError("no nonlinearity: every extreme is at m = +-j")
    j = n / 2.0
    vertex = -omega / (2.0 * chi)
    if n % 2 == 0:
        m = math.floor(vertex + 0.5)
    else:
        m = math.floor(vertex + 1.0) - 0.5
    clipped = min(max(m, -j), j)
    ratio = omega / chi + n
    degenerate = (
        clipped == m
        and abs(ratio - round(ratio)) <= defaults["degeneracy_tolerance"]
        and round(ratio) % 2 == 1
        and -j <= vertex <= j
    )
    return clipped, bool(degenerate)


def coaxial_quantum_regime(chi, omega, n):
    return "dominant-rotation" if abs(chi) * n < abs(omega) else "dominant-nonlinearity"
