"""Periodic reshaping of a rotor-carrying body and its stroboscopic response.

Shape A is a plate with the rotor perpendicular to its symmetry axis
(I = (2 i0, i0, i0)); shape B is a coaxial symmetric top (I = (i0, i0, 2 i0)).
Both carry K = (0, 0, k3). Reshaping is instantaneous, so J is continuous
across a switch while the body energy jumps.
"""
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np
import pandas as pd
from statsmodels.tsa.stattools import acf

from defaults import defaults
from dynamics import BodyState, InertiaConfig, Trajectory, audit, propagate
from errors import (
    IntegrationDivergedError,
    NoBistabilityError,
    PreconditionError,
    UndefinedProtocolError,
)
from logger import logger

STROBOSCOPIC_COLUMNS = ["period_index", "j1", "j2", "j3"]
SCAN_COLUMNS = ["tau0", "escaped", "escape_period", "period", "dispersion"]

# The usual start (1.2, 0.02, 1.98) is quoted for dJ/dt = omega x J; its
# mirror image in J2 follows the same motion under dJ/dt = J x omega
BISTABLE_INITIAL = BodyState(1.2, -0.02, 1.98)


def swap_time(i0, k3):
    """Dwell in shape B that turns the stationary state J+ into J-."""
    if i0 <= 0:
        raise PreconditionError(f"i0 must be positive, got {i0}")
    if k3 == 0:
        raise UndefinedProtocolError("no rotor: the swap precession never happens")
    if k3 < 0:
        raise UndefinedProtocolError(f"k3={k3} gives a negative dwell; flip the rotor sign convention")
    return 2.0 * math.pi * i0 / (3.0 * k3)


def stationary_pair(i0, k3, bigj):
    """The two stable stationary momenta of shape A, (J+, J-)."""
    if i0 <= 0:
        raise PreconditionError(f"i0 must be positive, got {i0}")
    edge = 2.0 * abs(k3)
    if bigj < edge:
        raise NoBistabilityError(f"|J|={bigj} is below 2|k3|={edge}")
    j1 = math.sqrt(max(bigj**2 - 4.0 * k3**2, 0.0))
    return BodyState(j1, 0.0, 2.0 * k3), BodyState(-j1, 0.0, 2.0 * k3)


@dataclass(frozen=True)
class FloquetProtocol:
    shape_a: InertiaConfig
    shape_b: InertiaConfig
    tau0: float
    tau_swap: float
    dt: float

    def __post_init__(self):
        if self.tau0 <= 0 or self.tau_swap <= 0:
            raise PreconditionError(f"dwell times must be positive, got {self.tau0}, {self.tau_swap}")
        if self.dt <= 0:
            raise PreconditionError(f"dt must be positive, got {self.dt}")
        if not np.array_equal(self.shape_a.rotor, self.shape_b.rotor):
            raise PreconditionError("both shapes must carry the same rotor")

    @classmethod
    def build(cls, i0, k3, tau0, tau_swap=None, steps_per_period=None):
        tau_swap = swap_time(i0, k3) if tau_swap is None else tau_swap
        steps = steps_per_period or defaults["floquet_steps_per_period"]
        return cls(
            shape_a=InertiaConfig.formal(2.0 * i0, i0, i0, 0.0, 0.0, k3),
            shape_b=InertiaConfig.formal(i0, i0, 2.0 * i0, 0.0, 0.0, k3),
            tau0=float(tau0),
            tau_swap=float(tau_swap),
            dt=(tau0 + tau_swap) / steps,
        )

    @property
    def i0(self):
        return self.shape_a.i2

    @property
    def k3(self):
        return self.shape_a.k3

    @property
    def period(self):
        return self.tau0 + self.tau_swap

    def segments(self):
        """(label, config, duration, steps, dt) for the two dwells of one period."""
        out = []
        for label, cfg, duration in (("A", self.shape_a, self.tau0), ("B", self.shape_b, self.tau_swap)):
            steps = max(1, round(duration / self.dt))
            out.append((label, cfg, duration, steps, duration / steps))
        return out

    def with_tau0(self, tau0):
        return replace(self, tau0=float(tau0))

    def to_json(self):
        return {"i0": self.i0, "k3": self.k3, "tau0": self.tau0, "tau_swap": self.tau_swap, "dt": self.dt}


def bistable_protocol():
    """Plate with i0 = 1, k3 = 1, a 45.20 dwell and an exact half-turn swap."""
    return FloquetProtocol.build(1.0, 1.0, 45.20)


@dataclass
class StroboscopicRecord:
    samples: pd.DataFrame
    period: int = None
    escaped: bool = False
    escape_period: int = None
    diverged: bool = False
    even_center: np.ndarray = field(default_factory=lambda: np.full(2, np.nan))
    odd_center: np.ndarray = field(default_factory=lambda: np.full(2, np.nan))
    dispersion: float = float("nan")

    @property
    def states(self):
        return [BodyState.from_vector(v) for v in self.samples[["j1", "j2", "j3"]].to_numpy()]

    def summary(self):
        return {
            "periods": int(len(self.samples) - 1),
            "period": self.period,
            "escaped": self.escaped,
            "escape_period": self.escape_period,
            "diverged": self.diverged,
            "even_center": [float(x) for x in self.even_center],
            "odd_center": [float(x) for x in self.odd_center],
            "dispersion": float(self.dispersion),
        }


def detect_period(values):
    """Subharmonic period (in drive periods) of a stroboscopic series."""
    x = np.asarray(values, dtype=float)
    if len(x) < 3:
        raise PreconditionError(f"need at least 3 stroboscopic samples, got {len(x)}")
    signs = np.sign(x)
    flips = float(np.mean(signs[1:] != signs[:-1]))
    if flips >= 0.9:
        return 2
    if flips <= 0.1:
        return 1
    lags = min(len(x) // 2, 20)
    correlation = acf(x, nlags=lags, fft=True)
    return int(np.argmax(correlation[1:]) + 1)


def _clusters(points):
    xy = points[:, :2]
    even, odd = xy[0::2], xy[1::2]
    even_center = even.mean(axis=0)
    odd_center = odd.mean(axis=0) if len(odd) else np.full(2, np.nan)
    spread = np.linalg.norm(even - even_center, axis=1).max()
    if len(odd):
        spread = max(spread, np.linalg.norm(odd - odd_center, axis=1).max())
    return even_center, odd_center, float(spread)


def _escaped(sample, pair, limit):
    return min(np.linalg.norm(sample - p) for p in pair) > limit


def run_protocol(protocol, initial, periods, sample_every=None):
    """Alternate shapes A and B for ``periods`` drive periods.

    Returns the decimated full trajectory (with a ``shape`` column) and the
    stroboscopic record sampled at each period boundary.
    """
    if periods < 1:
        raise PreconditionError(f"need at least one period, got {periods}")
    every = sample_every or defaults["floquet_sample_every"]
    state = initial.vector if isinstance(initial, BodyState) else np.asarray(initial, dtype=float)
    bigj = float(np.linalg.norm(state))

    try:
        plus, minus = stationary_pair(protocol.i0, protocol.k3, bigj)
        pair = (plus.vector, minus.vector)
        limit = defaults["escape_fraction"] * float(np.linalg.norm(pair[0] - pair[1]))
    except NoBistabilityError:
        logger.warning("No bistability at |J|=%s; every sample counts as escaped", bigj)
        pair, limit = None, None

    segments = protocol.segments()
    strobe = [state.copy()]
    pieces = []
    escape_period = None
    diverged = False
    now = 0.0

    for k in range(1, periods + 1):
        try:
            for label, cfg, duration, steps, dt in segments:
                path = propagate(state, cfg, dt, steps)[:, 0, :]
                kept = path[:-1:every]
                pieces.append((label, cfg, now + dt * every * np.arange(len(kept)), kept))
                state = path[-1].copy()
                now += duration
        except IntegrationDivergedError as e:
            logger.warning("Protocol diverged in period %s", k)
            diverged = True
            escape_period = escape_period or k
            if e.samples is not None and len(e.samples):
                state = e.samples[e.last_valid_index, 0, :]
            break
        strobe.append(state.copy())
        if escape_period is None and (pair is None or _escaped(state, pair, limit)):
            escape_period = k
            logger.info("Stroboscopic state left the regular region in period %s", k)

    pieces.append(("A", protocol.shape_a, np.array([now]), state[None, :]))
    frames = []
    for label, cfg, times, samples in pieces:
        e_body, j_sq = audit(samples, cfg)
        frames.append(pd.DataFrame({
            "t": times,
            "j1": samples[:, 0],
            "j2": samples[:, 1],
            "j3": samples[:, 2],
            "e_body": e_body,
            "j_sq": j_sq,
            "shape": label,
        }))
    trajectory = Trajectory(frame=pd.concat(frames, ignore_index=True), dt=protocol.dt * every)

    points = np.array(strobe)
    samples = pd.DataFrame(points, columns=["j1", "j2", "j3"])
    samples.insert(0, "period_index", np.arange(len(points)))
    record = StroboscopicRecord(
        samples=samples,
        escaped=escape_period is not None,
        escape_period=escape_period,
        diverged=diverged,
    )
    if len(points) >= 3:
        record.period = detect_period(points[:, 0])
    if len(points) >= 2:
        record.even_center, record.odd_center, record.dispersion = _clusters(points)
    logger.info(
        "Ran %s periods: period=%s escaped=%s dispersion=%s",
        len(points) - 1, record.period, record.escaped, record.dispersion,
    )
    return trajectory, record


def scan_dwell(protocol, initial, tau0_grid, periods, threads=1):
    """Map regular windows over the shape-A dwell time."""

    def one(tau0):
        _, record = run_protocol(protocol.with_tau0(tau0), initial, periods)
        return (float(tau0), record.escaped, record.escape_period, record.period, record.dispersion)

    with ThreadPoolExecutor(max_workers=max(1, threads)) as pool:
        rows = list(pool.map(one, tau0_grid))
    logger.info("Scanned %s dwell times", len(rows))
    return pd.DataFrame(rows, columns=SCAN_COLUMNS)
