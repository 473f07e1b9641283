"""Degree-6 monic polynomials in one momentum component and real-root
isolation on [-J, J]."""
from dataclasses import dataclass

import numpy as np
from numpy.polynomial import polynomial as P

from defaults import defaults
from errors import PreconditionError
from logger import logger


@dataclass(frozen=True)
class Degree6Poly:
    coefficients: np.ndarray

    def __post_init__(self):
        a = np.asarray(self.coefficients, dtype=float)
        if a.shape != (7,):
            raise PreconditionError(f"expected 7 coefficients, got {a.shape}")
        if not np.all(np.isfinite(a)):
            raise PreconditionError(f"non-finite coefficients {a}")
        if a[6] != 1.0:
            raise PreconditionError(f"leading coefficient must be 1, got {a[6]}")
        object.__setattr__(self, "coefficients", a)

    def __call__(self, x):
        return P.polyval(x, self.coefficients)


@dataclass(frozen=True)
class Root:
    x: float
    double: bool = False


def _bisect(f, lo, hi, flo, steps):
    for _ in range(steps):
        mid = 0.5 * (lo + hi)
        fm = f(mid)
        if fm == 0.0 or mid in (lo, hi):
            return mid
        if (fm < 0.0) == (flo < 0.0):
            lo, flo = mid, fm
        else:
            hi = mid
    return 0.5 * (lo + hi)


def _polish(f, df, x, lo, hi, steps):
    best, fbest = x, abs(f(x))
    for _ in range(steps):
        slope = df(x)
        if slope == 0.0:
            break
        x = x - f(x) / slope
        if not lo <= x <= hi:
            break
        fx = abs(f(x))
        if fx >= fbest:
            break
        best, fbest = x, fx
    return best


def _scale(coef, bigj):
    """Magnitude of the largest term on |x| <= bigj."""
    return float(np.max(np.abs(coef) * bigj ** np.arange(len(coef))))


def _isolate(coef, bigj, grid):
    """Roots of ``coef`` on [-bigj, bigj] as (x, multiple) pairs.

    The critical points of the polynomial, found by the same routine on its
    derivative, join the pre-grid as breakpoints. The polynomial is monotone
    between consecutive breakpoints, so a pair of close roots is always split
    by the critical point between them.
    """
    coef = P.polytrim(np.asarray(coef, dtype=float))
    degree = len(coef) - 1
    if degree < 1:
        return []
    if degree == 1:
        x = -coef[0] / coef[1]
        return [(float(x), False)] if -bigj <= x <= bigj else []

    steps = defaults["root_bisection_steps"]
    newton = defaults["root_newton_steps"]
    tiny = defaults["double_root_residual"] * _scale(coef, bigj)
    dcoef = P.polyder(coef)
    dtiny = defaults["double_root_residual"] * _scale(dcoef, bigj)
    f = lambda x: P.polyval(x, coef)  # noqa: E731
    df = lambda x: P.polyval(x, dcoef)  # noqa: E731

    critical = [x for x, _ in _isolate(dcoef, bigj, grid)]
    nodes = np.unique(np.concatenate([grid, critical]))
    values = f(nodes)
    found = []

    for i in np.nonzero(values[:-1] * values[1:] < 0.0)[0]:
        x = _bisect(f, nodes[i], nodes[i + 1], values[i], steps)
        found.append((float(_polish(f, df, x, nodes[i], nodes[i + 1], newton)), False))

    for x in critical:
        if abs(f(x)) <= tiny:
            found.append((float(x), True))

    # Nodes that sit on a root exactly, the interval ends among them
    for x, value in zip(nodes, values):
        if abs(value) <= tiny and (value == 0.0 or x in (-bigj, bigj)):
            found.append((float(x), bool(abs(df(x)) <= dtiny)))
    return found


def real_roots(poly, bigj):
    """Real roots in [-bigj, bigj], sorted, with multiple roots flagged."""
    if bigj <= 0:
        raise PreconditionError(f"J must be positive, got {bigj}")
    cells = defaults["root_grid_cells"]

    # Chebyshev-style nodes cluster at the ends where the poles sit
    grid = -bigj * np.cos(np.pi * np.arange(cells + 1) / cells)
    grid[0], grid[-1] = -bigj, bigj
    found = [Root(x, double) for x, double in _isolate(poly.coefficients, bigj, grid)]

    roots = _dedupe(found, bigj)
    logger.debug("Polynomial roots on [-%s, %s]: %s", bigj, bigj, [r.x for r in roots])
    return roots


def _dedupe(found, bigj):
    tol = defaults["root_dedupe"] * bigj
    merge = defaults["double_root_merge"] * bigj
    doubles = [r.x for r in found if r.double]
    roots = []
    for root in sorted(found, key=lambda r: r.x):
        # Roundoff splits a double root into nearby simple crossings
        if not root.double and any(abs(root.x - d) <= merge for d in doubles):
            continue
        if roots and abs(root.x - roots[-1].x) <= tol:
            if root.double and not roots[-1].double:
                roots[-1] = root
            continue
        roots.append(root)
    return roots
