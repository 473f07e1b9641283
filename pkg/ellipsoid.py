"""Principal curvature radii of an axis-aligned ellipsoid
x^2/a^2 + y^2/b^2 + z^2/c^2 = 1."""
import numpy as np

from defaults import defaults
from errors import InvalidPointError


def _check_surface(a, b, c, x, y, z, tol):
    level = x**2 / a**2 + y**2 / b**2 + z**2 / c**2
    if not np.isfinite(level) or abs(level - 1.0) > tol:
        raise InvalidPointError(
            f"point ({x}, {y}, {z}) is off the ellipsoid ({a}, {b}, {c}): level {level}"
        )


def ellipsoid_principal_radii(a, b, c, x, y, z, tol=None):
    """Return (r1, r2), r1 >= r2, at a surface point."""
    tol = defaults["surface_tolerance"] if tol is None else tol
    if min(a, b, c) <= 0:
        raise InvalidPointError(f"semi-axes must be positive, got ({a}, {b}, {c})")
    _check_surface(a, b, c, x, y, z, tol)
    abc = (a * b * c) ** 2
    s = x**2 / a**4 + y**2 / b**4 + z**2 / c**4
    t = a**2 + b**2 + c**2 - x**2 - y**2 - z**2
    root = np.sqrt(max(t**2 - 4.0 * abc * s, 0.0))
    # r1 uses r1 * r2 = (abc s)^2 / s to avoid cancellation in t - root
    r2 = 2.0 * abc * s**1.5 / (t + root)
    r1 = np.sqrt(s) * (t + root) / 2.0
    return float(r1), float(r2)


def equator_radii(a, b, c, x, y):
    """Radii at a point of the z = 0 equator: the in-plane ellipse radius and the
    normal section along z, sorted descending."""
    s = x**2 / a**4 + y**2 / b**4
    in_plane = (a * b) ** 2 * s**1.5
    along_z = c**2 * np.sqrt(s)
    return max(in_plane, along_z), min(in_plane, along_z)


def surface_normal(a, b, c, x, y, z):
    n = np.array([x / a**2, y / b**2, z / c**2])
    return n / np.linalg.norm(n)


def quadratic_fit_radii(a, b, c, x, y, z, step=None, points=5):
    """Radii from a least-squares quadratic height patch over the tangent plane.

    An independent estimate used to check the closed form.
    """
    axes = np.array([a, b, c], dtype=float)
    p = np.array([x, y, z], dtype=float)
    normal = surface_normal(a, b, c, x, y, z)
    helper = np.eye(3)[np.argmin(np.abs(normal))]
    t1 = np.cross(normal, helper)
    t1 /= np.linalg.norm(t1)
    t2 = np.cross(normal, t1)
    h = 1e-3 * axes.min() if step is None else step

    offsets = np.linspace(-h, h, points)
    u, v = [g.ravel() for g in np.meshgrid(offsets, offsets)]
    q = p + u[:, None] * t1 + v[:, None] * t2
    # Height along the normal back onto the surface, root nearest zero
    qa = np.sum((normal / axes) ** 2)
    qb = (q / axes**2) @ normal
    qc = np.sum((q / axes) ** 2, axis=1) - 1.0
    height = -qc / (qb + np.sqrt(qb**2 - qa * qc))

    design = np.column_stack([u**2, u * v, v**2, u, v, np.ones_like(u)])
    coef = np.linalg.lstsq(design, height, rcond=None)[0]
    hessian = np.array([[2 * coef[0], coef[1]], [coef[1], 2 * coef[2]]])
    curvatures = np.abs(np.linalg.eigvalsh(hessian))
    radii = np.sort(1.0 / curvatures)[::-1]
    return float(radii[0]), float(radii[1])
