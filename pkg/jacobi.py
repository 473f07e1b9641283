"""Cyclic Jacobi eigensolver for dense Hermitian matrices.

Real symmetric input is rotated directly. Complex Hermitian H = A + iB goes
through the real embedding [[A, -B], [B, A]], whose spectrum is that of H
with every level doubled.
"""
import numpy as np

from defaults import defaults
from dynamics import NUMBA_AVAILABLE, njit
from errors import NumericError, PreconditionError
from logger import logger


@njit(cache=True, nogil=True)
def _cyclic_jacobi(a, v, tol, max_sweeps):
    n = a.shape[0]
    for sweep in range(max_sweeps):
        off = 0.0
        for p in range(n - 1):
            for q in range(p + 1, n):
                off += a[p, q] * a[p, q]
        if 2.0 * off <= tol * tol:
            return sweep
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                if apq == 0.0:
                    continue
                app = a[p, p]
                aqq = a[q, q]
                tau = (aqq - app) / (2.0 * apq)
                if tau >= 0.0:
                    t = 1.0 / (tau + (1.0 + tau * tau) ** 0.5)
                else:
                    t = -1.0 / (-tau + (1.0 + tau * tau) ** 0.5)
                c = 1.0 / (1.0 + t * t) ** 0.5
                s = t * c
                for i in range(n):
                    if i != p and i != q:
                        aip = a[i, p]
                        aiq = a[i, q]
                        a[i, p] = aip * c - aiq * s
                        a[p, i] = a[i, p]
                        a[i, q] = aiq * c + aip * s
                        a[q, i] = a[i, q]
                a[p, p] = app - t * apq
                a[q, q] = aqq + t * apq
                a[p, q] = 0.0
                a[q, p] = 0.0
                for i in range(n):
                    vip = v[i, p]
                    viq = v[i, q]
                    v[i, p] = vip * c - viq * s
                    v[i, q] = viq * c + vip * s
    return max_sweeps


def check_hermitian(h, tol=None):
    tol = defaults["hermitian_tolerance"] if tol is None else tol
    h = np.asarray(h)
    if h.ndim != 2 or h.shape[0] != h.shape[1]:
        raise PreconditionError(f"expected a square matrix, got shape {h.shape}")
    scale = max(1.0, float(np.max(np.abs(h)))) if h.size else 1.0
    if np.max(np.abs(h - h.conj().T), initial=0.0) > tol * scale:
        raise PreconditionError("matrix is not Hermitian")


def jacobi_symmetric(a):
    """Eigenvalues (ascending) and eigenvectors (columns) of a real symmetric matrix."""
    work = np.array(a, dtype=np.float64, copy=True)
    n = work.shape[0]
    vectors = np.eye(n)
    norm = float(np.linalg.norm(work))
    tol = defaults["jacobi_tolerance"] * max(norm, 1e-300)
    sweeps = _cyclic_jacobi(work, vectors, tol, defaults["jacobi_max_sweeps"])
    if sweeps >= defaults["jacobi_max_sweeps"]:
        logger.warning("Jacobi hit the sweep limit on a %sx%s matrix", n, n)
    logger.debug("Jacobi converged in %s sweeps (n=%s, numba=%s)", sweeps, n, NUMBA_AVAILABLE)
    values = np.diag(work).copy()
    order = np.argsort(values, kind="stable")
    return values[order], vectors[:, order]


def _group(values, tol):
    groups, start = [], 0
    for i in range(1, len(values) + 1):
        if i == len(values) or values[i] - values[i - 1] > tol:
            groups.append(list(range(start, i)))
            start = i
    return groups


def jacobi_hermitian(h, want_vectors=True):
    """Eigenvalues (ascending) and, optionally, unitary eigenvectors of a Hermitian matrix."""
    check_hermitian(h)
    h = np.asarray(h)
    if not np.iscomplexobj(h) or not np.any(h.imag):
        values, vectors = jacobi_symmetric(np.real(h))
        return values, (vectors.astype(complex) if want_vectors else None)

    n = h.shape[0]
    a, b = h.real, h.imag
    embedded = np.block([[a, -b], [b, a]])
    doubled, basis = jacobi_symmetric(embedded)
    values = doubled[::2].copy()
    if not want_vectors:
        return values, None

    # Each level of H appears twice; the pair spans one complex direction
    tol = defaults["degeneracy_tolerance"] * max(1.0, float(np.max(np.abs(doubled))))
    vectors = np.zeros((n, n), dtype=complex)
    column = 0
    for members in _group(doubled, tol):
        complex_cols = basis[:n, members] + 1j * basis[n:, members]
        left = np.linalg.svd(complex_cols, full_matrices=False)[0]
        d = len(members) // 2
        vectors[:, column:column + d] = left[:, :d]
        column += d
    if column != n:
        raise NumericError(f"doubled spectrum did not pair up: {column} of {n} eigenvectors")
    return values, vectors
