import numpy as np
import pytest
from numpy.polynomial import polynomial as P

from errors import PreconditionError
from polynomial import Degree6Poly, real_roots


def _poly(roots):
    return Degree6Poly(P.polyfromroots(roots))


def test_simple_roots_inside_interval():
    poly = _poly([-0.9, -0.3, 0.2, 0.7, 1.5, 2.0])
    roots = real_roots(poly, 1.0)
    assert [r.x for r in roots] == pytest.approx([-0.9, -0.3, 0.2, 0.7], abs=1e-12)
    for root in roots:
        assert abs(poly(root.x)) < 1e-12 * np.max(np.abs(poly.coefficients))
    assert not any(r.double for r in roots)


def test_double_root_is_flagged_once():
    poly = _poly([0.4, 0.4, -0.5, 3.0, 4.0, 5.0])
    roots = real_roots(poly, 1.0)
    assert [r.x for r in roots] == pytest.approx([-0.5, 0.4], abs=1e-6)
    assert [r.double for r in roots] == [False, True]


def test_roots_at_the_interval_ends():
    poly = _poly([-1.0, 1.0, 2.0, 3.0, 4.0, 5.0])
    roots = real_roots(poly, 1.0)
    assert [r.x for r in roots] == pytest.approx([-1.0, 1.0], abs=1e-12)


def test_no_real_roots():
    poly = Degree6Poly(np.array([1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 1.0]))
    assert real_roots(poly, 2.0) == []


def test_rejects_bad_coefficients():
    with pytest.raises(PreconditionError):
        Degree6Poly(np.array([1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 2.0]))
    with pytest.raises(PreconditionError):
        Degree6Poly(np.zeros(6))


def test_rejects_non_positive_interval():
    with pytest.raises(PreconditionError):
        real_roots(_poly([0.1, 0.2, 0.3, 0.4, 0.5, 0.6]), 0.0)


def test_close_pair_inside_one_grid_cell():
    poly = _poly([0.1, 0.1005, -0.7, 1.5, 2.0, 3.0])
    roots = real_roots(poly, 1.0)
    assert [r.x for r in roots] == pytest.approx([-0.7, 0.1, 0.1005], abs=1e-10)
    assert not any(r.double for r in roots)


def test_merger_at_the_interval_end_is_flagged():
    # (x^2 - 1)(x - 0.5)^2 (x - 1)^2: a triple root sits on the end
    poly = _poly([-1.0, 1.0, 0.5, 0.5, 1.0, 1.0])
    roots = real_roots(poly, 1.0)
    assert [r.x for r in roots] == pytest.approx([-1.0, 0.5, 1.0], abs=1e-8)
    assert [r.double for r in roots] == [False, True, True]
