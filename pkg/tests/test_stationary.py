import numpy as np
import pytest
from numpy.polynomial import polynomial as P

from correspondence import TwistingConfig, quantum_from_classical
from dynamics import BodyState, InertiaConfig
from errors import DegenerateAxisError, NotLmgError, PreconditionError
from stationary import (
    ORACLE_KINDS,
    PhaseInterval,
    brute_force_stationary,
    classify_stability,
    degenerate_rings,
    lmg_curvature_radii,
    lmg_stationary_energies,
    lmg_zone,
    phase_sweep,
    poly_coeffs_classical,
    poly_coeffs_quantum,
    stationary_points,
)

LMG = TwistingConfig(4.0, 3.0, 2.0, 0.0, 0.0, 3.0)
SWAP = {"StableMin": "StableMax", "StableMax": "StableMin", "Saddle": "Saddle"}


def _nearest(points, vector):
    return min(points, key=lambda p: np.linalg.norm(p.vector - vector))


def test_lmg_points_energies_and_stability():
    points = stationary_points(LMG, 1.0)
    assert [p.energy for p in points] == pytest.approx([-1.0, 5.0, 5.125, 5.125])
    assert [p.stability for p in points] == ["StableMin", "Saddle", "StableMax", "StableMax"]
    for point in points:
        assert point.j.norm == pytest.approx(1.0)


def test_lmg_closed_forms_match_located_points():
    points = stationary_points(LMG, 1.0)
    levels = {level.label: level for level in lmg_stationary_energies(LMG, 1.0)}
    assert not levels["v"].exists and not levels["vi"].exists
    existing = sorted(level.energy for level in levels.values() if level.exists)
    assert existing == pytest.approx([p.energy for p in points])
    for radii in lmg_curvature_radii(LMG, 1.0):
        point = _nearest(points, radii.j)
        assert point.vector == pytest.approx(radii.j, abs=1e-9)
        assert (point.r1, point.r2) == pytest.approx((radii.r1, radii.r2), rel=1e-9)


def test_closed_forms_need_lmg_form():
    with pytest.raises(NotLmgError):
        lmg_stationary_energies(TwistingConfig(1.0, 2.0, 3.0, 0.5, 0.0, 0.0), 1.0)


def test_principal_axes_of_free_top():
    points = stationary_points(InertiaConfig(1.0, 2.0, 3.0), 1.0)
    assert len(points) == 6
    assert [p.stability for p in points] == ["StableMin"] * 2 + ["Saddle"] * 2 + ["StableMax"] * 2
    assert [p.energy for p in points] == pytest.approx([1 / 6, 1 / 6, 0.25, 0.25, 0.5, 0.5])
    assert all(p.branch == "axis-pole" for p in points)


def test_body_and_twisting_pictures_agree():
    body = InertiaConfig(1.0, 3.0, 2.0, 0.2, -0.1, 0.3)
    classical = stationary_points(body, 1.5)
    twisted = stationary_points(quantum_from_classical(body), 1.5)
    assert len(classical) == len(twisted)
    for point in classical:
        partner = _nearest(twisted, point.vector)
        assert partner.vector == pytest.approx(point.vector, abs=1e-9)
        assert partner.stability == SWAP[point.stability]


def test_located_points_are_stationary():
    cfg = TwistingConfig(0.7, -1.1, 0.4, 0.3, -0.6, 0.5)
    for point in stationary_points(cfg, 1.0):
        assert classify_stability(point, cfg, 1.0) == point.stability


def test_classify_stability_rejects_moving_point():
    with pytest.raises(PreconditionError):
        classify_stability(BodyState(0.6, 0.8, 0.0), InertiaConfig(1.0, 2.0, 3.0), 1.0)


def test_non_positive_norm_rejected():
    with pytest.raises(PreconditionError):
        stationary_points(LMG, 0.0)


def test_polynomials_reject_degenerate_pivot():
    with pytest.raises(DegenerateAxisError):
        poly_coeffs_classical(InertiaConfig(2.0, 1.0, 2.0, 0.1, 0.1, 0.1), 1.0)
    with pytest.raises(DegenerateAxisError):
        poly_coeffs_quantum(TwistingConfig(1.0, 2.0, 2.0, 0.1, 0.1, 0.1), 1.0)


def test_polynomial_roots_are_pivot_components():
    cfg = TwistingConfig(0.7, -1.1, 0.4, 0.3, -0.6, 0.5)
    poly = poly_coeffs_quantum(cfg, 1.0)
    for point in stationary_points(cfg, 1.0):
        assert abs(poly(point.vector[2])) < 1e-9


def test_degenerate_ring_is_reported():
    rings = degenerate_rings(TwistingConfig(1.0, 1.0, 3.0, 0.0, 0.0, 1.0), 1.0)
    assert len(rings) == 1
    assert rings[0].axis == 3
    assert rings[0].height == pytest.approx(-0.25)
    assert rings[0].radius == pytest.approx(np.sqrt(1.0 - 0.0625))


def test_isotropic_config_is_one_ring():
    assert len(degenerate_rings(TwistingConfig(1.0, 1.0, 1.0), 1.0)) == 1


def test_lmg_phase_sweep():
    grid = np.linspace(0.05, 6.0, 60)
    diagram = phase_sweep(TwistingConfig(4.0, 3.0, 2.0), [0.0, 0.0, 1.0], grid, 1.0)
    assert diagram.criticals == pytest.approx([2.0, 4.0], abs=1e-6)
    assert [i.points for i in diagram.intervals] == [6, 4, 2]
    assert [i.zone for i in diagram.intervals] == ["IV", "II", "I"]
    frame = diagram.to_frame()
    assert frame.groupby("omega_mag").size().max() == 6
    assert diagram.report()["criticals"][0]["omega_over_j"] == pytest.approx(2.0, abs=1e-6)


def test_sweep_grid_must_ascend():
    with pytest.raises(PreconditionError):
        phase_sweep(LMG, [0.0, 0.0, 1.0], [1.0, 0.5], 1.0)


def test_sweep_with_middle_axis_along_the_field():
    grid = np.linspace(0.05, 6.0, 60)
    diagram = phase_sweep(TwistingConfig(1.0, 4.0, 2.0), [0.0, 0.0, 1.0], grid, 1.0)
    assert diagram.criticals == pytest.approx([2.0, 4.0], abs=1e-6)
    assert [i.points for i in diagram.intervals] == [6, 4, 2]
    assert [i.zone for i in diagram.intervals] == ["III", "II", "I"]


def test_tilted_field_splits_all_but_one_pair():
    direction = np.array([1.0, 2.0, 0.0]) / np.sqrt(5.0)
    diagram = phase_sweep(TwistingConfig(4.0, 3.0, 2.0), direction, np.linspace(0.05, 0.5, 10), 1.0)
    assert diagram.criticals == []
    [interval] = diagram.intervals
    assert interval.points == 6
    # J3 -> -J3 keeps the minima near the poles paired
    assert interval.degenerate_extrema
    assert not interval.degenerate_saddles
    for points in diagram.points:
        kinds = [p.stability for p in points]
        assert sum(k in ("StableMin", "StableMax") for k in kinds) - kinds.count("Saddle") == 2


def test_pole_is_marginal_at_the_critical_field():
    cfg = TwistingConfig(4.0, 3.0, 2.0, 0.0, 0.0, 2.0)
    assert classify_stability(np.array([0.0, 0.0, 1.0]), cfg, 1.0) == "Marginal"
    assert classify_stability(np.array([0.0, 0.0, -1.0]), cfg, 1.0) == "StableMin"


@pytest.mark.parametrize(
    "saddles, degenerate, zone",
    [(0, False, "I"), (1, False, "II"), (2, False, "III"), (2, True, "IV"), (3, False, None)],
)
def test_zone_labels(saddles, degenerate, zone):
    interval = PhaseInterval(0.0, 1.0, 6, saddles, degenerate, False)
    assert lmg_zone(interval) == zone


# Grid oracle ---------------------------------------------------------------------

_GRID_POLE = np.array([-0.48, -0.64, 0.60])


def _tangent_hessian(cfg, vector):
    lam = vector @ (2.0 * cfg.chi * vector + cfg.omega) / (2.0 * vector @ vector)
    tangent = np.linalg.svd(vector[None, :])[2][1:]
    return np.linalg.eigvalsh(tangent @ (2.0 * np.diag(cfg.chi - lam)) @ tangent.T)


def _reference_points(cfg, bigj):
    """Stationary momenta from the multiplier equation sum w_k / (lam - chi_k)^2 = J^2."""
    factors = [P.polyfromroots([c, c]) for c in cfg.chi]
    total = -bigj**2 * P.polymul(P.polymul(factors[0], factors[1]), factors[2])
    for k in range(3):
        others = [factors[j] for j in range(3) if j != k]
        total = P.polyadd(total, cfg.omega[k] ** 2 / 4.0 * P.polymul(*others))
    points = []
    for lam in P.polyroots(total):
        if 1e-9 < abs(lam.imag) < 1e-3:
            # Near-double multiplier: two points about to merge
            return None
        if abs(lam.imag) > 1e-9:
            continue
        vector = cfg.omega / (2.0 * (lam.real - cfg.chi))
        if abs(np.linalg.norm(vector) - bigj) < 1e-6:
            points.append(vector)
    return points


def _well_conditioned(cfg, references):
    if not references:
        return False
    units = [v / np.linalg.norm(v) for v in references]
    for u in units:
        curvature = np.abs(_tangent_hessian(cfg, u))
        if curvature.min() < 0.3 or curvature.max() > 10.0 * curvature.min():
            return False
        if abs(u @ _GRID_POLE) > np.cos(0.2):
            return False
    for a in range(len(units)):
        for b in range(a + 1, len(units)):
            if np.arccos(np.clip(units[a] @ units[b], -1.0, 1.0)) < 0.3:
                return False
    return True


@pytest.mark.slow
def test_grid_oracle_agrees_on_random_configs():
    rng = np.random.default_rng(2024)
    checked = 0
    for _ in range(5000):
        cfg = TwistingConfig(*rng.uniform(-2.0, 2.0, 3), *rng.uniform(-1.0, 1.0, 3))
        references = _reference_points(cfg, 1.0)
        if not _well_conditioned(cfg, references):
            continue
        points = stationary_points(cfg, 1.0)
        assert len(points) == len(references)
        hits = brute_force_stationary(cfg, 1.0)
        assert len(hits) == len(points)
        assert sorted(ORACLE_KINDS[h.kind] for h in hits) == sorted(p.stability for p in points)
        for point in points:
            hit = min(hits, key=lambda h: np.linalg.norm(h.direction - point.vector))
            assert np.linalg.norm(hit.direction - point.vector) < 0.05
            assert ORACLE_KINDS[hit.kind] == point.stability
        checked += 1
        if checked == 20:
            break
    assert checked == 20


def test_extrema_outnumber_saddles_by_two():
    rng = np.random.default_rng(2024)
    for _ in range(200):
        cfg = TwistingConfig(*rng.uniform(-2.0, 2.0, 3), *rng.uniform(-1.0, 1.0, 3))
        points = stationary_points(cfg, 1.0)
        kinds = [p.stability for p in points]
        if "Marginal" in kinds:
            continue
        extrema = sum(kind in ("StableMin", "StableMax") for kind in kinds)
        assert extrema - kinds.count("Saddle") == 2


def test_small_transverse_field_keeps_both_maxima():
    cfg = TwistingConfig(4.0, 3.0, 2.0).with_omega(0.05 * np.array([1.0, 2.0, 0.0]) / np.sqrt(5.0))
    points = stationary_points(cfg, 1.0)
    kinds = [p.stability for p in points]
    assert sorted(kinds) == sorted(["StableMin"] * 2 + ["Saddle"] * 2 + ["StableMax"] * 2)
    maxima = [p.vector for p in points if p.stability == "StableMax"]
    assert sorted(abs(v[0]) for v in maxima) == pytest.approx([1.0, 1.0], abs=1e-3)


def test_oracle_rejects_coarse_grid():
    with pytest.raises(PreconditionError):
        brute_force_stationary(LMG, 1.0, grid_resolution=(16, 32))
