import numpy as np
import pytest

from correspondence import (
    Gauge,
    LmgParams,
    TwistingConfig,
    classical_from_quantum,
    classify_regime,
    energy_offset,
    gauge_shift_classical,
    gauge_shift_quantum,
    hamiltonian_energy,
    lmg_from_twisting,
    quantum_from_classical,
    regime_of,
    twist_and_turn_form,
    twist_and_turn_phase,
    twisting_from_lmg,
    twisting_rates,
)
from dynamics import BodyState, InertiaConfig, body_energy, djdt
from errors import InvalidGaugeError, NotApplicableError, NotLmgError


@pytest.fixture
def rng():
    return np.random.default_rng(7)


def _random_state(rng, scale=1.0):
    return BodyState.from_vector(scale * rng.normal(size=3))


def test_quantum_from_classical_values():
    cfg = quantum_from_classical(InertiaConfig(1.0, 2.0, 4.0, 0.5, 0.0, -2.0))
    assert cfg.chi == pytest.approx([-0.5, -0.25, -0.125])
    assert cfg.omega == pytest.approx([0.5, 0.0, -0.5])


def test_twisting_rates_match_euler_equations(rng):
    body = InertiaConfig(1.0, 3.0, 2.0, 0.4, -0.2, 0.7)
    twisting = quantum_from_classical(body)
    for _ in range(10):
        state = _random_state(rng, 2.0)
        assert twisting_rates(state, twisting) == pytest.approx(djdt(state, body), abs=1e-12)


def test_energies_related_by_offset(rng):
    body = InertiaConfig(1.0, 3.0, 2.0, 0.4, -0.2, 0.7)
    twisting = quantum_from_classical(body)
    for _ in range(5):
        state = _random_state(rng)
        expected = -body_energy(state, body) + energy_offset(body)
        assert hamiltonian_energy(state, twisting) == pytest.approx(expected, abs=1e-12)


def test_classical_from_quantum_reproduces_field(rng):
    twisting = TwistingConfig(0.3, -1.2, 0.8, 0.5, 0.0, -0.4)
    body, gauge = classical_from_quantum(twisting)
    assert body.satisfies_triangle()
    for _ in range(10):
        state = _random_state(rng, 3.0)
        assert djdt(state, body) == pytest.approx(twisting_rates(state, twisting), rel=1e-12, abs=1e-12)


def test_triangle_repair_keeps_field(rng):
    twisting = TwistingConfig(4.0, 3.0, 2.0, 0.0, 0.0, 1.0)
    body, gauge = classical_from_quantum(twisting)
    assert gauge.i0 is not None
    assert body.satisfies_triangle()
    for _ in range(10):
        state = _random_state(rng)
        assert djdt(state, body) == pytest.approx(twisting_rates(state, twisting), rel=1e-12, abs=1e-12)
    # the repaired body maps back to chi shifted by the total gauge constant
    back = quantum_from_classical(body)
    assert back.chi == pytest.approx(twisting.chi + gauge.total_chi0)
    assert back.omega == pytest.approx(twisting.omega)


def test_zero_chi_maps_to_sphere():
    body, gauge = classical_from_quantum(TwistingConfig(0.0, 0.0, 0.0, 0.0, 0.0, 1.0))
    assert gauge == Gauge(chi0=-1.0)
    assert body.moments == pytest.approx([0.5, 0.5, 0.5])
    assert body.rotor == pytest.approx([0.0, 0.0, 0.5])


def test_gauge_shift_classical_energy_identity(rng):
    body = InertiaConfig(1.0, 3.0, 2.0, 0.4, -0.2, 0.7)
    i0 = 2.5
    for _ in range(5):
        state = _random_state(rng, 1.5)
        shifted, offset = gauge_shift_classical(body, i0, state.norm)
        assert body_energy(state, shifted) == pytest.approx(body_energy(state, body) + offset, abs=1e-12)
        assert djdt(state, shifted) == pytest.approx(djdt(state, body), abs=1e-12)


@pytest.mark.parametrize("i0", [0.0, float("inf"), -0.5])
def test_invalid_gauge(i0):
    with pytest.raises(InvalidGaugeError):
        gauge_shift_classical(InertiaConfig(1.0, 2.0, 2.0), i0)


def test_gauge_shift_quantum_moves_every_chi():
    cfg = gauge_shift_quantum(TwistingConfig(1.0, 2.0, 3.0, 0.1, 0.2, 0.3), -0.5)
    assert cfg.chi == pytest.approx([0.5, 1.5, 2.5])
    assert cfg.omega == pytest.approx([0.1, 0.2, 0.3])


def test_lmg_parameters():
    params = lmg_from_twisting(TwistingConfig(4.0, 3.0, 2.0, 0.0, 0.0, 1.0))
    assert params == LmgParams(epsilon=1.0, v=0.5, w=1.5)
    back = twisting_from_lmg(params)
    assert back.chi == pytest.approx([2.0, 1.0, 0.0])
    assert back.omega == pytest.approx([0.0, 0.0, 1.0])


def test_transverse_field_is_not_lmg():
    with pytest.raises(NotLmgError):
        lmg_from_twisting(TwistingConfig(1.0, 2.0, 3.0, 0.1, 0.0, 0.0))


@pytest.mark.parametrize(
    "ratio, expected",
    [(150.0, "Rabi"), (5.0, "Josephson"), (0.001, "Fock"), (100.0, "boundary"), (0.01, "boundary")],
)
def test_classify_regime(ratio, expected):
    assert classify_regime(1.0, ratio, 100) == expected


def test_twist_and_turn_form_and_regime():
    cfg = TwistingConfig(0.0, 0.0, 1.0, 3.0, 4.0, 0.0, n=100)
    assert twist_and_turn_form(cfg) == pytest.approx((1.0, 5.0))
    assert regime_of(cfg) == "Josephson"


def test_twist_and_turn_form_rejects_generic_config():
    with pytest.raises(NotApplicableError):
        twist_and_turn_form(TwistingConfig(1.0, 2.0, 3.0))


def test_twist_and_turn_phase():
    assert twist_and_turn_phase(1.0, 3.0, 1.0) == "dominant-rotation"
    assert twist_and_turn_phase(1.0, 1.0, 1.0) == "dominant-twisting"
    assert twist_and_turn_phase(1.0, 2.0, 1.0) == "boundary"


def test_config_json_accepts_spin_length():
    cfg = TwistingConfig.from_json({"chi1": 1.0, "chi2": 0.0, "chi3": 0.0, "j": 5})
    assert cfg.n == 10
    assert TwistingConfig.from_json(cfg.to_json()) == cfg
