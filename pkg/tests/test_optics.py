"""
Testes - Optics
Perfil gaussiano elíptico, ledger de perdas, Rabi por potência e micromovimento.
"""

import numpy as np
import pytest
from scipy.integrate import dblquad

from iongate.errors import PhysicsDomainError
from iongate.optics import (
    BeamProfile,
    LossLedger,
    balanced_positions,
    beam_intensity,
    calibrate_coupling,
    crosstalk_db,
    emission_k_vector,
    micromotion_ratio,
    modulation_index,
    pi_time,
    rabi_from_power,
    rabi_imbalance,
)
from iongate.optics.beam import DEVICE_WAIST_X, DEVICE_WAIST_Y

INPUT_POWER = 1.5e-3
SPACING = 5.0e-6


@pytest.fixture
def profile():
    return BeamProfile(DEVICE_WAIST_X, DEVICE_WAIST_Y, power_at_ion_plane=1e-3)


# ============== Perfil ==============

def test_intensity_falls_to_one_over_e_squared_at_waist(profile):
    peak = beam_intensity(profile, (0.0, 0.0))
    assert peak == pytest.approx(profile.peak_intensity)
    assert beam_intensity(profile, (DEVICE_WAIST_X, 0.0)) == pytest.approx(peak / np.e ** 2, rel=1e-12)
    assert beam_intensity(profile, (0.0, DEVICE_WAIST_Y)) == pytest.approx(peak / np.e ** 2, rel=1e-12)


def test_intensity_integrates_to_power(profile):
    # integral em unidades de cintura
    scale = profile.waist_x * profile.waist_y
    total, _ = dblquad(
        lambda v, u: beam_intensity(profile, (u * profile.waist_x, v * profile.waist_y)),
        -6.0, 6.0, -6.0, 6.0,
        epsabs=0, epsrel=1e-10,
    )
    assert total * scale == pytest.approx(profile.power_at_ion_plane, rel=1e-8)


def test_intensity_accepts_arrays(profile):
    xs = np.linspace(-5e-6, 5e-6, 7)
    values = beam_intensity(profile, (xs, np.zeros_like(xs)))
    assert values.shape == (7,)
    assert values == pytest.approx(values[::-1])


def test_profile_validation():
    with pytest.raises(PhysicsDomainError):
        BeamProfile(0.0, 1e-6)
    with pytest.raises(PhysicsDomainError):
        BeamProfile(1e-6, 1e-6, k_vector=(1.0, 1.0, 0.0))


def test_emission_direction_is_unit():
    k = emission_k_vector()
    assert np.linalg.norm(k) == pytest.approx(1.0)
    assert k[0] == pytest.approx(np.sin(np.deg2rad(36.0)))


# ============== Perdas e Rabi ==============

def test_device_loss_ledger():
    ledger = LossLedger.device_default()
    assert ledger.total_db == pytest.approx(6.4)
    assert ledger.transmission == pytest.approx(10 ** -0.64)
    with pytest.raises(PhysicsDomainError):
        LossLedger((("fibre", -1.0),))


def test_predicted_pi_time_for_device_power():
    profile = BeamProfile(DEVICE_WAIST_X, DEVICE_WAIST_Y)
    rabi = rabi_from_power(INPUT_POWER, LossLedger.device_default(), profile)
    assert pi_time(rabi) == pytest.approx(2.0e-6, rel=0.05)


def test_rabi_scales_as_square_root_of_power():
    profile = BeamProfile(DEVICE_WAIST_X, DEVICE_WAIST_Y)
    ledger = LossLedger.device_default()
    low = rabi_from_power(INPUT_POWER, ledger, profile)
    assert rabi_from_power(4 * INPUT_POWER, ledger, profile) == pytest.approx(2 * low, rel=1e-12)


def test_rabi_drops_by_e_one_waist_off_axis():
    profile = BeamProfile(DEVICE_WAIST_X, DEVICE_WAIST_Y)
    ledger = LossLedger.device_default()
    center = rabi_from_power(INPUT_POWER, ledger, profile)
    off = rabi_from_power(INPUT_POWER, ledger, profile, position=(0.0, DEVICE_WAIST_Y))
    assert center / off == pytest.approx(np.e, rel=1e-12)


def test_coupling_calibration_recovers_device_constant():
    profile = BeamProfile(DEVICE_WAIST_X, DEVICE_WAIST_Y)
    coupling = calibrate_coupling(2.0e-6, INPUT_POWER, LossLedger.device_default(), profile)
    assert coupling == pytest.approx(520.8, rel=1e-3)


def test_pi_time_requires_positive_rabi():
    with pytest.raises(PhysicsDomainError):
        pi_time(0.0)


# ============== Balanceamento ==============

def test_balanced_positions_straddle_center(profile):
    x1, x2 = balanced_positions(profile, SPACING)
    assert x1 == pytest.approx(-SPACING / 2, abs=1e-15)
    assert x2 == pytest.approx(SPACING / 2, abs=1e-15)
    assert rabi_imbalance(profile, (x1, x2)) == pytest.approx(0.0, abs=1e-12)


def test_balanced_positions_follow_beam_center(profile):
    shifted = profile.with_changes(center=(1e-6, 0.0))
    x1, x2 = balanced_positions(shifted, SPACING)
    assert x1 == pytest.approx(1e-6 - SPACING / 2, abs=1e-15)
    assert x2 == pytest.approx(1e-6 + SPACING / 2, abs=1e-15)


def test_small_offset_imbalance_is_linear(profile):
    # Ω ∝ exp(−(x/w)²): 1 − Ω₁/Ω₂ ≈ 4 a δ / w² para íons em ±a
    delta, a = 20e-9, SPACING / 2
    imbalance = rabi_imbalance(profile, (-a + delta, a + delta))
    assert imbalance == pytest.approx(4 * a * delta / DEVICE_WAIST_X ** 2, rel=1e-2)


def test_crosstalk_in_db():
    assert crosstalk_db(2.4e-6, 2.6e-3) == pytest.approx(-60.70, abs=0.01)
    assert crosstalk_db(1.0, 10.0) == pytest.approx(-20.0)


# ============== Micromovimento ==============

def test_micromotion_ratio_and_inverse():
    assert micromotion_ratio(0.0) == 0.0
    assert modulation_index(0.01) == pytest.approx(0.02, rel=1e-3)
    beta = modulation_index(0.3)
    assert micromotion_ratio(beta) == pytest.approx(0.3, rel=1e-12)


def test_micromotion_index_beyond_first_zero_rejected():
    with pytest.raises(PhysicsDomainError):
        micromotion_ratio(2.5)
