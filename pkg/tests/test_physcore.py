"""
Testes - Physcore
Geometria de dois íons, Lamb-Dicke e distribuições térmicas.
"""

import numpy as np
import pytest

from iongate.errors import PhysicsDomainError, TruncationWarning
from iongate.physcore import (
    CALCIUM_40,
    COM_AXIAL,
    STR_AXIAL,
    TWO_PI,
    LambDickeWarning,
    MotionalMode,
    axial_modes,
    coulomb_balance_residual,
    debye_waller,
    equilibrium_spacing,
    fock_cutoff,
    grating_k_projection,
    khz,
    lamb_dicke,
    mhz,
    mode_vector,
    stretch_frequency,
    thermal_debye_waller_mean,
    thermal_distribution,
    thermal_tail_mass,
    to_hz,
)

OMEGA_COM = mhz(1.2)
K_729 = grating_k_projection(729e-9, np.deg2rad(36.0))


# ============== Unidades ==============

def test_unit_helpers_are_angular():
    assert khz(1.0) == pytest.approx(TWO_PI * 1e3)
    assert to_hz(mhz(2.5)) == pytest.approx(2.5e6)


# ============== Geometria ==============

def test_stretch_is_sqrt3_times_com():
    assert stretch_frequency(OMEGA_COM) / OMEGA_COM == pytest.approx(np.sqrt(3.0), rel=1e-15)


@pytest.mark.parametrize("bad", [0.0, -1.0])
def test_stretch_rejects_non_positive_frequency(bad):
    with pytest.raises(PhysicsDomainError):
        stretch_frequency(bad)


def test_equilibrium_spacing_near_five_microns():
    spacing = equilibrium_spacing(OMEGA_COM, CALCIUM_40)
    assert spacing == pytest.approx(4.96e-6, rel=0.01)
    assert spacing == pytest.approx(5.0e-6, rel=0.02)


def test_spacing_scales_as_omega_to_minus_two_thirds():
    ratio = equilibrium_spacing(2 * OMEGA_COM, CALCIUM_40) / equilibrium_spacing(OMEGA_COM, CALCIUM_40)
    assert ratio == pytest.approx(2.0 ** (-2.0 / 3.0), rel=1e-12)


def test_spacing_balances_coulomb_and_trap_forces():
    spacing = equilibrium_spacing(OMEGA_COM, CALCIUM_40)
    assert coulomb_balance_residual(spacing, OMEGA_COM, CALCIUM_40) < 1e-9


def test_mode_vectors():
    com, stretch = mode_vector(COM_AXIAL), mode_vector(STR_AXIAL)
    assert com[0] == pytest.approx(com[1])
    assert stretch[0] == pytest.approx(-stretch[1])
    assert np.dot(com, stretch) == pytest.approx(0.0, abs=1e-15)
    with pytest.raises(PhysicsDomainError):
        mode_vector("radial_0")


# ============== Lamb-Dicke ==============

def test_stretch_lamb_dicke_for_grating_beam():
    stretch = MotionalMode(STR_AXIAL, stretch_frequency(OMEGA_COM))
    eta = lamb_dicke(K_729, CALCIUM_40, stretch)
    assert abs(eta[0]) == pytest.approx(0.028, abs=1e-3)
    assert eta[0] == pytest.approx(-eta[1], rel=1e-15)


def test_lamb_dicke_halves_when_frequency_quadruples():
    mode = MotionalMode(COM_AXIAL, OMEGA_COM)
    low = lamb_dicke(K_729, CALCIUM_40, mode)
    high = lamb_dicke(K_729, CALCIUM_40, mode.with_changes(angular_frequency=4 * OMEGA_COM))
    assert high[0] == pytest.approx(low[0] / 2, rel=1e-12)


def test_zero_k_projection_gives_zero_eta():
    mode = MotionalMode(COM_AXIAL, OMEGA_COM)
    assert lamb_dicke(0.0, CALCIUM_40, mode) == (0.0, 0.0)


def test_axial_modes_derive_frequency_and_eta():
    com, stretch = axial_modes(OMEGA_COM, CALCIUM_40, K_729, nbar_com=0.1, nbar_str=0.05, heating_str=60.0)
    assert stretch.angular_frequency == pytest.approx(np.sqrt(3.0) * OMEGA_COM)
    assert com.eta[0] == pytest.approx(com.eta[1])
    assert abs(com.eta[0]) > abs(stretch.eta[0])
    assert stretch.heating_rate == 60.0


def test_mode_validation():
    with pytest.raises(PhysicsDomainError):
        MotionalMode("axial_2", OMEGA_COM)
    with pytest.raises(PhysicsDomainError):
        MotionalMode(COM_AXIAL, OMEGA_COM, nbar=-0.1)
    with pytest.warns(LambDickeWarning):
        MotionalMode("radial_0", mhz(3.5), eta=(1.2, 1.2))


# ============== Distribuições térmicas ==============

def test_zero_temperature_is_ground_state():
    dist = thermal_distribution(0.0, 10)
    assert dist.probabilities[0] == 1.0
    assert dist.mean == 0.0


def test_thermal_probabilities_at_half_phonon():
    dist = thermal_distribution(0.5, 40)
    assert dist.probabilities[0] == pytest.approx(2.0 / 3.0, rel=1e-9)
    assert dist.probabilities[1] == pytest.approx(2.0 / 9.0, rel=1e-9)


def test_default_cutoff_keeps_mean_for_hot_mode():
    dist = thermal_distribution(12.0, fock_cutoff(12.0))
    assert dist.mean == pytest.approx(12.0, rel=1e-3)
    assert dist.variance == pytest.approx(12.0 * 13.0, rel=1e-2)
    assert dist.tail_mass <= 1e-6


def test_cutoff_never_below_twenty():
    assert fock_cutoff(0.05) == 20
    assert fock_cutoff(5.0) >= 40


def test_short_truncation_warns():
    with pytest.warns(TruncationWarning):
        dist = thermal_distribution(5.0, 10)
    assert dist.tail_mass == pytest.approx(thermal_tail_mass(5.0, 10))
    assert dist.probabilities.sum() == pytest.approx(1.0)


def test_negative_nbar_rejected():
    with pytest.raises(PhysicsDomainError):
        thermal_distribution(-0.5, 20)


# ============== Debye-Waller ==============

def test_debye_waller_is_one_without_coupling():
    assert np.allclose(debye_waller(0.0, np.arange(10)), 1.0)


def test_thermal_debye_waller_mean_matches_weighted_sum():
    eta, nbar = 0.05, 3.0
    dist = thermal_distribution(nbar, fock_cutoff(nbar))
    weighted = float(np.dot(dist.probabilities, debye_waller(eta, dist.fock_numbers)))
    assert weighted == pytest.approx(thermal_debye_waller_mean(eta, nbar), rel=1e-6)
