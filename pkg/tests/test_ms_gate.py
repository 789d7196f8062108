"""
Testes - Portão MS
Fechamento do laço, fidelidade ideal, concordância analítico × numérico,
estados de Bell e varreduras de paridade.
"""

import numpy as np
import pytest
import qutip

from iongate.dynamics import (
    QuantumRegister,
    ShotOffsets,
    bell_mixture,
    ideal_bell_state,
    ms_evolve,
    parity_scan_probabilities,
    solve_gate_drive,
    spin_ket,
    state_fidelity,
)
from iongate.errors import PhysicsDomainError, TruncationOverflowError
from iongate.noise import Heating, heating_error_lindblad
from iongate.physcore import CALCIUM_40, axial_modes, grating_k_projection, khz, mhz

DETUNING = khz(15.0)


@pytest.fixture(scope="module")
def stretch():
    k = grating_k_projection(729e-9, np.deg2rad(36.0))
    _, mode = axial_modes(mhz(1.2), CALCIUM_40, k, nbar_com=0.1, nbar_str=0.05)
    return mode


@pytest.fixture(scope="module")
def square_gate(stretch):
    return solve_gate_drive(stretch, DETUNING)


# ============== Portão ideal ==============

def test_square_gate_time_is_one_loop(square_gate):
    assert square_gate.total_duration == pytest.approx(2 * np.pi / DETUNING, rel=1e-15)


def test_ideal_square_gate_reaches_bell_state(stretch, square_gate):
    result = ms_evolve(square_gate, stretch, method="analytic")
    assert result.fidelity_vs_target >= 1 - 1e-6
    assert result.at(square_gate.total_duration)[1] < 1e-6


def test_ideal_ramped_gate_reaches_bell_state(stretch):
    gate = solve_gate_drive(stretch, DETUNING, ramp=5e-6)
    result = ms_evolve(gate, stretch, method="analytic")
    assert result.fidelity_vs_target >= 1 - 1e-4
    assert result.at(gate.total_duration)[1] < 0.01


def test_ideal_target_for_stretch_mode(stretch, square_gate):
    target = ideal_bell_state(square_gate, stretch)
    expected = (spin_ket("dd") - 1j * spin_ket("uu")).unit()
    assert abs(target.overlap(expected)) == pytest.approx(1.0, abs=1e-12)


def test_analytic_and_numeric_paths_agree(stretch, square_gate):
    times = np.linspace(0.0, square_gate.total_duration, 41)
    analytic = ms_evolve(square_gate, stretch, times=times, method="analytic")
    numeric = ms_evolve(square_gate, stretch, times=times, method="numeric")
    assert np.max(np.abs(analytic.spin_populations - numeric.spin_populations)) < 1e-5
    assert numeric.fidelity_vs_target == pytest.approx(analytic.fidelity_vs_target, abs=1e-5)


def test_mode_offset_opens_the_loop(stretch, square_gate):
    ideal = ms_evolve(square_gate, stretch, method="analytic").fidelity_vs_target
    detuned = ms_evolve(
        square_gate, stretch, method="analytic", offsets=ShotOffsets(mode_offset=khz(1.0))
    ).fidelity_vs_target
    assert detuned < ideal - 1e-3


# ============== Validação ==============

def test_analytic_path_rejects_dissipators(stretch, square_gate):
    with pytest.raises(PhysicsDomainError):
        ms_evolve(square_gate, stretch, channels=[Heating(60.0)], method="analytic")


def test_analytic_path_rejects_carrier_offset(stretch, square_gate):
    with pytest.raises(PhysicsDomainError):
        ms_evolve(square_gate, stretch, method="analytic", offsets=ShotOffsets(carrier_offset=100.0))


def test_small_fock_space_overflows(stretch, square_gate):
    with pytest.raises(TruncationOverflowError):
        ms_evolve(square_gate, stretch, method="numeric", fock_dim=3)


def test_unknown_method_rejected(stretch, square_gate):
    with pytest.raises(PhysicsDomainError):
        ms_evolve(square_gate, stretch, method="magic")


# ============== Aquecimento ==============

def test_heating_lindblad_close_to_linear_estimate(stretch, square_gate):
    """ṅ = 60/s por um laço: ≈ ṅτ/2 = 2e-3"""
    error = heating_error_lindblad(Heating(60.0), square_gate, stretch)
    assert error == pytest.approx(60.0 * square_gate.total_duration / 2, rel=0.2)


# ============== Paridade ==============

def test_bell_state_parity_has_unit_contrast():
    bell = (spin_ket("dd") - 1j * spin_ket("uu")).unit()
    phases = np.linspace(0.0, np.pi, 200, endpoint=False)
    probs = parity_scan_probabilities(bell, phases)
    parity = probs[:, 0] + probs[:, 2] - probs[:, 1]
    assert np.max(parity) == pytest.approx(1.0, abs=1e-3)
    assert np.min(parity) == pytest.approx(-1.0, abs=1e-3)
    shifted = parity_scan_probabilities(bell, phases + np.pi)
    assert shifted == pytest.approx(probs, abs=1e-12)


def test_bell_mixture_reproduces_even_population_and_contrast():
    state = bell_mixture(0.994, 0.992)
    phases = np.linspace(0.0, np.pi, 400, endpoint=False)
    probs = parity_scan_probabilities(state, phases)
    parity = probs[:, 0] + probs[:, 2] - probs[:, 1]
    assert 0.5 * (np.max(parity) - np.min(parity)) == pytest.approx(0.992, abs=1e-4)
    register = QuantumRegister.from_spin_state(state)
    populations = register.basis_populations()
    assert populations["dd"] + populations["uu"] == pytest.approx(0.994, abs=1e-12)


def test_bell_mixture_validation():
    with pytest.raises(PhysicsDomainError):
        bell_mixture(0.5, 0.8)


def test_state_fidelity_of_pure_and_mixed_states():
    bell = (spin_ket("dd") - 1j * spin_ket("uu")).unit()
    assert state_fidelity(bell, bell) == pytest.approx(1.0)
    assert state_fidelity(qutip.ket2dm(spin_ket("dd")), bell) == pytest.approx(0.5)
    assert state_fidelity(bell_mixture(0.994, 0.992), bell) == pytest.approx(0.993, abs=1e-12)


def test_numeric_gate_converges_under_fock_doubling(stretch, square_gate):
    times = np.linspace(0.0, square_gate.total_duration, 11)
    small = ms_evolve(square_gate, stretch, times=times, method="numeric", fock_dim=30)
    large = ms_evolve(square_gate, stretch, times=times, method="numeric", fock_dim=60)
    assert np.max(np.abs(small.spin_populations - large.spin_populations)) < 1e-6


def test_numeric_evolution_preserves_trace(stretch, square_gate):
    result = ms_evolve(square_gate, stretch, times=np.linspace(0.0, square_gate.total_duration, 11))
    for state in result.spin_states:
        assert state.tr() == pytest.approx(1.0, abs=1e-9)
        assert (state - state.dag()).norm() < 1e-9
