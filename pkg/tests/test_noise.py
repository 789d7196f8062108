"""
Testes - Noise
Canais de erro, estimadores de infidelidade e o orçamento completo.
"""

import numpy as np
import pytest
import qutip

from iongate.analysis import calibrate_bright_mean, classify_counts, poisson_misclassification
from iongate.dynamics import solve_gate_drive
from iongate.errors import PhysicsDomainError
from iongate.noise import (
    ROW_ORDER,
    BudgetConfig,
    BudgetEntry,
    Heating,
    Kerr,
    LaserSinusoid,
    MotionalDrift,
    Readout,
    SpectatorDephasing,
    SpontaneousEmission,
    calibrate_kerr,
    drift_error,
    drift_error_mc,
    gate_trajectory,
    heating_error,
    infidelity_curve,
    kerr_error,
    kerr_error_mc,
    laser_noise_error,
    laser_noise_error_mc,
    readout_interpretations,
    spectator_dephasing_error,
    spectator_dephasing_error_mc,
    spontaneous_emission_error,
    thermal_draw,
    total_budget,
)
from iongate.physcore import CALCIUM_40, TWO_PI, axial_modes, grating_k_projection, khz, mhz

DETUNING = khz(15.0)
LIFETIME = 1.1
KERR_CHI = (khz(6.2e-3),) * 4
SPECTATOR_ETAS = (0.0235,) * 4
SPECTATOR_NBARS = (12.5, 12.5, 5.0, 5.0)


@pytest.fixture(scope="module")
def stretch():
    k = grating_k_projection(729e-9, np.deg2rad(36.0))
    _, mode = axial_modes(mhz(1.2), CALCIUM_40, k, nbar_com=0.1, nbar_str=0.05)
    return mode


@pytest.fixture(scope="module")
def gate(stretch):
    return solve_gate_drive(stretch, DETUNING)


# ============== Canais ==============

def test_heating_collapse_operators():
    a = qutip.destroy(5)
    assert len(Heating(60.0).collapse_operators(a)) == 2
    assert Heating(0.0).collapse_operators(a) == []
    with pytest.raises(PhysicsDomainError):
        Heating(-1.0)


def test_drift_quadrature_with_fixed_magnitude_is_uniform():
    drift = MotionalDrift(200.0, magnitude_spread="fixed")
    nodes, weights = drift.quadrature(16)
    assert weights.sum() == pytest.approx(1.0)
    assert np.all((nodes > 0) & (nodes < drift.magnitude))
    assert np.dot(weights, nodes ** 2) == pytest.approx(drift.magnitude ** 2 / 3, rel=1e-12)


def test_drift_quadrature_with_exponential_magnitude():
    drift = MotionalDrift(200.0)
    nodes, weights = drift.quadrature(16)
    assert weights.sum() == pytest.approx(1.0)
    assert np.dot(weights, nodes) == pytest.approx(drift.magnitude / 2, rel=1e-10)
    assert np.dot(weights, nodes ** 2) == pytest.approx(2 * drift.magnitude ** 2 / 3, rel=1e-10)


def test_drift_draws_match_quadrature_moments():
    drift = MotionalDrift(200.0)
    rng = np.random.default_rng(3)
    offsets = np.array([drift.draw(rng).mode_offset for _ in range(50000)])
    assert np.all(offsets >= 0)
    assert np.mean(offsets ** 2) == pytest.approx(2 * drift.magnitude ** 2 / 3, rel=0.08)


def test_drift_rejects_unknown_spread():
    with pytest.raises(PhysicsDomainError):
        MotionalDrift(200.0, magnitude_spread="gaussian")


def test_drift_offset_resets_each_recalibration():
    drift = MotionalDrift(200.0, recalibration_interval=15.0)
    assert drift.offset_at(0.0) == 0.0
    assert drift.offset_at(7.5) == pytest.approx(drift.magnitude / 2)
    assert drift.offset_at(22.5) == pytest.approx(drift.magnitude / 2)
    assert drift.offset_at(7.5, interval_magnitude=2.0) == pytest.approx(1.0)


def test_laser_quadrature_reproduces_arcsine_moments():
    noise = LaserSinusoid(TWO_PI * 160.0, 11e-3)
    nodes, weights = noise.quadrature(16)
    A = noise.excursion_amplitude
    assert np.dot(weights, nodes) == pytest.approx(0.0, abs=1e-9 * A)
    assert np.dot(weights, nodes ** 2) == pytest.approx(A ** 2 / 2, rel=1e-12)


def test_kerr_cumulants_single_mode():
    chi, n = 3.0, 2.0
    k2, k3, k4 = Kerr((chi,), (n,)).cumulants()
    assert k2 == pytest.approx(chi ** 2 * n * (n + 1))
    assert k3 == pytest.approx(chi ** 3 * n * (n + 1) * (2 * n + 1))
    assert k4 == pytest.approx(chi ** 4 * n * (n + 1) * (6 * n ** 2 + 6 * n + 1))


def test_kerr_shift_has_zero_mean():
    kerr = Kerr(KERR_CHI, SPECTATOR_NBARS)
    rng = np.random.default_rng(5)
    shifts = np.array([kerr.draw(rng).mode_offset for _ in range(20000)])
    assert abs(shifts.mean()) < 5 * shifts.std() / np.sqrt(shifts.size)


def test_thermal_draw_mean():
    draws = thermal_draw(np.random.default_rng(1), np.full(100000, 12.5))
    assert draws.mean() == pytest.approx(12.5, abs=0.25)
    assert np.all(thermal_draw(np.random.default_rng(1), [0.0, 0.0]) == 0)


def test_spectator_scale_is_normalized_on_average():
    spec = SpectatorDephasing(SPECTATOR_ETAS, SPECTATOR_NBARS)
    rng = np.random.default_rng(2)
    scales = np.array([spec.draw(rng).rabi_scale for _ in range(20000)])
    assert scales.mean() == pytest.approx(1.0, abs=1e-3)


def test_readout_means_must_be_ordered():
    with pytest.raises(PhysicsDomainError):
        Readout((60.0, 30.0, 0.5))


# ============== Aquecimento ==============

def test_heating_error_linear_estimate(gate):
    assert heating_error(60.0, gate.total_duration) == pytest.approx(2.0e-3, rel=1e-12)
    with pytest.raises(PhysicsDomainError):
        heating_error(-1.0, 1e-4)


# ============== Deriva do modo ==============

def test_infidelity_is_quadratic_in_mode_offset(gate, stretch):
    offsets = np.linspace(0.0, TWO_PI * 200.0, 9)
    values = infidelity_curve(gate, stretch, offsets) - infidelity_curve(gate, stretch, [0.0])[0]
    x = offsets ** 2
    c = np.dot(x, values) / np.dot(x, x)
    residual = values - c * x
    r_squared = 1 - np.sum(residual ** 2) / np.sum((values - values.mean()) ** 2)
    assert c > 0
    assert r_squared > 0.99


def test_infidelity_is_even_in_mode_offset(gate, stretch):
    offsets = TWO_PI * np.array([25.0, 50.0, 100.0])
    baseline = infidelity_curve(gate, stretch, [0.0])[0]
    above = infidelity_curve(gate, stretch, offsets) - baseline
    below = infidelity_curve(gate, stretch, -offsets) - baseline
    assert below == pytest.approx(above, rel=0.1)
    x = np.concatenate([offsets, -offsets]) ** 2
    values = np.concatenate([above, below])
    c = np.dot(x, values) / np.dot(x, x)
    residual = values - c * x
    assert 1 - np.sum(residual ** 2) / np.sum((values - values.mean()) ** 2) > 0.99


def test_drift_error_for_200_hz(gate, stretch):
    error = drift_error(MotionalDrift(200.0), gate, stretch)
    assert 5e-4 <= error <= 1.5e-3


def test_fixed_drift_magnitude_gives_half_the_error(gate, stretch):
    fixed = drift_error(MotionalDrift(200.0, magnitude_spread="fixed"), gate, stretch)
    spread = drift_error(MotionalDrift(200.0), gate, stretch)
    assert fixed / spread == pytest.approx(0.5, rel=0.1)


def test_drift_error_vanishes_without_drift(gate, stretch):
    assert drift_error(MotionalDrift(0.0), gate, stretch) == 0.0


@pytest.mark.slow
def test_drift_monte_carlo_agrees_with_quadrature(gate, stretch):
    drift = MotionalDrift(200.0)
    expected = drift_error(drift, gate, stretch)
    mean, stderr = drift_error_mc(drift, gate, stretch, np.random.default_rng(13))
    assert abs(mean - expected) <= 2 * stderr


# ============== Ruído do laser ==============

def test_laser_noise_error_for_160_hz(gate, stretch):
    error = laser_noise_error(LaserSinusoid(TWO_PI * 160.0, 11e-3), gate, stretch)
    assert 5e-4 <= error <= 1.5e-3


@pytest.mark.slow
def test_laser_noise_monte_carlo_agrees_with_quadrature(gate, stretch):
    noise = LaserSinusoid(TWO_PI * 160.0, 11e-3)
    expected = laser_noise_error(noise, gate, stretch)
    mean, stderr = laser_noise_error_mc(noise, gate, stretch, np.random.default_rng(17))
    assert abs(mean - expected) <= 2 * stderr


# ============== Kerr e espectadores ==============

def test_kerr_error_magnitude(gate, stretch):
    error = kerr_error(Kerr(KERR_CHI, SPECTATOR_NBARS), gate, stretch)
    assert 2e-4 <= error <= 6e-4


def test_kerr_error_falls_when_spectators_cool(gate, stretch):
    hot = kerr_error(Kerr(KERR_CHI, SPECTATOR_NBARS), gate, stretch)
    cool = kerr_error(Kerr(KERR_CHI, tuple(n / 2 for n in SPECTATOR_NBARS)), gate, stretch)
    assert 3.0 <= hot / cool <= 5.0


def test_calibrated_kerr_hits_target(gate, stretch):
    calibrated = calibrate_kerr(Kerr(KERR_CHI, SPECTATOR_NBARS), gate, stretch, target=4e-4)
    assert kerr_error(calibrated, gate, stretch) == pytest.approx(4e-4, rel=1e-6)


@pytest.mark.slow
def test_kerr_monte_carlo_agrees_with_cumulants(gate, stretch):
    kerr = Kerr(KERR_CHI, SPECTATOR_NBARS)
    expected = kerr_error(kerr, gate, stretch)
    mean, stderr = kerr_error_mc(kerr, gate, stretch, np.random.default_rng(23))
    assert abs(mean - expected) <= 2 * stderr


def test_spectator_error_magnitude(gate, stretch):
    error = spectator_dephasing_error(SpectatorDephasing(SPECTATOR_ETAS, SPECTATOR_NBARS), gate, stretch)
    assert 1.5e-4 <= error <= 4.5e-4


def test_spectator_error_falls_when_spectators_cool(gate, stretch):
    hot = spectator_dephasing_error(SpectatorDephasing(SPECTATOR_ETAS, SPECTATOR_NBARS), gate, stretch)
    cool = spectator_dephasing_error(
        SpectatorDephasing(SPECTATOR_ETAS, tuple(n / 2 for n in SPECTATOR_NBARS)), gate, stretch
    )
    assert 3.0 <= hot / cool <= 5.0


def test_spectator_error_vanishes_in_ground_state(gate, stretch):
    spec = SpectatorDephasing(SPECTATOR_ETAS, (0.0,) * 4)
    assert spectator_dephasing_error(spec, gate, stretch) == 0.0


@pytest.mark.slow
def test_spectator_monte_carlo_agrees(gate, stretch):
    spec = SpectatorDephasing(SPECTATOR_ETAS, SPECTATOR_NBARS)
    expected = spectator_dephasing_error(spec, gate, stretch)
    mean, stderr = spectator_dephasing_error_mc(spec, gate, stretch, np.random.default_rng(29))
    assert abs(mean - expected) <= 2 * stderr


# ============== Emissão espontânea ==============

def test_spontaneous_emission_error(gate, stretch):
    error = spontaneous_emission_error(LIFETIME, gate, gate_trajectory(gate, stretch))
    assert error == pytest.approx(3e-5, rel=0.3)


def test_spontaneous_emission_scales_with_gate_time(gate, stretch):
    slow_gate = solve_gate_drive(stretch, DETUNING / 2)
    fast = spontaneous_emission_error(LIFETIME, gate, gate_trajectory(gate, stretch))
    slow = spontaneous_emission_error(LIFETIME, slow_gate, gate_trajectory(slow_gate, stretch))
    assert slow / fast == pytest.approx(2.0, rel=1e-3)


def test_infinite_lifetime_gives_no_emission(gate, stretch):
    assert spontaneous_emission_error(float("inf"), gate, gate_trajectory(gate, stretch, samples=11)) == 0.0
    with pytest.raises(PhysicsDomainError):
        spontaneous_emission_error(0.0, gate, gate_trajectory(gate, stretch, samples=11))


# ============== Leitura ==============

def test_indistinguishable_bright_levels_confuse_half_the_time():
    matrix = poisson_misclassification((0.5, 60.0, 60.0), (15, 60))
    assert 0.5 * (matrix[1, 2] + matrix[2, 1]) == pytest.approx(0.5, abs=1e-6)
    assert matrix.sum(axis=1) == pytest.approx(np.ones(3))


def test_confusion_matrix_matches_sampled_counts():
    means, thresholds = (1.0, 25.0, 50.0), (8, 37)
    matrix = poisson_misclassification(means, thresholds)
    rng = np.random.default_rng(31)
    n = 1_000_000
    for true_bright, mean in enumerate(means):
        labels = classify_counts(rng.poisson(mean, n), thresholds)
        rates = np.bincount(labels, minlength=3) / n
        stderr = np.sqrt(matrix[true_bright] * (1 - matrix[true_bright]) / n)
        assert np.all(np.abs(rates - matrix[true_bright]) <= 5 * stderr + 1e-12)


def test_population_only_interpretation_is_smaller():
    values = readout_interpretations(Readout((1.0, 25.0, 50.0)))
    assert 0 <= values["population_only"] <= values["parity_and_population"]
    assert 0 < values["p_one_to_two"] < 0.1


def test_calibrated_bright_mean_reaches_target_confusion():
    result = calibrate_bright_mean(1.0, 9e-4)
    t1, t2 = result["thresholds"]
    assert 0 < t1 < t2
    assert 0.5 * (result["p_one_to_two"] + result["p_two_to_one"]) == pytest.approx(9e-4, rel=0.2)
    matrix = poisson_misclassification(result["poisson_means"], result["thresholds"])
    assert matrix[1, 1] >= 0.998


# ============== Orçamento ==============

def test_budget_rows_follow_table_order(gate, stretch):
    config = BudgetConfig(gate, stretch, channels=[Heating(60.0), SpontaneousEmission(LIFETIME)])
    budget = total_budget(config)
    assert tuple(e.source for e in budget.entries) == ROW_ORDER
    assert budget.entry("Motional mode heating").infidelity == pytest.approx(2e-3, rel=1e-12)
    assert budget.entry("Motional frequency drifts").note == "not configured"
    records = budget.to_records()
    assert records[-1]["source"] == "Total"
    assert records[-1]["infidelity"] == pytest.approx(sum(e.infidelity for e in budget.entries))


def test_budget_rejects_duplicate_channels(gate, stretch):
    with pytest.raises(PhysicsDomainError):
        total_budget(BudgetConfig(gate, stretch, channels=[Heating(60.0), Heating(10.0)]))


def test_zeroed_channels_give_zero_total(gate, stretch):
    channels = [
        Heating(0.0),
        MotionalDrift(0.0),
        LaserSinusoid(0.0, 11e-3),
        Kerr(KERR_CHI, (0.0,) * 4),
        SpectatorDephasing(SPECTATOR_ETAS, (0.0,) * 4),
        SpontaneousEmission(float("inf")),
    ]
    assert total_budget(BudgetConfig(gate, stretch, channels=channels)).total == 0.0


def test_budget_entries_are_non_negative():
    with pytest.raises(PhysicsDomainError):
        BudgetEntry("Motional mode heating", -1e-4)


def _scaled_channel(row: str, factor: float):
    builders = {
        "Motional mode heating": lambda f: Heating(60.0 * f),
        "Motional frequency drifts": lambda f: MotionalDrift(200.0 * f),
        "Laser frequency noise": lambda f: LaserSinusoid(TWO_PI * 160.0 * f, 11e-3),
        "Kerr cross-coupling": lambda f: Kerr(KERR_CHI, SPECTATOR_NBARS).scaled(f),
        "Spectator mode occupancies": lambda f: SpectatorDephasing(SPECTATOR_ETAS, SPECTATOR_NBARS).scaled(f),
        "Spontaneous emission": lambda f: SpontaneousEmission(LIFETIME / f if f > 0 else float("inf")),
    }
    return builders[row](factor)


@pytest.mark.parametrize(
    "row",
    [
        "Motional mode heating",
        "Motional frequency drifts",
        pytest.param("Laser frequency noise", marks=pytest.mark.slow),
        "Kerr cross-coupling",
        "Spectator mode occupancies",
        "Spontaneous emission",
    ],
)
def test_budget_row_grows_with_noise_magnitude(gate, stretch, row):
    values = [
        total_budget(BudgetConfig(gate, stretch, channels=[_scaled_channel(row, f)])).entry(row).infidelity
        for f in (0.0, 0.5, 1.0)
    ]
    assert values[0] == 0.0
    assert values[0] <= values[1] <= values[2]
    assert values[2] > 0


@pytest.mark.slow
def test_seeded_budget_is_reproducible(gate, stretch):
    def run():
        channels = [Heating(60.0), MotionalDrift(200.0)]
        return total_budget(BudgetConfig(gate, stretch, channels=channels, joint_samples=2, seed=5))

    first, second = run(), run()
    assert first.to_records() == second.to_records()
    assert first.notes == second.notes
    assert "joint_infidelity" in first.notes


@pytest.mark.slow
def test_full_budget_total(gate, stretch):
    readout = calibrate_bright_mean(1.0, 9e-4)
    channels = [
        Heating(60.0),
        MotionalDrift(200.0),
        LaserSinusoid(TWO_PI * 160.0, 11e-3),
        Readout(tuple(readout["poisson_means"]), tuple(readout["thresholds"])),
        Kerr(KERR_CHI, SPECTATOR_NBARS),
        SpectatorDephasing(SPECTATOR_ETAS, SPECTATOR_NBARS),
        SpontaneousEmission(LIFETIME),
    ]
    budget = total_budget(BudgetConfig(gate, stretch, channels=channels))
    assert all(e.note != "not configured" for e in budget.entries)
    assert 4e-3 <= budget.total <= 9e-3
    assert "readout_population_only" in budget.notes
