"""
Testes - Analysis
Paridade e contraste, termometria, Ramsey e ajustes de flop.
"""

import numpy as np
import pytest
from scipy.special import j0

from iongate.analysis import (
    BOTH_DOWN,
    BOTH_UP,
    MIXED,
    UP,
    ShotRecord,
    bell_fidelity,
    bootstrap_contrast,
    discrete_contrast,
    empirical_parity,
    fit_carrier_flop,
    fit_gate_time,
    fit_heating_rate,
    fit_parity_contrast,
    fit_rabi_decay,
    fit_ramsey,
    fit_sideband_nbar,
    group_shots,
    parity,
    profile_interval,
    ramsey_contrast_model,
    sideband_model,
    weighted_least_squares,
)
from iongate.dynamics import carrier_flop, ms_evolve, solve_gate_drive
from iongate.errors import DegenerateDataError, FitError, NonIdentifiableError, PhysicsDomainError
from iongate.physcore import CALCIUM_40, TWO_PI, axial_modes, fock_cutoff, grating_k_projection, khz, mhz

PHASES = np.linspace(0.0, np.pi, 20, endpoint=False)


def _parity_frequencies(contrast, phase_offset, phases=PHASES, total=1000.0):
    p_even = 0.5 * (1 + contrast * np.sin(2 * phases + phase_offset))
    return total * np.column_stack([0.5 * p_even, 1 - p_even, 0.5 * p_even])


# ============== Paridade ==============

def test_parity_of_populations():
    assert parity({"uu": 0.5, "dd": 0.5}) == 1.0
    assert parity({"mixed": 1.0}) == -1.0
    assert parity({"uu": 0.25, "dd": 0.25, "ud": 0.25, "du": 0.25}) == 0.0
    with pytest.raises(PhysicsDomainError):
        parity({"uu": 0.5, "dd": 0.6})


def test_bell_fidelity():
    assert bell_fidelity(0.994, 0.992) == pytest.approx(0.993)
    with pytest.raises(PhysicsDomainError):
        bell_fidelity(1.2, 0.5)


def test_contrast_fit_on_exact_frequencies():
    fit = fit_parity_contrast(phases=PHASES, counts=_parity_frequencies(0.5, 0.3))
    assert fit.params["contrast"] == pytest.approx(0.5, abs=1e-6)
    assert fit.params["phase_offset"] == pytest.approx(0.3, abs=1e-6)
    assert fit.params["even_split"] == pytest.approx(0.5)
    lo, hi = fit.confidence["contrast"]
    assert lo < 0.5 < hi


def test_flat_parity_gives_zero_contrast():
    counts = np.tile([25.0, 50.0, 25.0], (PHASES.size, 1))
    fit = fit_parity_contrast(phases=PHASES, counts=counts)
    assert fit.params["contrast"] == 0.0


def test_contrast_fit_needs_two_phases():
    with pytest.raises(DegenerateDataError):
        fit_parity_contrast(phases=[0.2], counts=[[10, 5, 10]])
    with pytest.raises(DegenerateDataError):
        fit_parity_contrast(phases=[0.2, 0.2 + np.pi], counts=[[10, 5, 10], [3, 4, 3]])


def test_empirical_parity():
    assert empirical_parity([[40, 20, 40], [0, 10, 0]]).tolist() == pytest.approx([0.6, -1.0])


@pytest.mark.slow
def test_contrast_interval_coverage():
    rng = np.random.default_rng(41)
    true_contrast, hits = 0.992, 0
    probabilities = _parity_frequencies(true_contrast, 0.4, total=1.0)
    for _ in range(100):
        counts = np.array([rng.multinomial(200, p) for p in probabilities])
        lo, hi = fit_parity_contrast(phases=PHASES, counts=counts).confidence["contrast"]
        hits += lo <= true_contrast <= hi
    assert hits >= 60


def test_contrast_fit_with_fully_odd_and_fully_even_phases():
    counts = np.round(_parity_frequencies(0.992, -np.pi / 2, total=200.0))
    counts[0] = [0, 200, 0]
    counts[10] = [100, 0, 100]
    fit = fit_parity_contrast(phases=PHASES, counts=counts)
    contrast = fit.params["contrast"]
    assert 0.95 < contrast <= 1.0
    assert fit.params["phase_offset"] == pytest.approx(-np.pi / 2, abs=0.05)
    lo, hi = fit.confidence["contrast"]
    assert lo <= contrast <= hi <= 1.0
    assert np.isfinite(fit.log_likelihood)


def test_contrast_fit_at_unit_contrast():
    fit = fit_parity_contrast(phases=PHASES, counts=_parity_frequencies(1.0, -np.pi / 2))
    assert fit.params["contrast"] == pytest.approx(1.0, abs=1e-6)
    assert fit.params["phase_offset"] == pytest.approx(-np.pi / 2, abs=1e-4)
    assert fit.confidence["contrast"][1] == 1.0


def test_bootstrap_contrast_summary():
    rng = np.random.default_rng(43)
    counts = np.array([rng.multinomial(200, p) for p in _parity_frequencies(0.8, 0.0, total=1.0)])
    summary = bootstrap_contrast(PHASES, counts, np.random.default_rng(44), n_resamples=40)
    assert set(summary) == {"contrast", "bootstrap_mean", "bootstrap_std", "interval", "n_resamples"}
    lo, hi = summary["interval"]
    assert lo <= hi
    assert summary["bootstrap_std"] > 0


# ============== Registros de disparo ==============

def test_shot_record_classifies_counts():
    thresholds = (8, 37)
    assert ShotRecord(0, counts=3).resolve(thresholds) == BOTH_UP
    assert ShotRecord(1, counts=20).resolve(thresholds) == MIXED
    assert ShotRecord(2, counts=50).resolve(thresholds) == BOTH_DOWN
    with pytest.raises(PhysicsDomainError):
        ShotRecord(3, counts=20).resolve()


def test_shot_record_validation():
    with pytest.raises(PhysicsDomainError):
        ShotRecord(0)
    with pytest.raises(PhysicsDomainError):
        ShotRecord(0, outcome="sideways")
    assert ShotRecord(4, 0.5, BOTH_UP).to_dict()["sweep_value"] == 0.5


def test_group_shots_by_phase():
    shots = [ShotRecord(0, 0.0, BOTH_UP), ShotRecord(1, 0.0, MIXED), ShotRecord(2, 0.5, BOTH_DOWN)]
    phases, counts = group_shots(shots)
    assert phases.tolist() == [0.0, 0.5]
    assert counts.tolist() == [[0, 1, 1], [1, 0, 0]]
    with pytest.raises(FitError):
        group_shots([ShotRecord(0, 0.0, UP)])


def test_contrast_fit_from_shot_records():
    rng = np.random.default_rng(47)
    shots, index = [], 0
    for phase, p in zip(PHASES, _parity_frequencies(0.9, 0.0, total=1.0)):
        for outcome in rng.choice([BOTH_DOWN, MIXED, BOTH_UP], size=100, p=p):
            shots.append(ShotRecord(index, float(phase), str(outcome)))
            index += 1
    fit = fit_parity_contrast(shots)
    assert fit.params["contrast"] == pytest.approx(0.9, abs=0.05)
    assert fit.extras["n_shots"] == 2000


# ============== Termometria ==============

RABI, ETA = khz(100.0), 0.05
SIDEBAND_TIMES = np.linspace(0.0, 400e-6, 41)


def test_sideband_fit_recovers_nbar_from_noiseless_data():
    p_up = sideband_model(SIDEBAND_TIMES, 0.5, RABI, ETA, fock_cutoff(5.0))
    data = np.column_stack([SIDEBAND_TIMES, p_up, np.full(p_up.size, 0.01)])
    fit = fit_sideband_nbar(data, RABI, ETA)
    assert fit.params["nbar"] == pytest.approx(0.5, rel=0.2)


def test_sideband_fit_near_ground_state_with_projection_noise():
    shots = 400
    p_up = sideband_model(SIDEBAND_TIMES, 0.05, RABI, ETA, fock_cutoff(5.0))
    measured = np.random.default_rng(53).binomial(shots, p_up) / shots
    stderr = np.sqrt(np.clip(measured * (1 - measured), 1e-6, None) / shots)
    fit = fit_sideband_nbar(np.column_stack([SIDEBAND_TIMES, measured, stderr]), RABI, ETA)
    assert 0.0 <= fit.params["nbar"] <= 0.12
    lo, hi = fit.confidence["nbar"]
    assert lo <= fit.params["nbar"] <= hi


def test_sideband_fit_rejects_short_span():
    times = np.linspace(0.0, 1e-6, 5)
    data = np.column_stack([times, np.zeros(5), np.full(5, 0.01)])
    with pytest.raises(NonIdentifiableError):
        fit_sideband_nbar(data, RABI, ETA)


def test_heating_rate_fit():
    waits = np.array([0.0, 5e-3, 10e-3, 20e-3])
    fit = fit_heating_rate(waits, 0.05 + 60.0 * waits, np.full(4, 0.01))
    assert fit.params["heating_rate"] == pytest.approx(60.0, rel=1e-6)
    assert fit.params["nbar0"] == pytest.approx(0.05, abs=1e-6)
    with pytest.raises(DegenerateDataError):
        fit_heating_rate([1.0, 1.0], [0.1, 0.2], [0.01, 0.01])


# ============== Ramsey ==============

EXCURSION, PERIOD, T1E = TWO_PI * 160.0, 11e-3, 30e-3


def _ramsey_params(**changes):
    params = {"excursion": EXCURSION, "period": PERIOD, "gaussian_t1e": T1E}
    params.update(changes)
    return params


def test_ramsey_contrast_starts_at_one():
    assert float(ramsey_contrast_model(0.0, _ramsey_params())) == pytest.approx(1.0)


def test_ramsey_gaussian_decay_alone():
    contrast = ramsey_contrast_model(11e-3, _ramsey_params(excursion=0.0, gaussian_t1e=11e-3))
    assert float(contrast) == pytest.approx(np.exp(-1.0), rel=1e-12)


def test_ramsey_revival_after_one_period():
    contrast = ramsey_contrast_model(PERIOD, _ramsey_params())
    assert float(contrast) == pytest.approx(np.exp(-(PERIOD / T1E) ** 2), rel=1e-9)


def test_discrete_contrast_at_half_period_is_bessel():
    value = float(discrete_contrast(PERIOD / 2, EXCURSION, PERIOD))
    assert value == pytest.approx(abs(j0(2 * EXCURSION * PERIOD / (2 * np.pi))), abs=1e-10)


def test_ramsey_fit_recovers_parameters():
    times = np.linspace(0.0, 40e-3, 41)
    contrast = ramsey_contrast_model(times, _ramsey_params())
    data = np.column_stack([times, contrast, np.full(times.size, 0.01)])
    start = _ramsey_params(excursion=EXCURSION * 1.02, period=PERIOD * 0.98, gaussian_t1e=T1E * 1.02)
    fit = fit_ramsey(data, start)
    assert fit.params["excursion"] == pytest.approx(EXCURSION, rel=1e-4)
    assert fit.params["period"] == pytest.approx(PERIOD, rel=1e-4)
    assert fit.params["gaussian_t1e"] == pytest.approx(T1E, rel=1e-4)


def test_ramsey_params_validated():
    with pytest.raises(PhysicsDomainError):
        ramsey_contrast_model(0.0, {"excursion": 1.0, "period": 1e-3})


# ============== Flops ==============

def test_rabi_decay_fit():
    rabi, decay = np.pi / 2.6e-6, 40e-6
    times = np.linspace(0.0, 30e-6, 61)
    p_up = 0.5 * (1 - np.exp(-(times / decay) ** 2) * np.cos(rabi * times))
    data = np.column_stack([times, p_up, np.full(times.size, 0.01)])
    fit = fit_rabi_decay(data, rabi * 1.03, decay * 0.8)
    assert fit.params["rabi"] == pytest.approx(rabi, rel=1e-6)
    assert fit.params["pi_time"] == pytest.approx(2.6e-6, rel=1e-6)
    assert fit.params["decay_time"] == pytest.approx(decay, rel=1e-4)


def test_carrier_flop_fit_finds_imbalance():
    rabi = np.pi / 2.6e-6
    times = np.linspace(0.0, 30e-6, 61)
    pops = carrier_flop([rabi * 1.01, rabi * 0.99], [], times).spin_populations
    data = np.column_stack([times, pops, np.full(pops.shape, 0.01)])
    fit = fit_carrier_flop(data, [], rabi * 1.02)
    assert fit.params["rabi"] == pytest.approx(rabi, rel=1e-6)
    assert abs(fit.params["imbalance"]) == pytest.approx(0.02, rel=1e-4)


def test_gate_time_fit():
    k = grating_k_projection(729e-9, np.deg2rad(36.0))
    _, mode = axial_modes(mhz(1.2), CALCIUM_40, k, nbar_com=0.1, nbar_str=0.05)
    gate_time = 1 / 15e3
    drive = solve_gate_drive(mode, TWO_PI / gate_time)
    times = np.linspace(0.0, gate_time, 41)
    pops = ms_evolve(drive, mode, times=times, method="analytic").spin_populations
    data = np.column_stack([times, pops, np.full(pops.shape, 0.01)])
    fit = fit_gate_time(data, mode, 1.05 * gate_time)
    assert fit.params["gate_time"] == pytest.approx(gate_time, rel=1e-3)
    assert fit.extras["drive_duration"] == pytest.approx(fit.params["gate_time"], rel=1e-12)


@pytest.mark.slow
def test_ramped_gate_time_fit_reports_drive_duration():
    k = grating_k_projection(729e-9, np.deg2rad(36.0))
    _, mode = axial_modes(mhz(1.2), CALCIUM_40, k, nbar_com=0.1, nbar_str=0.05)
    ramp, detuning = 5e-6, TWO_PI * 15e3
    drive = solve_gate_drive(mode, detuning, ramp)
    times = np.linspace(0.0, drive.total_duration, 41)
    pops = ms_evolve(drive, mode, times=times, method="analytic").spin_populations
    data = np.column_stack([times, pops, np.full(pops.shape, 0.01)])
    fit = fit_gate_time(data, mode, 1.05 * (TWO_PI / detuning + ramp), ramp=ramp)
    assert TWO_PI / (fit.params["gate_time"] - ramp) == pytest.approx(detuning, rel=1e-3)
    assert fit.extras["drive_duration"] == pytest.approx(drive.total_duration, rel=1e-3)


def test_flop_data_shape_validated():
    with pytest.raises(FitError):
        fit_rabi_decay(np.zeros((5, 2)), 1.0, 1.0)


# ============== Mínimos quadrados ==============

def test_linear_least_squares_intervals_match_covariance():
    x = np.linspace(0.0, 1.0, 11)
    sigma = np.full(x.size, 0.1)
    y = 1.0 + 2.0 * x

    def model(x, a, b):
        return a + b * x

    fit = weighted_least_squares(model, x, y, sigma, ("a", "b"), [(0.0, 0.0)], ([-10, -10], [10, 10]), label="line")
    design = np.column_stack([np.ones_like(x), x]) / sigma[:, None]
    errors = np.sqrt(np.diag(np.linalg.inv(design.T @ design)))
    for name, value, error in zip(("a", "b"), (1.0, 2.0), errors):
        assert fit.params[name] == pytest.approx(value, abs=1e-9)
        lo, hi = fit.confidence[name]
        assert value - lo == pytest.approx(error, rel=1e-6)
        assert hi - value == pytest.approx(error, rel=1e-6)


def test_profile_interval_of_quadratic():
    sigma = 0.3
    lo, hi = profile_interval(lambda x: -0.5 * ((x - 1.0) / sigma) ** 2, 1.0, 0.0, -5.0, 5.0)
    assert lo == pytest.approx(1.0 - sigma, rel=1e-9)
    assert hi == pytest.approx(1.0 + sigma, rel=1e-9)


def test_weighted_least_squares_rejects_bad_errors():
    with pytest.raises(FitError):
        weighted_least_squares(lambda x, a: a * x, [1.0, 2.0], [1.0, 2.0], [0.0, 1.0], ("a",), [(1.0,)], ([0], [2]))
