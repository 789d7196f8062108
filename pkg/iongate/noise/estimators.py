"""
Error Estimators
Valor esperado da infidelidade de Bell para cada fonte de erro.

Erros quase estáticos: média da infidelidade do portão sobre a densidade do
desvio por disparo (quadratura), com estimativas Monte Carlo semeadas como
verificação cruzada. Cada estimativa desconta a infidelidade sem ruído.
"""

import logging
import math
from typing import Callable, Dict, Optional, Sequence, Tuple

import numpy as np
from numpy.polynomial import Chebyshev, Polynomial
from scipy.integrate import trapezoid
from scipy.optimize import brentq
from scipy.stats import geom, qmc

from ..analysis.readout import optimal_thresholds, poisson_misclassification
from ..dynamics import EvolutionResult, GateDrive, ShotOffsets, ms_evolve, thermal_scale_distribution
from ..errors import PhysicsDomainError
from ..physcore import MotionalMode
from .channels import QUASI_STATIC, Heating, Kerr, LaserSinusoid, MotionalDrift, Readout, SpectatorDephasing

logger = logging.getLogger(__name__)

QUADRATURE_ORDER = 16
CURVE_DEGREE = 24
# pesos abaixo disso não entram no domínio da curva interpolada
WEIGHT_FLOOR = 1e-14


# ============== Infidelidade do portão ==============

def gate_infidelity(
    gate: GateDrive,
    mode: MotionalMode,
    offsets: Optional[ShotOffsets] = None,
    channels: Sequence = (),
    rng: Optional[np.random.Generator] = None,
    method: Optional[str] = None,
    include_carrier: bool = False,
) -> float:
    """1 − F no instante τ_g; caminho analítico sempre que possível"""
    offsets = offsets or ShotOffsets()
    if method is None:
        analytic = (
            not channels
            and not include_carrier
            and gate.carrier_freq_offset + offsets.carrier_offset == 0
        )
        method = "analytic" if analytic else "numeric"
    result = ms_evolve(
        gate,
        mode,
        channels=channels,
        times=[0.0, gate.total_duration],
        method=method,
        include_carrier=include_carrier,
        offsets=offsets,
        rng=rng,
    )
    return max(0.0, 1.0 - float(result.fidelity_vs_target))


def infidelity_curve(gate: GateDrive, mode: MotionalMode, offsets, field: str = "mode_offset", method=None) -> np.ndarray:
    """Infidelidade para uma lista de desvios de um campo de ShotOffsets"""
    return np.array([
        gate_infidelity(gate, mode, ShotOffsets(**{field: float(x)}), method=method) for x in np.ravel(offsets)
    ])


def _baseline(gate: GateDrive, mode: MotionalMode, method: Optional[str] = None) -> float:
    return gate_infidelity(gate, mode, ShotOffsets(), method=method)


def _interpolated_curve(function: Callable[[float], float], lower: float, upper: float, degree: int = CURVE_DEGREE):
    """Interpolante de Chebyshev de uma infidelidade escalar em [lower, upper]"""
    if upper <= lower:
        value = function(lower)
        return lambda x: np.full(np.shape(x), value)
    return Chebyshev.interpolate(np.vectorize(function), degree, domain=[lower, upper])


def _mc_summary(values: np.ndarray) -> Tuple[float, float]:
    values = np.asarray(values, dtype=float)
    return float(values.mean()), float(values.std(ddof=1) / math.sqrt(values.size)) if values.size > 1 else 0.0


# ============== Aquecimento ==============

def heating_error(rate: float, gate_time: float) -> float:
    """ε_h = ṅ τ_g / 2"""
    if rate < 0:
        raise PhysicsDomainError(f"heating rate must be >= 0, got {rate}")
    return rate * gate_time / 2.0


def heating_error_lindblad(heating: Heating, gate: GateDrive, mode: MotionalMode) -> float:
    """Infidelidade extra da equação mestra completa com os dissipadores de aquecimento"""
    if heating.rate == 0:
        return 0.0
    noisy = gate_infidelity(gate, mode, channels=[heating], method="numeric")
    return max(0.0, noisy - _baseline(gate, mode, method="numeric"))


# ============== Deriva do modo ==============

def drift_error(drift: MotionalDrift, gate: GateDrive, mode: MotionalMode, order: int = QUADRATURE_ORDER) -> float:
    """Média sobre a densidade do desvio por disparo (Gauss-Legendre na fase, Gauss-Laguerre em D)"""
    if drift.magnitude == 0:
        return 0.0
    nodes, weights = drift.quadrature(order)
    values = infidelity_curve(gate, mode, nodes) - _baseline(gate, mode)
    error = float(np.dot(weights, values))
    logger.debug("drift %.1f Hz (%s) -> %.3e", drift.magnitude_hz, drift.magnitude_spread, error)
    return max(0.0, error)


def drift_error_mc(
    drift: MotionalDrift, gate: GateDrive, mode: MotionalMode, rng: np.random.Generator, n_samples: int = 2000
) -> Tuple[float, float]:
    """Hipercubo latino em (D, fase do intervalo) pela curva I(δ)"""
    if drift.magnitude == 0:
        return 0.0, 0.0
    u = qmc.LatinHypercube(d=2, seed=rng).random(n_samples)
    offsets = drift.interval_magnitudes(u[:, 0]) * u[:, 1]
    baseline = _baseline(gate, mode)
    curve = _interpolated_curve(
        lambda x: gate_infidelity(gate, mode, ShotOffsets(mode_offset=x)) - baseline, 0.0, float(offsets.max())
    )
    return _mc_summary(np.clip(curve(offsets), 0.0, None))


# ============== Ruído do laser ==============

def laser_noise_error(
    noise: LaserSinusoid,
    gate: GateDrive,
    mode: MotionalMode,
    order: int = QUADRATURE_ORDER,
    include_carrier: bool = False,
) -> float:
    """Média sobre o desvio de portadora arcoseno em [−A, A] (Gauss-Chebyshev)"""
    if noise.excursion_amplitude == 0:
        return 0.0
    nodes, weights = noise.quadrature(order)
    baseline = gate_infidelity(gate, mode, method="numeric", include_carrier=include_carrier)
    values = np.array([
        gate_infidelity(gate, mode, ShotOffsets(carrier_offset=x), include_carrier=include_carrier) for x in nodes
    ])
    error = float(np.dot(weights, values - baseline))
    logger.debug("laser excursion %.3e rad/s -> %.3e", noise.excursion_amplitude, error)
    return max(0.0, error)


def laser_noise_error_mc(
    noise: LaserSinusoid,
    gate: GateDrive,
    mode: MotionalMode,
    rng: np.random.Generator,
    n_samples: int = 1000,
) -> Tuple[float, float]:
    """
    Monte Carlo sobre fases da oscilação (estratificadas com jitter) através da
    curva de infidelidade interpolada. Devolve (média, erro padrão).
    """
    if noise.excursion_amplitude == 0:
        return 0.0, 0.0
    A = noise.excursion_amplitude
    baseline = gate_infidelity(gate, mode, method="numeric")
    curve = _interpolated_curve(
        lambda x: gate_infidelity(gate, mode, ShotOffsets(carrier_offset=x)) - baseline, -A, A, degree=16
    )
    theta = 2 * np.pi * (np.arange(n_samples) + rng.uniform(size=n_samples)) / n_samples
    return _mc_summary(np.clip(curve(A * np.sin(theta)), 0.0, None))


# ============== Kerr ==============

def _kerr_polynomial(kerr: Kerr, gate: GateDrive, mode: MotionalMode):
    """Curva I(Δ) em ±6σ do deslocamento Kerr"""
    k2, _, _ = kerr.cumulants()
    width = 6.0 * math.sqrt(k2)
    baseline = _baseline(gate, mode)
    return _interpolated_curve(
        lambda x: gate_infidelity(gate, mode, ShotOffsets(mode_offset=x)) - baseline, -width, width, degree=12
    )


def kerr_error(kerr: Kerr, gate: GateDrive, mode: MotionalMode) -> float:
    """
    Propagação de cumulantes: E[I] = c₂κ₂ + c₃κ₃ + c₄(κ₄ + 3κ₂²)
    com c_k da expansão em série de I(Δ) em torno de Δ = 0.
    """
    k2, k3, k4 = kerr.cumulants()
    if k2 == 0:
        return 0.0
    curve = _kerr_polynomial(kerr, gate, mode)
    width = curve.domain[1]
    # coeficientes na variável da janela u = Δ/width
    in_window = curve.convert(kind=Polynomial, domain=curve.domain, window=curve.window)
    coefficients = np.pad(in_window.coef, (0, 5))
    c2, c3, c4 = (coefficients[k] / width ** k for k in (2, 3, 4))
    error = c2 * k2 + c3 * k3 + c4 * (k4 + 3 * k2 ** 2)
    logger.debug("kerr variance %.3e (rad/s)^2 -> %.3e", k2, error)
    return max(0.0, float(error))


def kerr_error_mc(
    kerr: Kerr, gate: GateDrive, mode: MotionalMode, rng: np.random.Generator, n_samples: int = 2000
) -> Tuple[float, float]:
    """Sorteios térmicos (hipercubo latino na CDF geométrica) pela curva I(Δ)"""
    if kerr.cumulants()[0] == 0:
        return 0.0, 0.0
    curve = _kerr_polynomial(kerr, gate, mode)
    nbars = np.asarray(kerr.spectator_nbars)
    u = qmc.LatinHypercube(d=nbars.size, seed=rng).random(n_samples)
    phonons = np.where(nbars > 0, geom.ppf(u, 1.0 / (nbars + 1.0)) - 1, 0)
    shifts = (phonons - nbars) @ np.asarray(kerr.chi_per_phonon)
    lower, upper = curve.domain
    return _mc_summary(np.clip(curve(np.clip(shifts, lower, upper)), 0.0, None))


def calibrate_kerr(kerr: Kerr, gate: GateDrive, mode: MotionalMode, target: float = 4e-4) -> Kerr:
    """Escala χ para que kerr_error atinja o alvo"""
    return _calibrate_scale(kerr, lambda k: kerr_error(k, gate, mode), target, "Kerr chi")


# ============== Modos espectadores ==============

def _spectator_curve(spec: SpectatorDephasing, gate: GateDrive, mode: MotionalMode, scales: np.ndarray):
    baseline = _baseline(gate, mode)
    return _interpolated_curve(
        lambda r: gate_infidelity(gate, mode, ShotOffsets(rabi_scale=r)) - baseline,
        float(scales.min()), float(scales.max()), degree=12,
    )


def spectator_dephasing_error(spec: SpectatorDephasing, gate: GateDrive, mode: MotionalMode) -> float:
    """Média de I(r) na distribuição de r = ∏DW / E[∏DW]"""
    if not any(spec.nbars) or not any(spec.etas):
        return 0.0
    values, weights = thermal_scale_distribution(spec.etas, spec.nbars)
    scales = values / spec.mean_factor
    keep = weights > WEIGHT_FLOOR
    scales, weights = scales[keep], weights[keep] / weights[keep].sum()
    curve = _spectator_curve(spec, gate, mode, scales)
    error = float(np.dot(weights, np.clip(curve(scales), 0.0, None)))
    logger.debug("spectator occupancies %s -> %.3e", spec.nbars, error)
    return max(0.0, error)


def spectator_dephasing_error_mc(
    spec: SpectatorDephasing, gate: GateDrive, mode: MotionalMode, rng: np.random.Generator, n_samples: int = 2000
) -> Tuple[float, float]:
    """Hipercubo latino nas CDFs geométricas dos espectadores, r = ∏DW / E[∏DW]"""
    if not any(spec.nbars) or not any(spec.etas):
        return 0.0, 0.0
    nbars = np.asarray(spec.nbars, dtype=float)
    u = qmc.LatinHypercube(d=nbars.size, seed=rng).random(n_samples)
    phonons = np.where(nbars > 0, geom.ppf(u, 1.0 / (nbars + 1.0)) - 1, 0).astype(int)
    scales = np.array([spec.rabi_scale_for(row) for row in phonons])
    curve = _spectator_curve(spec, gate, mode, scales)
    return _mc_summary(np.clip(curve(scales), 0.0, None))


def calibrate_spectator(
    spec: SpectatorDephasing, gate: GateDrive, mode: MotionalMode, target: float = 3e-4
) -> SpectatorDephasing:
    """Escala os η dos espectadores para que o erro atinja o alvo"""
    return _calibrate_scale(
        spec, lambda s: spectator_dephasing_error(s, gate, mode), target, "spectator eta", power=4.0
    )


def _calibrate_scale(channel, error_of: Callable, target: float, label: str, power: float = 2.0):
    """Fator f com error_of(channel.scaled(f)) = target; erro ∝ f^power em primeira ordem"""
    current = error_of(channel)
    if current <= 0:
        raise PhysicsDomainError(f"cannot calibrate {label}: current error is zero")
    guess = (target / current) ** (1.0 / power)
    factor = brentq(
        lambda f: error_of(channel.scaled(f)) - target, 0.5 * guess, 2.0 * guess, rtol=1e-8
    )
    logger.info("calibrated %s scale factor %.6f for target %.2e", label, factor, target)
    return channel.scaled(factor)


# ============== Emissão espontânea ==============

def spontaneous_emission_error(lifetime: float, gate: GateDrive, trajectory: EvolutionResult) -> float:
    """∫ (número de íons em D) dt / T sobre [0, τ_g]"""
    if lifetime <= 0:
        raise PhysicsDomainError("lifetime must be > 0")
    if math.isinf(lifetime):
        return 0.0
    times = trajectory.times
    inside = times <= gate.total_duration * (1 + 1e-12)
    excited = trajectory.excited_ions[inside]
    return float(trapezoid(excited, times[inside]) / lifetime)


def gate_trajectory(gate: GateDrive, mode: MotionalMode, samples: int = 401) -> EvolutionResult:
    """Trajetória ideal a partir de |↓↓⟩ para a integral de população em D"""
    return ms_evolve(gate, mode, times=np.linspace(0.0, gate.total_duration, samples), method="analytic")


# ============== Leitura ==============

# populações de 0, 1, 2 íons brilhantes nos extremos da paridade após os pulsos de análise
_EVEN_STATE = np.array([0.5, 0.0, 0.5])
_ODD_STATE = np.array([0.0, 1.0, 0.0])


def _measured_parity(true_bright: np.ndarray, matrix: np.ndarray) -> float:
    measured = true_bright @ matrix
    return float(measured[0] + measured[2] - measured[1])


def readout_interpretations(model: Readout) -> Dict[str, float]:
    """
    Contribuições da matriz de confusão à infidelidade de Bell.

    parity_and_population: propaga a matriz na população par e no contraste;
    population_only: só a perda de população par, (1 − P_par)/2.
    """
    thresholds = model.thresholds or optimal_thresholds(model.poisson_means)
    matrix = poisson_misclassification(model.poisson_means, thresholds)
    measured = _EVEN_STATE @ matrix
    even = float(measured[0] + measured[2])
    contrast = 0.5 * (_measured_parity(_EVEN_STATE, matrix) - _measured_parity(_ODD_STATE, matrix))
    return {
        "parity_and_population": max(0.0, 1.0 - 0.5 * (even + contrast)),
        "population_only": max(0.0, 0.5 * (1.0 - even)),
        "p_one_to_two": float(matrix[1, 2]),
        "p_two_to_one": float(matrix[2, 1]),
    }


def readout_error(model: Readout) -> float:
    """Contribuição da leitura pela propagação completa da matriz"""
    return readout_interpretations(model)["parity_and_population"]


# ============== Verificação conjunta ==============

def joint_infidelity(
    channels: Sequence,
    gate: GateDrive,
    mode: MotionalMode,
    rng: np.random.Generator,
    n_samples: int = 16,
) -> Tuple[float, float]:
    """
    Aquecimento e desvios quase estáticos sorteados juntos em cada disparo,
    pela equação mestra. Compara com a soma das linhas do orçamento.
    """
    relevant = [c for c in channels if isinstance(c, QUASI_STATIC) or isinstance(c, Heating)]
    if not relevant:
        return 0.0, 0.0
    baseline = _baseline(gate, mode, method="numeric")
    values = [
        gate_infidelity(gate, mode, channels=relevant, rng=rng, method="numeric") - baseline
        for _ in range(n_samples)
    ]
    return _mc_summary(np.array(values))
