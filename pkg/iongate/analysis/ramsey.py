"""
Ramsey
Contraste de Ramsey com excursão senoidal da portadora e decaimento gaussiano lento.
"""

import logging
from typing import Dict, Optional

import numpy as np

from ..errors import DegenerateDataError, PhysicsDomainError
from .fitting import FitResult, weighted_least_squares

logger = logging.getLogger(__name__)

# amostras uniformes da fase da oscilação em [0, 2π)
PHASE_SAMPLES = 256
RAMSEY_PARAMS = ("excursion", "period", "gaussian_t1e")
MIN_STDERR = 1e-3


def _check(params: Dict[str, float]) -> Dict[str, float]:
    missing = [k for k in RAMSEY_PARAMS if k not in params]
    if missing:
        raise PhysicsDomainError(f"missing Ramsey parameters: {missing}")
    if params["excursion"] < 0 or params["period"] <= 0 or params["gaussian_t1e"] <= 0:
        raise PhysicsDomainError("need excursion >= 0, period > 0 and gaussian_t1e > 0")
    return params


def discrete_contrast(t, excursion: float, period: float) -> np.ndarray:
    """
    |⟨exp(iϕ(t, θ))⟩_θ| com ϕ = ∫₀ᵗ A sin(2πt'/T + θ) dt'.

    Regra do trapézio na grade periódica em θ (média simples das amostras).
    """
    t = np.asarray(t, dtype=float)
    theta = 2 * np.pi * np.arange(PHASE_SAMPLES) / PHASE_SAMPLES
    scale = excursion * period / (2 * np.pi)
    phase = scale * (np.cos(theta)[None, :] - np.cos(2 * np.pi * t.ravel()[:, None] / period + theta[None, :]))
    return np.abs(np.exp(1j * phase).mean(axis=1)).reshape(t.shape)


def ramsey_contrast_model(t, params: Dict[str, float]) -> np.ndarray:
    """Contraste = parte discreta × exp(−(t/t₁ₑ)²)"""
    params = _check(params)
    t = np.asarray(t, dtype=float)
    decay = np.exp(-(t / params["gaussian_t1e"]) ** 2)
    contrast = discrete_contrast(t, params["excursion"], params["period"]) * decay
    return np.clip(contrast, 0.0, 1.0)


def fit_ramsey(data, initial: Dict[str, float], min_stderr: float = MIN_STDERR) -> FitResult:
    """
    Ajusta excursão, período e t₁ₑ a linhas (t [s], contraste, erro padrão).

    O ajuste trabalha em log dos parâmetros; os intervalos voltam à escala linear.
    """
    data = np.asarray(data, dtype=float)
    if data.ndim != 2 or data.shape[1] != 3 or data.shape[0] < len(RAMSEY_PARAMS) + 1:
        raise DegenerateDataError("Ramsey fit needs at least four rows of (t, contrast, stderr)")
    initial = _check(initial)
    times, contrast, stderr = data.T
    sigma = np.maximum(stderr, min_stderr)

    def model(t, log_excursion, log_period, log_t1e):
        params = dict(zip(RAMSEY_PARAMS, np.exp([log_excursion, log_period, log_t1e])))
        return ramsey_contrast_model(t, params)

    start = np.log([max(initial["excursion"], 1e-3), initial["period"], initial["gaussian_t1e"]])
    bounds = (start - np.log(10.0), start + np.log(10.0))
    log_fit = weighted_least_squares(
        model, times, contrast, sigma, [f"log_{k}" for k in RAMSEY_PARAMS], [start], bounds, label="ramsey"
    )
    params = {k: float(np.exp(log_fit.params[f"log_{k}"])) for k in RAMSEY_PARAMS}
    confidence = {k: tuple(float(v) for v in np.exp(log_fit.confidence[f"log_{k}"])) for k in RAMSEY_PARAMS}
    logger.info("ramsey fit: %s", params)
    return FitResult(
        params=params,
        confidence=confidence,
        log_likelihood=log_fit.log_likelihood,
        model="ramsey_sinusoid_gaussian",
        extras=log_fit.extras,
    )
