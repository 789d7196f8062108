"""
Readout
Classificação por limiares de contagens de fótons e matriz de confusão Poisson.
"""

import logging
from typing import Sequence, Tuple

import numpy as np
from scipy.stats import poisson

from ..errors import PhysicsDomainError

logger = logging.getLogger(__name__)

# 0, 1 ou 2 íons brilhantes
BRIGHT_CLASSES = (0, 1, 2)
DEFAULT_CONFUSION_TARGET = 9e-4


def _check_thresholds(thresholds: Sequence[int]) -> Tuple[int, int]:
    t1, t2 = (int(t) for t in thresholds)
    if not 0 < t1 < t2:
        raise PhysicsDomainError(f"thresholds must satisfy 0 < T1 < T2, got {thresholds}")
    return t1, t2


def _check_means(means: Sequence[float]) -> np.ndarray:
    means = np.asarray(means, dtype=float)
    if means.shape != (3,):
        raise PhysicsDomainError("need three Poisson means (dark, one bright, two bright)")
    if np.any(means < 0) or np.any(np.diff(means) < 0):
        raise PhysicsDomainError(f"Poisson means must be ordered dark <= one <= two, got {means.tolist()}")
    return means


def classify_counts(counts, thresholds: Sequence[int]):
    """Número de íons brilhantes: c < T₁ → 0, T₁ ≤ c < T₂ → 1, c ≥ T₂ → 2"""
    t1, t2 = _check_thresholds(thresholds)
    counts = np.asarray(counts)
    if np.any(counts < 0):
        raise PhysicsDomainError("photon counts must be >= 0")
    labels = np.searchsorted([t1, t2], counts, side="right")
    return int(labels) if labels.ndim == 0 else labels


def poisson_misclassification(means: Sequence[float], thresholds: Sequence[int]) -> np.ndarray:
    """M[i, j] = P(classificado j | i íons brilhantes)"""
    means = _check_means(means)
    t1, t2 = _check_thresholds(thresholds)
    below_t1 = poisson.cdf(t1 - 1, means)
    below_t2 = poisson.cdf(t2 - 1, means)
    return np.column_stack([below_t1, below_t2 - below_t1, poisson.sf(t2 - 1, means)])


def optimal_thresholds(means: Sequence[float]) -> Tuple[int, int]:
    """Par inteiro (T₁, T₂) que minimiza a soma dos erros de classificação"""
    means = _check_means(means)
    upper = int(np.ceil(means[-1] + 10 * np.sqrt(means[-1]) + 10))
    edges = np.arange(1, upper + 1)
    cdf = poisson.cdf(edges[:, None] - 1, means[None, :])  # (T, 3)

    # erro total para (T₁, T₂): 1 − M00 + 1 − M11 + 1 − M22
    t1, t2 = np.meshgrid(np.arange(edges.size), np.arange(edges.size), indexing="ij")
    m00 = cdf[t1, 0]
    m11 = cdf[t2, 1] - cdf[t1, 1]
    m22 = 1 - cdf[t2, 2]
    error = np.where(t2 > t1, 3 - m00 - m11 - m22, np.inf)
    i, j = np.unravel_index(np.argmin(error), error.shape)
    return int(edges[i]), int(edges[j])


def one_two_confusion(means: Sequence[float], thresholds: Sequence[int]) -> Tuple[float, float]:
    """(P(1→2), P(2→1))"""
    matrix = poisson_misclassification(means, thresholds)
    return float(matrix[1, 2]), float(matrix[2, 1])


def _mean_confusion(dark_mean: float, bright: float):
    means = (dark_mean, dark_mean + bright, dark_mean + 2 * bright)
    thresholds = optimal_thresholds(means)
    up, down = one_two_confusion(means, thresholds)
    return 0.5 * (up + down), means, thresholds, up, down


def calibrate_bright_mean(
    dark_mean: float,
    target_confusion: float = DEFAULT_CONFUSION_TARGET,
    search: Tuple[float, float] = (2.0, 400.0),
    step: float = 0.01,
) -> dict:
    """
    Média de um íon brilhante λ_b (acima do fundo) cuja confusão 1↔2 média
    no limiar ótimo fica mais próxima do alvo; λ_k = λ_dark + kλ_b.

    Varredura grossa (passo 1) até cruzar o alvo, depois fina com `step`.
    """
    if dark_mean < 0 or target_confusion <= 0:
        raise PhysicsDomainError("dark_mean must be >= 0 and target_confusion > 0")
    coarse = search[0]
    while _mean_confusion(dark_mean, coarse)[0] > target_confusion:
        coarse += 1.0
        if coarse > search[1]:
            raise PhysicsDomainError(f"no bright mean below {search[1]} reaches confusion {target_confusion}")

    candidates = np.arange(max(search[0], coarse - 1.0), coarse + step, step)
    scored = [(abs(_mean_confusion(dark_mean, b)[0] - target_confusion), b) for b in candidates]
    _, bright = min(scored)
    _, means, thresholds, up, down = _mean_confusion(dark_mean, bright)
    logger.info("bright mean %.2f counts gives P(1->2)=%.2e P(2->1)=%.2e", bright, up, down)
    return {
        "bright_mean": float(bright),
        "poisson_means": [float(m) for m in means],
        "thresholds": list(thresholds),
        "p_one_to_two": up,
        "p_two_to_one": down,
    }
