"""
Fitting
FitResult e ajuste por mínimos quadrados ponderados com intervalos por perfil.
"""

import logging
from dataclasses import dataclass, field
from typing import Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np
from scipy.optimize import brentq, least_squares

from ..errors import FitError

logger = logging.getLogger(__name__)

# Δ(log L) do intervalo de 68%
PROFILE_DELTA = 0.5
LSQ_OPTIONS = {"method": "trf", "x_scale": "jac", "xtol": 1e-12, "ftol": 1e-12, "gtol": 1e-12}


@dataclass
class FitResult:
    """Parâmetros, intervalos de 68% e log-verossimilhança"""
    params: Dict[str, float]
    confidence: Dict[str, Tuple[float, float]]
    log_likelihood: float
    model: str = ""
    extras: Dict[str, float] = field(default_factory=dict)

    def __post_init__(self):
        for name, value in self.params.items():
            if name not in self.confidence:
                continue
            lo, hi = self.confidence[name]
            # ruído de arredondamento do otimizador
            lo, hi = min(lo, value), max(hi, value)
            self.confidence[name] = (float(lo), float(hi))

    def to_dict(self) -> dict:
        return {
            "model": self.model,
            "params": dict(self.params),
            "confidence": {k: list(v) for k, v in self.confidence.items()},
            "log_likelihood": self.log_likelihood,
            "extras": dict(self.extras),
        }


def profile_interval(
    profile: Callable[[float], float],
    best: float,
    best_log_likelihood: float,
    lower: float,
    upper: float,
    step: Optional[float] = None,
    delta: float = PROFILE_DELTA,
) -> Tuple[float, float]:
    """
    Pontos onde o perfil cai `delta` abaixo do máximo.

    Expande o intervalo de busca a partir de `best` em passos dobrados e
    resolve a travessia com brentq; sem travessia, devolve o limite.
    """
    threshold = best_log_likelihood - delta

    def excess(x):
        return profile(x) - threshold

    step = step if step and np.isfinite(step) and step > 0 else 0.1 * max(abs(best), upper - lower, 1e-12)

    def crossing(direction: int, bound: float) -> float:
        inner = best
        width = step
        while True:
            outer = best + direction * width
            if (direction > 0 and outer >= bound) or (direction < 0 and outer <= bound):
                outer = bound
            if excess(outer) < 0:
                a, b = sorted((inner, outer))
                return brentq(excess, a, b, xtol=1e-12 * max(1.0, abs(best)))
            if outer == bound:
                return bound
            inner = outer
            width *= 2

    return crossing(-1, lower), crossing(+1, upper)


def weighted_least_squares(
    model: Callable,
    x,
    y,
    sigma,
    names: Sequence[str],
    starts: Sequence[Sequence[float]],
    bounds: Tuple[Sequence[float], Sequence[float]],
    label: str = "",
) -> FitResult:
    """
    Ajuste χ² com múltiplos pontos de partida e intervalos por perfil (Δχ² = 1).

    model(x, *theta) deve devolver um array achatável com a forma de y.
    """
    y = np.ravel(np.asarray(y, dtype=float))
    sigma = np.ravel(np.asarray(sigma, dtype=float))
    if np.any(sigma <= 0):
        raise FitError("standard errors must be positive")
    lower, upper = (np.asarray(b, dtype=float) for b in bounds)

    def residuals(theta):
        return (np.ravel(model(x, *theta)) - y) / sigma

    best = None
    for start in starts:
        start = np.clip(np.asarray(start, dtype=float), lower, upper)
        result = least_squares(residuals, start, bounds=(lower, upper), **LSQ_OPTIONS)
        if best is None or result.cost < best.cost:
            best = result
    if best is None or not np.all(np.isfinite(best.x)):
        raise FitError(f"{label or 'least-squares'} fit failed")

    theta = best.x
    log_likelihood = -best.cost  # −χ²/2
    try:
        covariance = np.linalg.pinv(best.jac.T @ best.jac)
        errors = np.sqrt(np.clip(np.diag(covariance), 0, None))
    except np.linalg.LinAlgError:
        errors = np.full(theta.size, np.nan)

    confidence = {}
    for i, name in enumerate(names):
        def profile(value, i=i):
            return _profile_log_likelihood(residuals, theta, i, value, lower, upper)

        confidence[name] = profile_interval(
            profile, float(theta[i]), log_likelihood, float(lower[i]), float(upper[i]), step=errors[i]
        )

    logger.debug("%s fit: %s chi2=%.4g", label, dict(zip(names, theta)), 2 * best.cost)
    return FitResult(
        params={name: float(v) for name, v in zip(names, theta)},
        confidence=confidence,
        log_likelihood=float(log_likelihood),
        model=label,
        extras={"chi2": float(2 * best.cost), "dof": float(y.size - theta.size)},
    )


def _profile_log_likelihood(residuals, theta, index, value, lower, upper) -> float:
    """−χ²/2 mínimo com o parâmetro `index` fixo em `value`"""
    free = [j for j in range(theta.size) if j != index]
    full = np.array(theta, dtype=float)
    full[index] = value
    if not free:
        r = residuals(full)
        return -0.5 * float(np.dot(r, r))

    def reduced(sub):
        full[free] = sub
        return residuals(full)

    start = np.clip(theta[free], lower[free], upper[free])
    result = least_squares(reduced, start, bounds=(lower[free], upper[free]), **LSQ_OPTIONS)
    return -float(result.cost)
