"""
Thermal Distributions
Ocupações de Bose-Einstein truncadas e fatores de Debye-Waller.
"""

import logging
import math
import warnings
from dataclasses import dataclass

import numpy as np
from scipy.special import eval_laguerre

from ..errors import PhysicsDomainError, TruncationWarning

logger = logging.getLogger(__name__)

TAIL_TOLERANCE = 1e-6
MIN_CUTOFF = 20
CUTOFF_PER_PHONON = 8


@dataclass(frozen=True, eq=False)
class ThermalDistribution:
    """Distribuição de Fock sobre os índices 0..truncation"""
    probabilities: np.ndarray
    nbar_nominal: float
    truncation: int
    tail_mass: float = 0.0

    def __post_init__(self):
        probs = np.asarray(self.probabilities, dtype=float)
        if probs.ndim != 1 or probs.size != self.truncation + 1:
            raise PhysicsDomainError("probabilities must cover indices 0..truncation")
        if np.any(probs < 0):
            raise PhysicsDomainError("probabilities must be non-negative")
        if abs(probs.sum() - 1.0) > 1e-9:
            raise PhysicsDomainError(f"probabilities sum to {probs.sum()}, expected 1")
        probs.setflags(write=False)
        object.__setattr__(self, "probabilities", probs)

    @property
    def fock_numbers(self) -> np.ndarray:
        return np.arange(self.truncation + 1)

    @property
    def mean(self) -> float:
        return float(np.dot(self.fock_numbers, self.probabilities))

    @property
    def variance(self) -> float:
        n = self.fock_numbers
        return float(np.dot(n ** 2, self.probabilities) - self.mean ** 2)

    def to_dict(self) -> dict:
        return {
            "probabilities": self.probabilities.tolist(),
            "nbar_nominal": self.nbar_nominal,
            "truncation": self.truncation,
            "tail_mass": self.tail_mass,
            "mean": self.mean,
        }


def thermal_tail_mass(nbar: float, n_max: int) -> float:
    """Massa da distribuição térmica acima de n_max"""
    if nbar == 0:
        return 0.0
    return (nbar / (nbar + 1.0)) ** (n_max + 1)


def required_cutoff(nbar: float, tail_tolerance: float = TAIL_TOLERANCE) -> int:
    """Menor n_max com massa de cauda abaixo da tolerância"""
    if nbar == 0:
        return 1
    ratio = nbar / (nbar + 1.0)
    return max(1, math.ceil(math.log(tail_tolerance) / math.log(ratio)) - 1)


def fock_cutoff(nbar: float, tail_tolerance: float = TAIL_TOLERANCE) -> int:
    """Truncagem padrão: max(20, ceil(8 n̄)), ampliada até a cauda ficar abaixo da tolerância"""
    if nbar < 0:
        raise PhysicsDomainError(f"nbar must be >= 0, got {nbar}")
    default = max(MIN_CUTOFF, math.ceil(CUTOFF_PER_PHONON * nbar))
    return max(default, required_cutoff(nbar, tail_tolerance))


def thermal_distribution(nbar: float, n_max: int) -> ThermalDistribution:
    """
    Distribuição térmica p_n = n̄ⁿ/(n̄+1)^(n+1), renormalizada na truncagem.

    Emite TruncationWarning se a cauda descartada passar de 1e-6.
    """
    if nbar < 0:
        raise PhysicsDomainError(f"nbar must be >= 0, got {nbar}")
    if n_max < 1:
        raise PhysicsDomainError(f"n_max must be >= 1, got {n_max}")

    n = np.arange(n_max + 1)
    if nbar == 0:
        probs = (n == 0).astype(float)
    else:
        # forma log evita overflow para n̄ grande
        log_p = n * np.log(nbar) - (n + 1) * np.log1p(nbar)
        probs = np.exp(log_p)

    tail = thermal_tail_mass(nbar, n_max)
    if tail > TAIL_TOLERANCE:
        message = (
            f"thermal truncation n_max={n_max} drops tail mass {tail:.3e} "
            f"for nbar={nbar} (use n_max >= {required_cutoff(nbar)})"
        )
        logger.warning(message)
        warnings.warn(message, TruncationWarning, stacklevel=2)

    return ThermalDistribution(
        probabilities=probs / probs.sum(),
        nbar_nominal=float(nbar),
        truncation=int(n_max),
        tail_mass=tail,
    )


def debye_waller(eta: float, n) -> np.ndarray:
    """Fator de Debye-Waller e^(−η²/2) L_n(η²), vetorizado em n"""
    x = eta ** 2
    return np.exp(-x / 2.0) * eval_laguerre(np.asarray(n), x)


def thermal_debye_waller_mean(eta: float, nbar: float) -> float:
    """Média térmica exata do fator de Debye-Waller, e^(−η²(n̄+½))"""
    return float(np.exp(-eta ** 2 * (nbar + 0.5)))
