"""
Motional Modes
Estrutura de modos de dois íons, espaçamento de equilíbrio e parâmetros de Lamb-Dicke.
"""

import logging
import re
import warnings
from dataclasses import dataclass, field, replace
from typing import Optional, Tuple

import numpy as np

from ..errors import PhysicsDomainError
from .constants import EPSILON_0, HBAR, TWO_PI
from .species import IonSpecies

logger = logging.getLogger(__name__)

COM_AXIAL = "COM_axial"
STR_AXIAL = "STR_axial"

_LABEL_PATTERN = re.compile(r"^(COM_axial|STR_axial|radial_\d+)$")

# Vetores de modo normalizados para dois íons
MODE_VECTORS = {
    COM_AXIAL: (1.0 / np.sqrt(2.0), 1.0 / np.sqrt(2.0)),
    STR_AXIAL: (1.0 / np.sqrt(2.0), -1.0 / np.sqrt(2.0)),
}


class LambDickeWarning(UserWarning):
    """|eta| >= 1: fora do regime de Lamb-Dicke"""


@dataclass(frozen=True)
class MotionalMode:
    """
    Um modo harmônico do cristal.

    eta é a lista de fatores de Lamb-Dicke por íon, com sinal (o modo
    stretch tem entradas de sinais opostos).
    """
    label: str
    angular_frequency: float
    eta: Tuple[float, ...] = field(default_factory=tuple)
    nbar: float = 0.0
    heating_rate: float = 0.0

    def __post_init__(self):
        if not _LABEL_PATTERN.match(self.label):
            raise PhysicsDomainError(f"unknown mode label {self.label!r}")
        if self.angular_frequency <= 0:
            raise PhysicsDomainError(
                f"angular_frequency must be positive, got {self.angular_frequency}"
            )
        if self.nbar < 0:
            raise PhysicsDomainError(f"nbar must be >= 0, got {self.nbar}")
        if self.heating_rate < 0:
            raise PhysicsDomainError(f"heating_rate must be >= 0, got {self.heating_rate}")
        object.__setattr__(self, "eta", tuple(float(e) for e in self.eta))
        if any(abs(e) >= 1.0 for e in self.eta):
            message = f"mode {self.label} has |eta| >= 1 ({self.eta}); Lamb-Dicke regime violated"
            logger.warning(message)
            warnings.warn(message, LambDickeWarning, stacklevel=2)

    @property
    def is_radial(self) -> bool:
        return self.label.startswith("radial_")

    @property
    def eta_magnitude(self) -> float:
        """Maior |eta| entre os íons"""
        return max((abs(e) for e in self.eta), default=0.0)

    def with_changes(self, **changes) -> "MotionalMode":
        return replace(self, **changes)

    def to_dict(self) -> dict:
        return {
            "label": self.label,
            "angular_frequency": self.angular_frequency,
            "eta": list(self.eta),
            "nbar": self.nbar,
            "heating_rate": self.heating_rate,
        }


# ============== Geometria ==============

def stretch_frequency(omega_com: float) -> float:
    """Frequência do modo stretch axial, sqrt(3) vezes a do COM"""
    if omega_com <= 0:
        raise PhysicsDomainError(f"omega_com must be positive, got {omega_com}")
    return np.sqrt(3.0) * omega_com


def equilibrium_spacing(omega_com: float, species: IonSpecies) -> float:
    """
    Separação de equilíbrio de dois íons no poço axial.

    Balanço de forças q²/(4πε₀d²) = mω²d/2, ou seja
    d = (q²/(2πε₀ m ω²))^(1/3).
    """
    if omega_com <= 0:
        raise PhysicsDomainError(f"omega_com must be positive, got {omega_com}")
    q2 = species.charge ** 2
    return np.cbrt(q2 / (2.0 * np.pi * EPSILON_0 * species.mass * omega_com ** 2))


def coulomb_balance_residual(spacing: float, omega_com: float, species: IonSpecies) -> float:
    """Resíduo relativo entre a repulsão de Coulomb e a força restauradora"""
    coulomb = species.charge ** 2 / (4.0 * np.pi * EPSILON_0 * spacing ** 2)
    restoring = species.mass * omega_com ** 2 * spacing / 2.0
    return abs(coulomb - restoring) / restoring


def grating_k_projection(wavelength: float, emission_angle: float) -> float:
    """
    Projeção axial (x) do vetor de onda emitido pela grade.

    k = k0 (z cos θ + x sin θ), então k_x = 2π/λ · sin θ.
    """
    if wavelength <= 0:
        raise PhysicsDomainError(f"wavelength must be positive, got {wavelength}")
    return TWO_PI / wavelength * np.sin(emission_angle)


def mode_vector(label: str) -> Tuple[float, float]:
    """Componentes normalizadas do modo para cada íon"""
    try:
        return MODE_VECTORS[label]
    except KeyError:
        raise PhysicsDomainError(
            f"mode {label!r} has no fixed mode vector; radial modes carry explicit eta"
        ) from None


def lamb_dicke(k_projection: float, species: IonSpecies, mode: MotionalMode) -> Tuple[float, ...]:
    """
    Fatores de Lamb-Dicke por íon.

    eta_i = k · b_i · sqrt(hbar / (2 m ω))
    """
    if k_projection < 0:
        raise PhysicsDomainError(f"k_projection must be >= 0, got {k_projection}")
    zero_point = np.sqrt(HBAR / (2.0 * species.mass * mode.angular_frequency))
    return tuple(k_projection * b * zero_point for b in mode_vector(mode.label))


def axial_modes(
    omega_com: float,
    species: IonSpecies,
    k_projection: float,
    nbar_com: float = 0.0,
    nbar_str: float = 0.0,
    heating_com: float = 0.0,
    heating_str: float = 0.0,
    omega_str: Optional[float] = None,
) -> Tuple[MotionalMode, MotionalMode]:
    """Constrói os modos axiais COM e stretch com eta derivado da geometria"""
    omega_str = omega_str if omega_str is not None else stretch_frequency(omega_com)
    com = MotionalMode(COM_AXIAL, omega_com, nbar=nbar_com, heating_rate=heating_com)
    stretch = MotionalMode(STR_AXIAL, omega_str, nbar=nbar_str, heating_rate=heating_str)
    return (
        com.with_changes(eta=lamb_dicke(k_projection, species, com)),
        stretch.with_changes(eta=lamb_dicke(k_projection, species, stretch)),
    )
