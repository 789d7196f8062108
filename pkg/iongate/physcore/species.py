"""
Ion Species
Parâmetros atômicos de uma espécie iônica.
"""

from dataclasses import dataclass, asdict

from ..errors import PhysicsDomainError
from .constants import (
    ATOMIC_MASS,
    CALCIUM_40_ATOMIC_MASS_U,
    ELECTRON_MASS,
    ELEMENTARY_CHARGE,
)


@dataclass(frozen=True)
class IonSpecies:
    """Espécie iônica: massa (kg), carga (C), tempo de vida do nível superior (s)"""
    name: str
    mass: float
    charge: float
    upper_state_lifetime: float
    qubit_zeeman_sensitivity: float  # Hz/G

    def __post_init__(self):
        if self.mass <= 0:
            raise PhysicsDomainError(f"mass must be positive, got {self.mass}")
        if self.charge <= 0:
            raise PhysicsDomainError(f"charge must be positive, got {self.charge}")
        if self.upper_state_lifetime <= 0:
            raise PhysicsDomainError(
                f"upper_state_lifetime must be positive, got {self.upper_state_lifetime}"
            )

    def to_dict(self) -> dict:
        return asdict(self)


CALCIUM_40 = IonSpecies(
    name="40Ca+",
    mass=CALCIUM_40_ATOMIC_MASS_U * ATOMIC_MASS - ELECTRON_MASS,
    charge=ELEMENTARY_CHARGE,
    upper_state_lifetime=1.1,
    qubit_zeeman_sensitivity=0.56e6,
)
