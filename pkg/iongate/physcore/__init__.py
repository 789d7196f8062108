"""
Physcore Module
"""

from .constants import HBAR, ELEMENTARY_CHARGE, EPSILON_0, TWO_PI, hz, khz, mhz, to_hz
from .species import IonSpecies, CALCIUM_40
from .modes import (
    COM_AXIAL,
    STR_AXIAL,
    LambDickeWarning,
    MotionalMode,
    axial_modes,
    coulomb_balance_residual,
    equilibrium_spacing,
    grating_k_projection,
    lamb_dicke,
    mode_vector,
    stretch_frequency,
)
from .thermal import (
    ThermalDistribution,
    debye_waller,
    fock_cutoff,
    required_cutoff,
    thermal_debye_waller_mean,
    thermal_distribution,
    thermal_tail_mass,
)

__all__ = [
    "HBAR",
    "ELEMENTARY_CHARGE",
    "EPSILON_0",
    "TWO_PI",
    "hz",
    "khz",
    "mhz",
    "to_hz",
    "IonSpecies",
    "CALCIUM_40",
    "COM_AXIAL",
    "STR_AXIAL",
    "LambDickeWarning",
    "MotionalMode",
    "axial_modes",
    "coulomb_balance_residual",
    "equilibrium_spacing",
    "grating_k_projection",
    "lamb_dicke",
    "mode_vector",
    "stretch_frequency",
    "ThermalDistribution",
    "debye_waller",
    "fock_cutoff",
    "required_cutoff",
    "thermal_debye_waller_mean",
    "thermal_distribution",
    "thermal_tail_mass",
]
