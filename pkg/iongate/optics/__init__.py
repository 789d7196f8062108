"""
Optics Module
"""

from .beam import (
    EMISSION_ANGLE,
    QUADRUPOLE_COUPLING_729,
    BeamProfile,
    LossLedger,
    balanced_positions,
    beam_intensity,
    calibrate_coupling,
    crosstalk_db,
    emission_k_vector,
    micromotion_ratio,
    modulation_index,
    pi_time,
    rabi_from_power,
    rabi_imbalance,
)

__all__ = [
    "EMISSION_ANGLE",
    "QUADRUPOLE_COUPLING_729",
    "BeamProfile",
    "LossLedger",
    "balanced_positions",
    "beam_intensity",
    "calibrate_coupling",
    "crosstalk_db",
    "emission_k_vector",
    "micromotion_ratio",
    "modulation_index",
    "pi_time",
    "rabi_from_power",
    "rabi_imbalance",
]
