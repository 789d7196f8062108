"""
Noise Module
"""

from .channels import (
    DRIFT_PROFILES,
    MAGNITUDE_SPREADS,
    LINEAR_BETWEEN_RECAL,
    Heating,
    Kerr,
    LaserGaussianDecay,
    LaserSinusoid,
    MotionalDrift,
    NoiseModel,
    Readout,
    SpectatorDephasing,
    SpontaneousEmission,
    thermal_draw,
)
from .estimators import (
    calibrate_kerr,
    calibrate_spectator,
    drift_error,
    drift_error_mc,
    gate_infidelity,
    gate_trajectory,
    heating_error,
    heating_error_lindblad,
    infidelity_curve,
    joint_infidelity,
    kerr_error,
    kerr_error_mc,
    laser_noise_error,
    laser_noise_error_mc,
    readout_error,
    readout_interpretations,
    spectator_dephasing_error,
    spectator_dephasing_error_mc,
    spontaneous_emission_error,
)
from .budget import ROW_ORDER, BudgetConfig, BudgetEntry, ErrorBudget, total_budget

__all__ = [
    "DRIFT_PROFILES",
    "MAGNITUDE_SPREADS",
    "LINEAR_BETWEEN_RECAL",
    "Heating",
    "Kerr",
    "LaserGaussianDecay",
    "LaserSinusoid",
    "MotionalDrift",
    "NoiseModel",
    "Readout",
    "SpectatorDephasing",
    "SpontaneousEmission",
    "thermal_draw",
    "calibrate_kerr",
    "calibrate_spectator",
    "drift_error",
    "drift_error_mc",
    "gate_infidelity",
    "gate_trajectory",
    "heating_error",
    "heating_error_lindblad",
    "infidelity_curve",
    "joint_infidelity",
    "kerr_error",
    "kerr_error_mc",
    "laser_noise_error",
    "laser_noise_error_mc",
    "readout_error",
    "readout_interpretations",
    "spectator_dephasing_error",
    "spectator_dephasing_error_mc",
    "spontaneous_emission_error",
    "ROW_ORDER",
    "BudgetConfig",
    "BudgetEntry",
    "ErrorBudget",
    "total_budget",
]
