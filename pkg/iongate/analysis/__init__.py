"""
Analysis Module
"""

from .fitting import FitResult, profile_interval, weighted_least_squares
from .readout import (
    calibrate_bright_mean,
    classify_counts,
    one_two_confusion,
    optimal_thresholds,
    poisson_misclassification,
)
from .parity import (
    BOTH_DOWN,
    BOTH_UP,
    DOWN,
    MIXED,
    OUTCOMES,
    SINGLE_ION_OUTCOMES,
    UP,
    ShotRecord,
    bell_fidelity,
    bootstrap_contrast,
    empirical_parity,
    fit_parity_contrast,
    group_shots,
    group_single_ion,
    parity,
)
from .thermometry import fit_heating_rate, fit_sideband_nbar, sideband_model
from .ramsey import discrete_contrast, fit_ramsey, ramsey_contrast_model
from .flops import fit_carrier_flop, fit_gate_time, fit_rabi_decay

__all__ = [
    "FitResult",
    "profile_interval",
    "weighted_least_squares",
    "calibrate_bright_mean",
    "classify_counts",
    "one_two_confusion",
    "optimal_thresholds",
    "poisson_misclassification",
    "BOTH_DOWN",
    "BOTH_UP",
    "DOWN",
    "MIXED",
    "OUTCOMES",
    "SINGLE_ION_OUTCOMES",
    "UP",
    "ShotRecord",
    "bell_fidelity",
    "bootstrap_contrast",
    "empirical_parity",
    "fit_parity_contrast",
    "group_shots",
    "group_single_ion",
    "parity",
    "fit_heating_rate",
    "fit_sideband_nbar",
    "sideband_model",
    "discrete_contrast",
    "fit_ramsey",
    "ramsey_contrast_model",
    "fit_carrier_flop",
    "fit_gate_time",
    "fit_rabi_decay",
]
