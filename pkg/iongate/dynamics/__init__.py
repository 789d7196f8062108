"""
Dynamics Module
"""

from .register import QuantumRegister, BASIS_ORDER, UP, DOWN, spin_ket, sigma_phi, excitation_populations
from .drive import (
    GateDrive,
    ShotOffsets,
    carrier_suppressed_envelope,
    closure_gate_time,
    closure_rabi_rate,
    loop_integrals,
    solve_gate_drive,
)
from .result import EvolutionResult
from .propagation import propagate
from .flopping import (
    BLUE,
    RED,
    carrier_flop,
    carrier_flop_numeric,
    rabi_scale_distribution,
    sideband_flop,
    thermal_scale_distribution,
)
from .ms_gate import (
    analysis_pulses,
    bell_mixture,
    ideal_bell_state,
    ms_evolve,
    parity_scan_probabilities,
    spin_coupling_weights,
    state_fidelity,
)
from .cooling import cooling_schedule, sideband_cool
from .hybrid import check_phase_invariance, hybrid_sequence_unitary, phase_aligned_distance

__all__ = [
    "QuantumRegister",
    "BASIS_ORDER",
    "UP",
    "DOWN",
    "spin_ket",
    "sigma_phi",
    "excitation_populations",
    "GateDrive",
    "ShotOffsets",
    "carrier_suppressed_envelope",
    "closure_gate_time",
    "closure_rabi_rate",
    "loop_integrals",
    "solve_gate_drive",
    "EvolutionResult",
    "propagate",
    "BLUE",
    "RED",
    "carrier_flop",
    "carrier_flop_numeric",
    "rabi_scale_distribution",
    "sideband_flop",
    "thermal_scale_distribution",
    "analysis_pulses",
    "bell_mixture",
    "ideal_bell_state",
    "ms_evolve",
    "parity_scan_probabilities",
    "spin_coupling_weights",
    "state_fidelity",
    "cooling_schedule",
    "sideband_cool",
    "check_phase_invariance",
    "hybrid_sequence_unitary",
    "phase_aligned_distance",
]
