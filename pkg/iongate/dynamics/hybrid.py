"""
Hybrid Encoding
Sequência R₁₂(φ) U_MS,02(φ) R₁₂(φ) em dois íons de três níveis.
"""

import numpy as np
import qutip

LEVELS = 3


def transition_operator(lower: int, upper: int, phi: float) -> qutip.Qobj:
    """σ_(jk)(φ) = e^(−iφ)|k⟩⟨j| + e^(iφ)|j⟩⟨k| entre os níveis j < k"""
    raising = qutip.basis(LEVELS, upper) * qutip.basis(LEVELS, lower).dag()
    return np.exp(-1j * phi) * raising + np.exp(1j * phi) * raising.dag()


def _two_ion(op: qutip.Qobj) -> qutip.Qobj:
    identity = qutip.qeye(LEVELS)
    return qutip.tensor(op, identity) + qutip.tensor(identity, op)


def hybrid_sequence_unitary(phi: float) -> np.ndarray:
    """
    Unitário 9×9 da sequência híbrida Zeeman/óptica.

    R₁₂(π, φ) = exp(−iπσ₁₂(φ)/2) em cada íon e
    U_MS,02(φ) = exp(−iπ(Σ_k σ₀₂,k(φ))²/8).
    """
    single = (-0.5j * np.pi * transition_operator(1, 2, phi)).expm()
    rotation = qutip.tensor(single, single)
    S = _two_ion(transition_operator(0, 2, phi))
    ms = (-1j * np.pi / 8 * S * S).expm()
    return (rotation * ms * rotation).full()


def phase_aligned_distance(first: np.ndarray, second: np.ndarray) -> float:
    """min_α ‖U₁ − e^{iα}U₂‖ (Frobenius), com α ótimo = arg tr(U₂†U₁)"""
    alpha = np.angle(np.trace(second.conj().T @ first))
    return float(np.linalg.norm(first - np.exp(1j * alpha) * second))


def check_phase_invariance(phases, reference: float = 0.0, tolerance: float = 1e-10) -> bool:
    """Verifica que U(φ) coincide com U(reference) a menos de fase global"""
    base = hybrid_sequence_unitary(reference)
    return all(
        phase_aligned_distance(base, hybrid_sequence_unitary(phi)) < tolerance
        for phi in np.asarray(phases, dtype=float)
    )
