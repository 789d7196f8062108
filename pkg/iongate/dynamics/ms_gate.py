"""
Molmer-Sorensen Gate
Evolução do portão MS em dois caminhos: analítico (Magnus exato) e numérico (qutip).

No referencial que gira com o modo, H' = δ a†a + w(t) S (a + a†) + (ε/2)Σσz
[+ Ω w(t) cos(ν t) Σ σ_(φ+π/2) com a portadora], S = Σ_k (η_k Ω_k/2) σ_(φ,k).
O propagador exato do termo de banda lateral é U = D(Sα) exp(−iΦ₁S²).
"""

import logging
import math
from typing import Optional, Sequence

import numpy as np
import qutip

from ..errors import PhysicsDomainError, TruncationOverflowError
from ..physcore import MotionalMode, fock_cutoff, thermal_distribution
from .drive import GateDrive, ShotOffsets, TARGET_PHASE, drive_envelope, loop_integrals
from .propagation import propagate
from .register import QuantumRegister, embed, excitation_populations, sigma_phi, spin_ket, thermal_operator
from .result import EvolutionResult

logger = logging.getLogger(__name__)

METHODS = ("numeric", "analytic")

# população máxima aceita no último nível de Fock
TOP_LEVEL_TOLERANCE = 1e-8
EXCURSION_SAMPLES = 512


# ============== Operadores de spin ==============

def spin_coupling_weights(drive: GateDrive, mode: MotionalMode, rabi_scale: float = 1.0) -> np.ndarray:
    """c_k = η_k Ω_k / 2 (rad/s), com sinal do vetor de modo"""
    etas = np.asarray(mode.eta, dtype=float)
    if etas.size != len(drive.ion_rabi_scales):
        raise PhysicsDomainError(f"mode {mode.label} has {etas.size} eta entries for {len(drive.ion_rabi_scales)} ions")
    return 0.5 * etas * drive.rabi_rate * np.asarray(drive.ion_rabi_scales) * rabi_scale


def spin_operator(weights: Sequence[float], phase: float) -> qutip.Qobj:
    """S = Σ_k c_k σ_(φ,k) no espaço só de spins"""
    n = len(weights)
    dims = [2] * n
    return sum(w * embed(sigma_phi(phase), k, dims) for k, w in enumerate(weights))


def ideal_bell_state(drive: GateDrive, mode: MotionalMode) -> qutip.Qobj:
    """
    Alvo ideal exp(∓iπ/8 S²)|↓↓⟩ com S = Σ sgn(η_k) σ_φ.

    Para o modo stretch, δ > 0 e φ = 0 é (|↓↓⟩ − i|↑↑⟩)/√2 a menos de fase global.
    """
    delta = drive.detuning_from(mode.angular_frequency)
    _, phi = loop_integrals(delta, [drive.total_duration], envelope=drive_envelope(drive))
    sign = -1.0 if phi[0] < 0 else 1.0
    S = spin_operator(np.sign(mode.eta), drive.spin_phase)
    U = (-1j * sign * TARGET_PHASE * S * S).expm()
    return U * spin_ket("d" * len(mode.eta))


def analysis_pulses(phase: float, angle: float = np.pi / 2, n_ions: int = 2) -> qutip.Qobj:
    """Rotação global R(θ, φ_a) = exp(−iθσ_φ/2) em cada íon"""
    single = (-0.5j * angle * sigma_phi(phase)).expm()
    return qutip.tensor(*[single] * n_ions)


def parity_scan_probabilities(spin_state: qutip.Qobj, phases) -> np.ndarray:
    """Probabilidades [P↓↓, P_mixed, P↑↑] após pulsos de análise em cada fase"""
    rho = spin_state if spin_state.isoper else qutip.ket2dm(spin_state)
    n_ions = len(rho.dims[0])
    rows = []
    for phase in np.asarray(phases, dtype=float):
        R = analysis_pulses(phase, n_ions=n_ions)
        rows.append(excitation_populations(R * rho * R.dag()))
    return np.array(rows)


def bell_mixture(even_population: float, contrast: float) -> qutip.Qobj:
    """
    Estado de dois spins com população par e contraste de paridade dados.

    Mistura dos estados de Bell (|↓↓⟩ ∓ i|↑↑⟩)/√2 com parte ímpar incoerente.
    """
    if not 0 <= contrast <= even_population <= 1:
        raise PhysicsDomainError("need 0 <= contrast <= even_population <= 1")
    dd, uu = spin_ket("dd"), spin_ket("uu")
    plus = (dd - 1j * uu).unit()
    minus = (dd + 1j * uu).unit()
    odd = 0.5 * (qutip.ket2dm(spin_ket("ud")) + qutip.ket2dm(spin_ket("du")))
    if even_population == 0:
        return odd
    weight = 0.5 * (1 + contrast / even_population)
    even = weight * qutip.ket2dm(plus) + (1 - weight) * qutip.ket2dm(minus)
    return even_population * even + (1 - even_population) * odd


def state_fidelity(spin_state: qutip.Qobj, target: qutip.Qobj) -> float:
    """⟨T|ρ|T⟩ para alvo puro"""
    t = target.full().ravel()
    rho = spin_state.full() if spin_state.isoper else np.outer(spin_state.full().ravel(), spin_state.full().ravel().conj())
    return float(np.real(np.vdot(t, rho @ t)))


# ============== Evolução ==============

def _collect_channels(channels, offsets: ShotOffsets, rng):
    """Sorteios quase estáticos e dissipadores dos canais"""
    dissipative = []
    for channel in channels:
        if hasattr(channel, "draw"):
            if rng is None:
                raise PhysicsDomainError(f"channel {type(channel).__name__} needs a random generator")
            offsets = offsets.combine(channel.draw(rng))
        if hasattr(channel, "collapse_operators"):
            dissipative.append(channel)
    return offsets, dissipative


def _required_fock_dim(weights, delta, envelope, times, nbar, extra_phonons) -> int:
    """Dimensão de Fock para a excursão coerente máxima no espaço de fase"""
    grid = np.linspace(0.0, float(np.max(times)), EXCURSION_SAMPLES)
    F, _ = loop_integrals(delta, grid, envelope=envelope)
    beta = float(np.max(np.abs(F))) * float(np.sum(np.abs(weights)))
    occupancy = beta ** 2 + 2 * nbar + extra_phonons
    return math.ceil(occupancy + 8 * math.sqrt(occupancy) + 10)


def _initial_register(initial: Optional[QuantumRegister], mode: MotionalMode, dim: int) -> QuantumRegister:
    if initial is None:
        return QuantumRegister.ground(2, [thermal_distribution(mode.nbar, dim - 1)])
    if not initial.fock_dims:
        motion = thermal_operator(thermal_distribution(mode.nbar, dim - 1))
        state = qutip.tensor(initial.density_matrix(), motion)
        return QuantumRegister(initial.spin_dims, (dim,), state)
    return initial


def _fidelity_at_gate_time(times, spin_states, drive, target) -> Optional[float]:
    hits = np.flatnonzero(np.isclose(times, drive.total_duration, rtol=1e-12, atol=0.0))
    if hits.size == 0:
        return None
    return state_fidelity(spin_states[hits[-1]], target)


def ms_evolve(
    drive: GateDrive,
    gate_mode: MotionalMode,
    initial: Optional[QuantumRegister] = None,
    channels: Sequence = (),
    times=None,
    method: str = "numeric",
    include_carrier: bool = False,
    offsets: Optional[ShotOffsets] = None,
    rng: Optional[np.random.Generator] = None,
    fock_dim: Optional[int] = None,
    integrator: str = "adaptive",
    target: Optional[qutip.Qobj] = None,
) -> EvolutionResult:
    """
    Evolui os dois íons sob o campo MS.

    Args:
        drive: tons, Ω, fase, rampas e τ_g
        gate_mode: modo de acoplamento (n̄ define o estado térmico inicial)
        initial: registro inicial; padrão |↓↓⟩ ⊗ térmico
        channels: canais de ruído (sorteios quase estáticos e/ou dissipadores)
        times: instantes (s); padrão 201 pontos em [0, τ_g]
        method: "numeric" ou "analytic"
        include_carrier: mantém o termo de portadora fora de ressonância
        offsets: sorteio explícito somado aos dos canais
        rng: gerador para os canais quase estáticos
        fock_dim: dimensão de Fock; padrão pela excursão e por n̄
        integrator: "adaptive" ou "fixed"
        target: estado alvo; padrão ideal_bell_state

    Returns:
        EvolutionResult com fidelidade no instante τ_g (se amostrado)
    """
    if method not in METHODS:
        raise PhysicsDomainError(f"unknown method {method!r}")
    times = np.linspace(0.0, drive.total_duration, 201) if times is None else np.asarray(times, dtype=float)
    offsets, dissipative = _collect_channels(channels, offsets or ShotOffsets(), rng)
    target = target if target is not None else ideal_bell_state(drive, gate_mode)

    if method == "analytic":
        if dissipative or include_carrier:
            raise PhysicsDomainError("analytic path supports neither dissipators nor the carrier term")
        if drive.carrier_freq_offset + offsets.carrier_offset != 0:
            raise PhysicsDomainError("analytic path requires zero carrier offset")
        return _analytic_evolution(drive, gate_mode, initial, times, offsets, target)
    return _numeric_evolution(
        drive, gate_mode, initial, dissipative, times, offsets, include_carrier, fock_dim, integrator, target
    )


def _analytic_evolution(drive, mode, initial, times, offsets, target) -> EvolutionResult:
    delta = drive.detuning_from(mode.angular_frequency + offsets.mode_offset)
    F, phi = loop_integrals(delta, times, envelope=drive_envelope(drive))
    weights = spin_coupling_weights(drive, mode, offsets.rabi_scale)
    lam, V = np.linalg.eigh(spin_operator(weights, drive.spin_phase).full())

    spin0 = (initial.spin_state() if initial is not None else qutip.ket2dm(spin_ket("dd"))).full()
    rho0 = V.conj().T @ spin0 @ V
    gap = lam[:, None] - lam[None, :]
    gap_sq = lam[:, None] ** 2 - lam[None, :] ** 2

    spins = []
    for F_t, phi_t in zip(F, phi):
        factor = np.exp(-1j * phi_t * gap_sq - gap ** 2 * abs(F_t) ** 2 * (mode.nbar + 0.5))
        rho = V @ (rho0 * factor) @ V.conj().T
        spins.append(qutip.Qobj(0.5 * (rho + rho.conj().T), dims=[[2, 2], [2, 2]]))

    pops = np.array([excitation_populations(s) for s in spins])
    final = QuantumRegister.from_spin_state(spins[-1]) if spins else None
    return EvolutionResult(
        times=times,
        spin_populations=pops,
        final_state=final,
        fidelity_vs_target=_fidelity_at_gate_time(times, spins, drive, target),
        spin_states=tuple(spins),
    )


def _numeric_evolution(
    drive, mode, initial, dissipative, times, offsets, include_carrier, fock_dim, integrator, target
) -> EvolutionResult:
    delta = drive.detuning_from(mode.angular_frequency + offsets.mode_offset)
    envelope = drive_envelope(drive)
    weights = spin_coupling_weights(drive, mode, offsets.rabi_scale)

    extra = sum(getattr(ch, "rate", 0.0) for ch in dissipative) * float(np.max(times, initial=0.0))
    required = _required_fock_dim(weights, delta, envelope, times, mode.nbar, extra)
    if initial is not None and initial.fock_dims:
        fock_dim = initial.fock_dims[0]
    if fock_dim is None:
        fock_dim = max(fock_cutoff(mode.nbar) + 1, required)
    elif fock_dim < required:
        raise TruncationOverflowError(
            f"Fock dimension {fock_dim} too small for the gate's phase-space excursion (need >= {required})"
        )
    register = _initial_register(initial, mode, fock_dim)

    dims = [2, 2, fock_dim]
    a = embed(qutip.destroy(fock_dim), 2, dims)
    S = sum(w * embed(sigma_phi(drive.spin_phase), k, dims) for k, w in enumerate(weights))
    epsilon = drive.carrier_freq_offset + offsets.carrier_offset
    H0 = delta * a.dag() * a + 0.5 * epsilon * sum(embed(qutip.sigmaz(), k, dims) for k in range(2))
    coupling = S * (a + a.dag())

    terms = []
    max_frequency = abs(delta)
    if envelope is None:
        H0 = H0 + coupling
    else:
        terms.append([coupling, lambda t: float(drive.envelope(t))])
    if include_carrier:
        carrier = sum(
            drive.rabi_rate * scale * offsets.rabi_scale * embed(sigma_phi(drive.spin_phase + np.pi / 2), k, dims)
            for k, scale in enumerate(drive.ion_rabi_scales)
        )
        nu = drive.tone_frequency
        terms.append([carrier, lambda t: float(drive.envelope(t) * np.cos(nu * t))])
        max_frequency = max(max_frequency, nu + abs(delta))
    hamiltonian = [H0] + terms if terms else H0

    c_ops = [op for ch in dissipative for op in ch.collapse_operators(a)]
    logger.debug(
        "ms_evolve numeric: dim=%d delta=%.4e rad/s carrier=%s dissipators=%d",
        fock_dim, delta, include_carrier, len(c_ops),
    )
    states = propagate(hamiltonian, register.state, times, c_ops, integrator, max_frequency)

    top = max((float(np.real(s.ptrace(2).diag()[-1])) for s in states), default=0.0)
    if top > TOP_LEVEL_TOLERANCE:
        raise TruncationOverflowError(f"population {top:.2e} reached the last Fock level {fock_dim - 1}")

    spins = [s.ptrace([0, 1]) for s in states]
    pops = np.array([excitation_populations(s) for s in spins])
    final = QuantumRegister((2, 2), (fock_dim,), states[-1]) if states else None
    return EvolutionResult(
        times=times,
        spin_populations=pops,
        final_state=final,
        fidelity_vs_target=_fidelity_at_gate_time(times, spins, drive, target),
        spin_states=tuple(spins),
    )
