"""
Gate Drive
Campo bicromático do portão MS, envelope com rampas sin² e fechamento do laço.
"""

import logging
from dataclasses import dataclass, replace
from typing import Callable, Optional, Tuple

import numpy as np
from scipy.integrate import solve_ivp
from scipy.optimize import brentq
from scipy.special import j0

from ..errors import PhysicsDomainError
from ..physcore import MotionalMode

logger = logging.getLogger(__name__)

TARGET_PHASE = np.pi / 8
ODE_OPTIONS = {"method": "DOP853", "rtol": 1e-11, "atol": 1e-14}


@dataclass(frozen=True)
class ShotOffsets:
    """Sorteio quase estático de um disparo"""
    carrier_offset: float = 0.0  # rad/s
    mode_offset: float = 0.0  # rad/s
    rabi_scale: float = 1.0

    def combine(self, other: "ShotOffsets") -> "ShotOffsets":
        return ShotOffsets(
            carrier_offset=self.carrier_offset + other.carrier_offset,
            mode_offset=self.mode_offset + other.mode_offset,
            rabi_scale=self.rabi_scale * other.rabi_scale,
        )


@dataclass(frozen=True)
class GateDrive:
    """
    Conjunto de tons bicromáticos.

    tone_detunings são relativos à portadora: (−(ω_modo + δ), +(ω_modo + δ)).
    Sem rampa, tempos além de total_duration equivalem a pulsos mais longos.
    """
    carrier_freq_offset: float
    tone_detunings: Tuple[float, float]
    rabi_rate: float
    spin_phase: float = 0.0
    ramp_duration: float = 0.0
    total_duration: float = 0.0
    ion_rabi_scales: Tuple[float, ...] = (1.0, 1.0)

    def __post_init__(self):
        object.__setattr__(self, "tone_detunings", tuple(float(t) for t in self.tone_detunings))
        object.__setattr__(self, "ion_rabi_scales", tuple(float(s) for s in self.ion_rabi_scales))
        if self.ramp_duration < 0:
            raise PhysicsDomainError(f"ramp_duration must be >= 0, got {self.ramp_duration}")
        if self.total_duration < 2 * self.ramp_duration:
            raise PhysicsDomainError("total_duration must be at least twice ramp_duration")
        if self.rabi_rate < 0:
            raise PhysicsDomainError(f"rabi_rate must be >= 0, got {self.rabi_rate}")
        if len(self.tone_detunings) != 2:
            raise PhysicsDomainError("an MS drive has exactly two tones")
        red, blue = sorted(self.tone_detunings)
        if not np.isclose(-red, blue, rtol=1e-12, atol=0.0) or blue <= 0:
            raise PhysicsDomainError(f"tones must be symmetric about the carrier, got {self.tone_detunings}")

    @classmethod
    def symmetric(
        cls,
        mode_frequency: float,
        detuning: float,
        rabi_rate: float,
        total_duration: float,
        ramp_duration: float = 0.0,
        spin_phase: float = 0.0,
        carrier_freq_offset: float = 0.0,
        ion_rabi_scales: Tuple[float, ...] = (1.0, 1.0),
    ) -> "GateDrive":
        """Tons em ±(ω_modo + δ)"""
        tone = mode_frequency + detuning
        return cls(
            carrier_freq_offset=carrier_freq_offset,
            tone_detunings=(-tone, tone),
            rabi_rate=rabi_rate,
            spin_phase=spin_phase,
            ramp_duration=ramp_duration,
            total_duration=total_duration,
            ion_rabi_scales=ion_rabi_scales,
        )

    @property
    def tone_frequency(self) -> float:
        return max(self.tone_detunings)

    def detuning_from(self, mode_frequency: float) -> float:
        """δ efetivo em relação a um modo"""
        return self.tone_frequency - mode_frequency

    def envelope(self, t):
        """Envelope de amplitude w(t) com rampas sin²"""
        t = np.asarray(t, dtype=float)
        r = self.ramp_duration
        if r == 0:
            return np.where(t >= 0, 1.0, 0.0)
        tau = self.total_duration
        rise = np.sin(np.pi * np.clip(t, 0, r) / (2 * r)) ** 2
        fall = np.sin(np.pi * np.clip(tau - t, 0, r) / (2 * r)) ** 2
        return np.where((t >= 0) & (t <= tau), np.minimum(rise, fall), 0.0)

    def with_changes(self, **changes) -> "GateDrive":
        return replace(self, **changes)

    def to_dict(self) -> dict:
        return {
            "carrier_freq_offset": self.carrier_freq_offset,
            "tone_detunings": list(self.tone_detunings),
            "rabi_rate": self.rabi_rate,
            "spin_phase": self.spin_phase,
            "ramp_duration": self.ramp_duration,
            "total_duration": self.total_duration,
            "ion_rabi_scales": list(self.ion_rabi_scales),
        }


# ============== Integrais do laço ==============

def loop_integrals(
    detuning: float,
    times,
    envelope: Optional[Callable] = None,
) -> Tuple[np.ndarray, np.ndarray]:
    """
    F(t) = ∫ w e^{iδt} e Φ₁(t) = ∫ Im(f*(t₁) F(t₁)) dt₁ para acoplamento unitário.

    O deslocamento no espaço de fase é α = −iF e a fase geométrica Φ₁ S².
    Sem envelope usa a forma fechada do pulso quadrado.
    """
    times = np.asarray(times, dtype=float)
    if envelope is None:
        if detuning == 0:
            return times.astype(complex), np.zeros_like(times)
        F = (np.exp(1j * detuning * times) - 1.0) / (1j * detuning)
        phi = -(times - np.sin(detuning * times) / detuning) / detuning
        return F, phi

    unique, inverse = np.unique(times, return_inverse=True)
    t_end = float(unique[-1]) if unique.size else 0.0
    if t_end <= 0:
        return np.zeros_like(times, dtype=complex), np.zeros_like(times)

    # tempo adimensional u = s·t mantém F e Φ de ordem 1 para o integrador
    scale = abs(detuning) if detuning != 0 else 1.0 / t_end
    nu = detuning / scale

    def rhs(u, y):
        f = envelope(u / scale) * np.exp(1j * nu * u)
        F = y[0] + 1j * y[1]
        return [f.real, f.imag, float(np.imag(np.conj(f) * F))]

    solution = solve_ivp(
        rhs, (0.0, scale * t_end), [0.0, 0.0, 0.0],
        t_eval=scale * unique, max_step=2 * np.pi / 64, **ODE_OPTIONS
    )
    if not solution.success:
        raise PhysicsDomainError(f"loop integration failed: {solution.message}")
    F = (solution.y[0] + 1j * solution.y[1]) / scale
    phi = solution.y[2] / scale ** 2
    return F[inverse], phi[inverse]


def drive_envelope(drive: GateDrive) -> Optional[Callable]:
    """Envelope a integrar numericamente (None para pulso quadrado)"""
    return None if drive.ramp_duration == 0 else drive.envelope


def carrier_suppressed_envelope(drive: GateDrive) -> Callable:
    """
    Envelope efetivo com a redução J₀(2Ωw/ν) que a portadora fora de
    ressonância impõe ao acoplamento de banda lateral.
    """
    ratio = 2.0 * drive.rabi_rate / drive.tone_frequency
    return lambda t: drive.envelope(t) * j0(ratio * drive.envelope(t))


# ============== Fechamento ==============

def _closure_residual(detuning: float, duration: float, ramp: float, envelope_factory) -> float:
    """Parte real de e^{−iδτ/2}F(τ); muda de sinal no fechamento"""
    envelope = envelope_factory(duration)
    F, _ = loop_integrals(detuning, [duration], envelope=envelope)
    return float(np.real(np.exp(-0.5j * detuning * duration) * F[0]))


def closure_gate_time(detuning: float, ramp: float = 0.0, envelope_factory=None) -> float:
    """
    Menor duração em que o laço no espaço de fase fecha.

    Sem rampa: 2π/δ. Com rampas, busca a raiz em [2π/δ, 2π/δ + 2r].
    """
    if detuning <= 0:
        raise PhysicsDomainError(f"detuning must be positive, got {detuning}")
    if ramp < 0:
        raise PhysicsDomainError(f"ramp must be >= 0, got {ramp}")
    base = 2 * np.pi / detuning
    if ramp == 0 and envelope_factory is None:
        return base

    if envelope_factory is None:
        def envelope_factory(duration):
            return GateDrive.symmetric(1.0, detuning, 0.0, duration, ramp).envelope

    low, high = base, base + 2 * ramp
    f_low = _closure_residual(detuning, low, ramp, envelope_factory)
    f_high = _closure_residual(detuning, high, ramp, envelope_factory)
    if np.sign(f_low) == np.sign(f_high):
        raise PhysicsDomainError(
            f"no single-loop closure in [{low:.4e}, {high:.4e}] s for ramp {ramp:.3e} s"
        )
    return brentq(
        lambda tau: _closure_residual(detuning, tau, ramp, envelope_factory),
        low, high, xtol=1e-16, rtol=1e-14,
    )


def closure_rabi_rate(eta: float, detuning: float, duration: float, ramp: float = 0.0, envelope=None) -> float:
    """
    Ω tal que |Φ₁(τ)| g² = π/8 com g = |η|Ω/2 (autovalores de S unitário ±2, 0).
    """
    if eta == 0:
        raise PhysicsDomainError("eta must be non-zero to drive a gate")
    if envelope is None and ramp > 0:
        envelope = GateDrive.symmetric(1.0, detuning, 0.0, duration, ramp).envelope
    _, phi = loop_integrals(detuning, [duration], envelope=envelope)
    if phi[0] == 0:
        raise PhysicsDomainError("zero geometric phase; cannot solve Rabi rate")
    g = np.sqrt(TARGET_PHASE / abs(phi[0]))
    return float(2.0 * g / abs(eta))


def solve_gate_drive(
    mode: MotionalMode,
    detuning: float,
    ramp: float = 0.0,
    include_carrier: bool = False,
    spin_phase: float = 0.0,
    max_iterations: int = 50,
) -> GateDrive:
    """
    GateDrive de laço único: τ pelo fechamento e Ω pela fase π/8.

    Com a portadora incluída, Ω e τ são iterados com a redução J₀.
    """
    eta = mode.eta_magnitude
    duration = closure_gate_time(detuning, ramp)
    rabi = closure_rabi_rate(eta, detuning, duration, ramp)
    drive = GateDrive.symmetric(
        mode.angular_frequency, detuning, rabi, duration, ramp, spin_phase=spin_phase
    )
    if not include_carrier:
        return drive

    for iteration in range(max_iterations):
        def factory(tau, rabi=rabi):
            return carrier_suppressed_envelope(drive.with_changes(rabi_rate=rabi, total_duration=tau))

        if ramp > 0:
            duration = closure_gate_time(detuning, ramp, envelope_factory=factory)
        updated = closure_rabi_rate(eta, detuning, duration, envelope=factory(duration))
        converged = abs(updated - rabi) <= 1e-12 * rabi
        rabi = updated
        drive = drive.with_changes(rabi_rate=rabi, total_duration=duration)
        if converged:
            logger.debug("carrier-corrected drive converged after %d iterations", iteration + 1)
            break
    return drive
