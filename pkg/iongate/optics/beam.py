"""
Beam Geometry
Feixe gaussiano elíptico da grade, perdas até o íon e conversão potência → Rabi.
"""

import logging
from dataclasses import dataclass, field, replace
from typing import Optional, Sequence, Tuple

import numpy as np
from scipy.optimize import brentq
from scipy.special import j0, j1

from ..errors import PhysicsDomainError

logger = logging.getLogger(__name__)

# === CONFIGURAÇÕES ===
EMISSION_ANGLE = np.deg2rad(36.0)
DEVICE_WAIST_X = 6.5e-6
DEVICE_WAIST_Y = 3.7e-6
# rad/s por (W/m²)^½ para a quadrupolar de 729 nm, fixado no tempo π previsto de 2.0 μs
QUADRUPOLE_COUPLING_729 = 520.8
# primeiro zero de J₀
_J0_ZERO = 2.404825557695773


def emission_k_vector(emission_angle: float = EMISSION_ANGLE) -> Tuple[float, float, float]:
    """Direção unitária (x, y, z) emitida a θ da vertical no plano xz"""
    return (float(np.sin(emission_angle)), 0.0, float(np.cos(emission_angle)))


@dataclass(frozen=True)
class BeamProfile:
    """Raios 1/e² no plano xy, centro e potência no plano do íon"""
    waist_x: float
    waist_y: float
    center: Tuple[float, float] = (0.0, 0.0)
    power_at_ion_plane: float = 0.0
    k_vector: Tuple[float, float, float] = field(default_factory=emission_k_vector)

    def __post_init__(self):
        object.__setattr__(self, "center", tuple(float(c) for c in self.center))
        object.__setattr__(self, "k_vector", tuple(float(k) for k in self.k_vector))
        if self.waist_x <= 0 or self.waist_y <= 0:
            raise PhysicsDomainError("beam waists must be positive")
        if self.power_at_ion_plane < 0:
            raise PhysicsDomainError("power must be >= 0")
        if not np.isclose(np.linalg.norm(self.k_vector), 1.0, rtol=0, atol=1e-9):
            raise PhysicsDomainError(f"k_vector must be a unit vector, got {self.k_vector}")

    @property
    def peak_intensity(self) -> float:
        """I₀ = 2P/(π w_x w_y)"""
        return 2.0 * self.power_at_ion_plane / (np.pi * self.waist_x * self.waist_y)

    def with_changes(self, **changes) -> "BeamProfile":
        return replace(self, **changes)

    def to_dict(self) -> dict:
        return {
            "waist_x": self.waist_x,
            "waist_y": self.waist_y,
            "center": list(self.center),
            "power_at_ion_plane": self.power_at_ion_plane,
            "k_vector": list(self.k_vector),
        }


@dataclass(frozen=True)
class LossLedger:
    """Perdas em dB por estágio, da fibra ao íon"""
    entries: Tuple[Tuple[str, float], ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "entries", tuple((str(s), float(db)) for s, db in self.entries))
        for stage, loss in self.entries:
            if loss < 0:
                raise PhysicsDomainError(f"loss for stage {stage!r} must be >= 0 dB")

    @classmethod
    def device_default(cls) -> "LossLedger":
        """2.4 dB fibra-chip, 1 dB guia de onda (5 mm), 3 dB emissão da grade"""
        return cls((("fibre_chip_coupling", 2.4), ("waveguide_5mm", 1.0), ("grating_emission", 3.0)))

    @property
    def total_db(self) -> float:
        return float(sum(db for _, db in self.entries))

    @property
    def transmission(self) -> float:
        return 10.0 ** (-self.total_db / 10.0)

    def to_dict(self) -> dict:
        return {"entries": [{"stage": s, "loss_db": db} for s, db in self.entries], "total_db": self.total_db}


# ============== Intensidade e Rabi ==============

def beam_intensity(profile: BeamProfile, position) -> np.ndarray:
    """I(x, y) = I₀ exp(−2(Δx/w_x)² − 2(Δy/w_y)²)"""
    x, y = (np.asarray(p, dtype=float) for p in position)
    dx, dy = x - profile.center[0], y - profile.center[1]
    value = profile.peak_intensity * np.exp(-2 * (dx / profile.waist_x) ** 2 - 2 * (dy / profile.waist_y) ** 2)
    return float(value) if np.ndim(value) == 0 else value


def rabi_from_power(
    input_power: float,
    ledger: LossLedger,
    profile: BeamProfile,
    position=None,
    coupling: float = QUADRUPOLE_COUPLING_729,
) -> float:
    """Ω = κ √I no íon, com a potência de entrada atenuada pelo ledger"""
    if input_power < 0:
        raise PhysicsDomainError("input power must be >= 0")
    at_ion = profile.with_changes(power_at_ion_plane=input_power * ledger.transmission)
    position = profile.center if position is None else position
    return float(coupling * np.sqrt(beam_intensity(at_ion, position)))


def pi_time(rabi: float) -> float:
    if rabi <= 0:
        raise PhysicsDomainError("Rabi frequency must be positive")
    return float(np.pi / rabi)


def calibrate_coupling(
    target_pi_time: float, input_power: float, ledger: LossLedger, profile: BeamProfile, position=None
) -> float:
    """κ que reproduz um tempo π alvo"""
    reference = rabi_from_power(input_power, ledger, profile, position, coupling=1.0)
    if reference <= 0:
        raise PhysicsDomainError("zero intensity at the ion; cannot calibrate coupling")
    return float(np.pi / target_pi_time / reference)


# ============== Balanceamento ==============

def balanced_positions(profile: BeamProfile, spacing: float) -> Tuple[float, float]:
    """Par (x₁, x₁ + d) com intensidades iguais ao longo da linha de varredura"""
    if spacing <= 0:
        raise PhysicsDomainError(f"spacing must be positive, got {spacing}")
    cx = profile.center[0]

    def log_ratio(x1):
        return -2 * ((x1 - cx) ** 2 - (x1 + spacing - cx) ** 2) / profile.waist_x ** 2

    x1 = brentq(log_ratio, cx - spacing, cx, xtol=1e-18, rtol=1e-15)
    return float(x1), float(x1 + spacing)


def rabi_imbalance(profile: BeamProfile, positions: Sequence[float], y: Optional[float] = None) -> float:
    """|1 − Ω₁/Ω₂| para dois íons na linha de varredura"""
    y = profile.center[1] if y is None else y
    i1, i2 = (beam_intensity(profile, (x, y)) for x in positions)
    if i2 <= 0:
        raise PhysicsDomainError("zero intensity at the second ion")
    return float(abs(1.0 - np.sqrt(i1 / i2)))


def crosstalk_db(pi_time_direct: float, pi_time_cross: float) -> float:
    """Intensidade relativa 20 log₁₀(t_π direto / t_π vizinho)"""
    if pi_time_direct <= 0 or pi_time_cross <= 0:
        raise PhysicsDomainError("pi-times must be positive")
    return float(20.0 * np.log10(pi_time_direct / pi_time_cross))


# ============== Micromovimento ==============

def micromotion_ratio(mod_index: float) -> float:
    """Ω_MM/Ω_car = J₁(β)/J₀(β)"""
    if not 0 <= mod_index < _J0_ZERO:
        raise PhysicsDomainError(f"modulation index must lie in [0, {_J0_ZERO:.4f})")
    return float(j1(mod_index) / j0(mod_index))


def modulation_index(ratio: float) -> float:
    """Inverte J₁(β)/J₀(β) = ratio no primeiro ramo"""
    if ratio < 0:
        raise PhysicsDomainError("micromotion ratio must be >= 0")
    if ratio == 0:
        return 0.0
    return float(brentq(lambda b: micromotion_ratio(b) - ratio, 0.0, _J0_ZERO * (1 - 1e-12), xtol=1e-15))
