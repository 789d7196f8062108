"""
Noise Channels
Canais de erro do orçamento: sorteios quase estáticos por disparo e dissipadores.

Canais com `draw(rng)` devolvem um ShotOffsets; canais com
`collapse_operators(a)` entram na equação mestra de ms_evolve.
"""

from dataclasses import asdict, dataclass
from typing import ClassVar, List, Optional, Sequence, Tuple, Union

import numpy as np
import qutip

from ..dynamics import ShotOffsets
from ..errors import PhysicsDomainError
from ..physcore import TWO_PI, debye_waller, thermal_debye_waller_mean

LINEAR_BETWEEN_RECAL = "linear_between_recal"
DRIFT_PROFILES = (LINEAR_BETWEEN_RECAL,)
FIXED_SPREAD = "fixed"
EXPONENTIAL_SPREAD = "exponential"
MAGNITUDE_SPREADS = (FIXED_SPREAD, EXPONENTIAL_SPREAD)
# nós em D; o maior fica em ~23 magnitudes
LAGUERRE_ORDER = 8


def _non_negative(**values):
    for name, value in values.items():
        if value < 0:
            raise PhysicsDomainError(f"{name} must be >= 0, got {value}")


def thermal_draw(rng: np.random.Generator, nbars: Sequence[float]) -> np.ndarray:
    """Números de fônons sorteados de distribuições térmicas"""
    nbars = np.asarray(nbars, dtype=float)
    draws = np.zeros(nbars.shape, dtype=int)
    hot = nbars > 0
    draws[hot] = rng.geometric(1.0 / (nbars[hot] + 1.0)) - 1
    return draws


class _Channel:
    kind: ClassVar[str] = ""

    def to_dict(self) -> dict:
        return {"kind": self.kind, **asdict(self)}


@dataclass(frozen=True)
class Heating(_Channel):
    """Aquecimento do modo: dissipadores √ṅ a e √ṅ a†"""
    rate: float  # quanta/s
    rate_uncertainty: float = 0.0
    kind: ClassVar[str] = "heating"

    def __post_init__(self):
        _non_negative(rate=self.rate, rate_uncertainty=self.rate_uncertainty)

    def collapse_operators(self, a: qutip.Qobj) -> List[qutip.Qobj]:
        if self.rate == 0:
            return []
        return [np.sqrt(self.rate) * a, np.sqrt(self.rate) * a.dag()]


@dataclass(frozen=True)
class MotionalDrift(_Channel):
    """
    Deriva da frequência do modo entre recalibrações.

    Deriva linear de 0 até D em cada intervalo, portanto desvio uniforme em [0, D].
    `magnitude_hz` é a média de D entre intervalos: com spread "exponential", D
    segue a exponencial com essa média; com "fixed", D = magnitude em todo intervalo.
    """
    magnitude_hz: float
    recalibration_interval: float = 15.0  # s
    profile: str = LINEAR_BETWEEN_RECAL
    magnitude_spread: str = EXPONENTIAL_SPREAD
    kind: ClassVar[str] = "motional_drift"

    def __post_init__(self):
        _non_negative(magnitude_hz=self.magnitude_hz)
        if self.recalibration_interval <= 0:
            raise PhysicsDomainError("recalibration_interval must be > 0")
        if self.profile not in DRIFT_PROFILES:
            raise PhysicsDomainError(f"unknown drift profile {self.profile!r}")
        if self.magnitude_spread not in MAGNITUDE_SPREADS:
            raise PhysicsDomainError(f"unknown drift magnitude spread {self.magnitude_spread!r}")

    @property
    def magnitude(self) -> float:
        return TWO_PI * self.magnitude_hz

    def offset_at(self, time_since_recalibration: float, interval_magnitude: Optional[float] = None) -> float:
        """Desvio (rad/s) num instante de um intervalo com deriva total D (padrão: a média)"""
        end = self.magnitude if interval_magnitude is None else interval_magnitude
        phase = (time_since_recalibration % self.recalibration_interval) / self.recalibration_interval
        return end * phase

    def interval_magnitudes(self, fractions) -> np.ndarray:
        """D (rad/s) pela inversa da CDF em frações u ∈ [0, 1)"""
        fractions = np.asarray(fractions, dtype=float)
        if self.magnitude_spread == FIXED_SPREAD:
            return np.full(fractions.shape, self.magnitude)
        return -self.magnitude * np.log1p(-fractions)

    def draw(self, rng: np.random.Generator) -> ShotOffsets:
        end = float(self.interval_magnitudes(rng.uniform()))
        return ShotOffsets(mode_offset=self.offset_at(rng.uniform(0.0, self.recalibration_interval), end))

    def quadrature(self, order: int = 16) -> Tuple[np.ndarray, np.ndarray]:
        """
        Nós e pesos na densidade do desvio por disparo.

        Gauss-Legendre na fase do intervalo; para spread exponencial,
        produto com Gauss-Laguerre (LAGUERRE_ORDER nós) em D.
        """
        x, w = np.polynomial.legendre.leggauss(order)
        phase, phase_weights = 0.5 * (x + 1.0), 0.5 * w
        if self.magnitude_spread == FIXED_SPREAD:
            return self.magnitude * phase, phase_weights
        z, v = np.polynomial.laguerre.laggauss(LAGUERRE_ORDER)
        nodes = self.magnitude * np.outer(z, phase).ravel()
        return nodes, np.outer(v, phase_weights).ravel()


@dataclass(frozen=True)
class LaserSinusoid(_Channel):
    """Excursão senoidal da portadora A sin(2πt/T + θ), θ uniforme por disparo"""
    excursion_amplitude: float  # rad/s
    period: float  # s
    kind: ClassVar[str] = "laser_sinusoid"

    def __post_init__(self):
        _non_negative(excursion_amplitude=self.excursion_amplitude)
        if self.period <= 0:
            raise PhysicsDomainError("period must be > 0")

    def draw(self, rng: np.random.Generator) -> ShotOffsets:
        return ShotOffsets(carrier_offset=self.excursion_amplitude * np.sin(rng.uniform(0.0, TWO_PI)))

    def quadrature(self, order: int = 16) -> Tuple[np.ndarray, np.ndarray]:
        """Gauss-Chebyshev: média na densidade arcoseno em [−A, A]"""
        k = np.arange(1, order + 1)
        return self.excursion_amplitude * np.cos((2 * k - 1) * np.pi / (2 * order)), np.full(order, 1.0 / order)


@dataclass(frozen=True)
class LaserGaussianDecay(_Channel):
    """Desvio gaussiano quase estático com σ = √2/t₁ₑ (decaimento exp(−(t/t₁ₑ)²))"""
    t_1e: float  # s
    kind: ClassVar[str] = "laser_gaussian_decay"

    def __post_init__(self):
        if self.t_1e <= 0:
            raise PhysicsDomainError("t_1e must be > 0")

    @property
    def sigma(self) -> float:
        return np.sqrt(2.0) / self.t_1e

    def draw(self, rng: np.random.Generator) -> ShotOffsets:
        return ShotOffsets(carrier_offset=rng.normal(0.0, self.sigma))


@dataclass(frozen=True)
class Kerr(_Channel):
    """
    Deslocamento do modo stretch Σ_k χ_k (n_k − n̄_k) por modos radiais térmicos.

    O deslocamento médio é absorvido na calibração da frequência do modo.
    """
    chi_per_phonon: Tuple[float, ...]  # rad/s
    spectator_nbars: Tuple[float, ...]
    kind: ClassVar[str] = "kerr"

    def __post_init__(self):
        object.__setattr__(self, "chi_per_phonon", tuple(float(c) for c in self.chi_per_phonon))
        object.__setattr__(self, "spectator_nbars", tuple(float(n) for n in self.spectator_nbars))
        if len(self.chi_per_phonon) != len(self.spectator_nbars):
            raise PhysicsDomainError("one chi per spectator mode is required")
        _non_negative(**{f"spectator_nbar_{i}": n for i, n in enumerate(self.spectator_nbars)})

    def offset_for(self, phonons) -> float:
        return float(np.dot(self.chi_per_phonon, np.asarray(phonons) - np.asarray(self.spectator_nbars)))

    def cumulants(self) -> Tuple[float, float, float]:
        """Cumulantes κ₂, κ₃, κ₄ do deslocamento (soma de térmicos escalados)"""
        chi = np.asarray(self.chi_per_phonon)
        n = np.asarray(self.spectator_nbars)
        k2 = n * (n + 1)
        k3 = k2 * (2 * n + 1)
        k4 = k2 * (6 * n ** 2 + 6 * n + 1)
        return float(np.sum(chi ** 2 * k2)), float(np.sum(chi ** 3 * k3)), float(np.sum(chi ** 4 * k4))

    def draw(self, rng: np.random.Generator) -> ShotOffsets:
        return ShotOffsets(mode_offset=self.offset_for(thermal_draw(rng, self.spectator_nbars)))

    def scaled(self, factor: float) -> "Kerr":
        return Kerr(tuple(factor * c for c in self.chi_per_phonon), self.spectator_nbars)


@dataclass(frozen=True)
class SpectatorDephasing(_Channel):
    """
    Escala de Rabi por disparo ∏ e^(−η²/2)L_n(η²) / E[∏ ...] de modos espectadores.

    A média térmica fica absorvida no Ω calibrado.
    """
    etas: Tuple[float, ...]
    nbars: Tuple[float, ...]
    kind: ClassVar[str] = "spectator_dephasing"

    def __post_init__(self):
        object.__setattr__(self, "etas", tuple(float(e) for e in self.etas))
        object.__setattr__(self, "nbars", tuple(float(n) for n in self.nbars))
        if len(self.etas) != len(self.nbars):
            raise PhysicsDomainError("one eta per spectator occupancy is required")
        _non_negative(**{f"nbar_{i}": n for i, n in enumerate(self.nbars)})

    @property
    def mean_factor(self) -> float:
        return float(np.prod([thermal_debye_waller_mean(e, n) for e, n in zip(self.etas, self.nbars)]))

    def rabi_scale_for(self, phonons) -> float:
        factor = np.prod([debye_waller(e, n) for e, n in zip(self.etas, phonons)])
        return float(factor / self.mean_factor)

    def draw(self, rng: np.random.Generator) -> ShotOffsets:
        return ShotOffsets(rabi_scale=self.rabi_scale_for(thermal_draw(rng, self.nbars)))

    def scaled(self, factor: float) -> "SpectatorDephasing":
        return SpectatorDephasing(tuple(factor * e for e in self.etas), self.nbars)


@dataclass(frozen=True)
class SpontaneousEmission(_Channel):
    """Decaimento de |↑⟩ = D₅/₂ com tempo de vida T"""
    lifetime: float  # s
    kind: ClassVar[str] = "spontaneous_emission"

    def __post_init__(self):
        if self.lifetime <= 0:
            raise PhysicsDomainError("lifetime must be > 0 (use inf to disable)")


@dataclass(frozen=True)
class Readout(_Channel):
    """Médias Poisson (escuro, 1 brilhante, 2 brilhantes) e limiares; None = ótimos"""
    poisson_means: Tuple[float, float, float]
    thresholds: Optional[Tuple[int, int]] = None
    kind: ClassVar[str] = "readout"

    def __post_init__(self):
        object.__setattr__(self, "poisson_means", tuple(float(m) for m in self.poisson_means))
        if self.thresholds is not None:
            object.__setattr__(self, "thresholds", tuple(int(t) for t in self.thresholds))
        if len(self.poisson_means) != 3:
            raise PhysicsDomainError("readout needs three Poisson means")
        if np.any(np.diff(self.poisson_means) < 0) or min(self.poisson_means) < 0:
            raise PhysicsDomainError(f"Poisson means must be ordered, got {self.poisson_means}")


NoiseModel = Union[
    Heating, MotionalDrift, LaserSinusoid, LaserGaussianDecay, Kerr, SpectatorDephasing, SpontaneousEmission, Readout
]

QUASI_STATIC = (MotionalDrift, LaserSinusoid, LaserGaussianDecay, Kerr, SpectatorDephasing)
