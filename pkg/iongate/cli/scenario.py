"""
Scenario
Modelos pydantic dos arquivos de cenário (chaves com unidades) e conversão
para os objetos de domínio.
"""

import json
import logging
from pathlib import Path
from typing import Annotated, Any, List, Literal, Optional, Tuple, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, ValidationError, model_validator

from ..dynamics import GateDrive, solve_gate_drive
from ..errors import ScenarioError
from ..noise import (
    Heating,
    Kerr,
    LaserGaussianDecay,
    LaserSinusoid,
    MotionalDrift,
    Readout,
    SpectatorDephasing,
    SpontaneousEmission,
)
from ..optics import BeamProfile, LossLedger, emission_k_vector, rabi_from_power
from ..physcore import (
    COM_AXIAL,
    ELEMENTARY_CHARGE,
    STR_AXIAL,
    TWO_PI,
    IonSpecies,
    MotionalMode,
    grating_k_projection,
    lamb_dicke,
    stretch_frequency,
)
from ..physcore.constants import ATOMIC_MASS, CALCIUM_40_ATOMIC_MASS_U, ELECTRON_MASS

logger = logging.getLogger(__name__)

PROVENANCE = Literal["measured", "fitted", "synthetic", "derived"]
EXPERIMENTS = ("carrier_flop", "sideband_flop", "ms_gate", "parity_scan", "ramsey", "sideband_cool", "budget")


class _Section(BaseModel):
    model_config = ConfigDict(extra="forbid")


# ============== Física ==============

class SpeciesConfig(_Section):
    name: str = "40Ca+"
    mass_u: float = Field(default=CALCIUM_40_ATOMIC_MASS_U, gt=0)
    charge_e: float = Field(default=1.0, gt=0)
    upper_state_lifetime_s: float = Field(default=1.1, gt=0)
    zeeman_sensitivity_mhz_per_gauss: float = 0.56

    def build(self) -> IonSpecies:
        return IonSpecies(
            name=self.name,
            mass=self.mass_u * ATOMIC_MASS - self.charge_e * ELECTRON_MASS,
            charge=self.charge_e * ELEMENTARY_CHARGE,
            upper_state_lifetime=self.upper_state_lifetime_s,
            qubit_zeeman_sensitivity=self.zeeman_sensitivity_mhz_per_gauss * 1e6,
        )


class TrapConfig(_Section):
    omega_com_mhz: float = Field(default=1.2, gt=0)
    wavelength_nm: float = Field(default=729.0, gt=0)
    emission_angle_deg: float = 36.0

    @property
    def k_projection(self) -> float:
        return grating_k_projection(self.wavelength_nm * 1e-9, np.deg2rad(self.emission_angle_deg))


class ModeConfig(_Section):
    """Modo; frequência e eta derivados da armadilha quando omitidos (modos axiais)"""
    label: str
    frequency_mhz: Optional[float] = Field(default=None, gt=0)
    eta: Optional[List[float]] = None
    nbar: float = Field(default=0.0, ge=0)
    heating_rate_quanta_per_s: float = Field(default=0.0, ge=0)


class DriveConfig(_Section):
    """
    Portão MS; rabi_khz (Ω/2π) e gate_time_us omitidos são resolvidos pelo
    fechamento de laço único.
    """
    gate_mode: str = STR_AXIAL
    detuning_khz: float = Field(default=15.0, gt=0)
    ramp_us: float = Field(default=0.0, ge=0)
    rabi_khz: Optional[float] = Field(default=None, ge=0)
    gate_time_us: Optional[float] = Field(default=None, gt=0)
    spin_phase_rad: float = 0.0
    carrier_offset_hz: float = 0.0
    include_carrier: bool = False
    ion_rabi_scales: List[float] = Field(default_factory=lambda: [1.0, 1.0])
    method: Literal["numeric", "analytic"] = "analytic"


class LossEntry(_Section):
    stage: str
    loss_db: float = Field(ge=0)


class BeamConfig(_Section):
    waist_x_um: float = Field(default=6.5, gt=0)
    waist_y_um: float = Field(default=3.7, gt=0)
    center_um: Tuple[float, float] = (0.0, 0.0)
    ion_position_um: Optional[Tuple[float, float]] = None
    emission_angle_deg: float = 36.0
    input_power_mw: float = Field(default=1.5, ge=0)
    coupling_rad_s_per_sqrt_w_m2: float = Field(default=520.8, gt=0)
    coupling_provenance: PROVENANCE = "fitted"
    losses: List[LossEntry] = Field(
        default_factory=lambda: [LossEntry(stage=s, loss_db=db) for s, db in LossLedger.device_default().entries]
    )

    def ledger(self) -> LossLedger:
        return LossLedger(tuple((e.stage, e.loss_db) for e in self.losses))

    def profile(self) -> BeamProfile:
        return BeamProfile(
            waist_x=self.waist_x_um * 1e-6,
            waist_y=self.waist_y_um * 1e-6,
            center=tuple(c * 1e-6 for c in self.center_um),
            k_vector=emission_k_vector(np.deg2rad(self.emission_angle_deg)),
        )

    def rabi(self) -> float:
        position = self.ion_position_um if self.ion_position_um is not None else self.center_um
        return rabi_from_power(
            self.input_power_mw * 1e-3,
            self.ledger(),
            self.profile(),
            tuple(p * 1e-6 for p in position),
            coupling=self.coupling_rad_s_per_sqrt_w_m2,
        )


# ============== Ruído ==============

class HeatingConfig(_Section):
    kind: Literal["heating"] = "heating"
    rate_quanta_per_s: float = Field(ge=0)
    rate_uncertainty_quanta_per_s: float = Field(default=0.0, ge=0)

    def build(self) -> Heating:
        return Heating(self.rate_quanta_per_s, self.rate_uncertainty_quanta_per_s)


class MotionalDriftConfig(_Section):
    kind: Literal["motional_drift"] = "motional_drift"
    magnitude_hz: float = Field(ge=0)
    recalibration_interval_s: float = Field(default=15.0, gt=0)
    profile: Literal["linear_between_recal"] = "linear_between_recal"
    magnitude_spread: Literal["fixed", "exponential"] = "exponential"

    def build(self) -> MotionalDrift:
        return MotionalDrift(self.magnitude_hz, self.recalibration_interval_s, self.profile, self.magnitude_spread)


class LaserSinusoidConfig(_Section):
    kind: Literal["laser_sinusoid"] = "laser_sinusoid"
    excursion_amplitude_hz: float = Field(ge=0)
    period_ms: float = Field(gt=0)

    def build(self) -> LaserSinusoid:
        return LaserSinusoid(TWO_PI * self.excursion_amplitude_hz, self.period_ms * 1e-3)


class LaserGaussianDecayConfig(_Section):
    kind: Literal["laser_gaussian_decay"] = "laser_gaussian_decay"
    t_1e_ms: float = Field(gt=0)

    def build(self) -> LaserGaussianDecay:
        return LaserGaussianDecay(self.t_1e_ms * 1e-3)


class KerrConfig(_Section):
    kind: Literal["kerr"] = "kerr"
    chi_per_phonon_hz: List[float]
    spectator_nbars: List[float]
    provenance: PROVENANCE = "fitted"

    def build(self) -> Kerr:
        return Kerr(tuple(TWO_PI * c for c in self.chi_per_phonon_hz), tuple(self.spectator_nbars))


class SpectatorConfig(_Section):
    kind: Literal["spectator_dephasing"] = "spectator_dephasing"
    etas: List[float]
    nbars: List[float]
    provenance: PROVENANCE = "fitted"

    def build(self) -> SpectatorDephasing:
        return SpectatorDephasing(tuple(self.etas), tuple(self.nbars))


class SpontaneousEmissionConfig(_Section):
    kind: Literal["spontaneous_emission"] = "spontaneous_emission"
    lifetime_s: Optional[float] = Field(default=None, gt=0)

    def build(self, species: IonSpecies) -> SpontaneousEmission:
        return SpontaneousEmission(self.lifetime_s or species.upper_state_lifetime)


class ReadoutConfig(_Section):
    kind: Literal["readout"] = "readout"
    poisson_means: Tuple[float, float, float]
    thresholds: Optional[Tuple[int, int]] = None
    provenance: PROVENANCE = "synthetic"

    def build(self) -> Readout:
        return Readout(tuple(self.poisson_means), tuple(self.thresholds) if self.thresholds else None)


NoiseConfig = Annotated[
    Union[
        HeatingConfig,
        MotionalDriftConfig,
        LaserSinusoidConfig,
        LaserGaussianDecayConfig,
        KerrConfig,
        SpectatorConfig,
        SpontaneousEmissionConfig,
        ReadoutConfig,
    ],
    Field(discriminator="kind"),
]


# ============== Experimento ==============

class TimesConfig(_Section):
    start_us: float = Field(default=0.0, ge=0)
    stop_us: float = Field(gt=0)
    points: int = Field(default=101, ge=2)

    def grid(self) -> np.ndarray:
        return np.linspace(self.start_us, self.stop_us, self.points) * 1e-6


class ExperimentConfig(_Section):
    """O que simular em cada ponto da varredura"""
    kind: Literal["carrier_flop", "sideband_flop", "ms_gate", "parity_scan", "ramsey", "sideband_cool", "budget"]
    times: Optional[TimesConfig] = None
    n_ions: int = Field(default=2, ge=1, le=2)
    rabi_khz: Optional[float] = Field(default=None, gt=0)
    flop_mode: Optional[str] = None
    sideband: Literal["blue", "red"] = "blue"
    phase_points: int = Field(default=20, ge=2)
    bell_even_population: Optional[float] = Field(default=None, ge=0, le=1)
    bell_contrast: Optional[float] = Field(default=None, ge=0, le=1)
    cooling_levels: List[int] = Field(default_factory=lambda: [5, 4, 3, 2, 1])
    cooling_repeats: int = Field(default=4, ge=1)
    initial_nbar: Optional[float] = Field(default=None, ge=0)
    quadrature_order: int = Field(default=16, ge=2)
    joint_samples: int = Field(default=0, ge=0)


class SweepConfig(_Section):
    variable: str
    values: List[float] = Field(min_length=1)


class Scenario(_Section):
    name: str
    description: str = ""
    species: SpeciesConfig = Field(default_factory=SpeciesConfig)
    trap: TrapConfig = Field(default_factory=TrapConfig)
    modes: List[ModeConfig] = Field(min_length=1)
    drive: DriveConfig = Field(default_factory=DriveConfig)
    beam: BeamConfig = Field(default_factory=BeamConfig)
    noise: List[NoiseConfig] = Field(default_factory=list)
    experiment: ExperimentConfig
    shots_per_point: int = Field(default=200, ge=1)
    seed: int = Field(default=0, ge=0, lt=2 ** 64)
    sweep: Optional[SweepConfig] = None

    @model_validator(mode="after")
    def _check_references(self) -> "Scenario":
        labels = [m.label for m in self.modes]
        if len(set(labels)) != len(labels):
            raise ValueError(f"duplicate mode labels {labels}")
        if self.drive.gate_mode not in labels:
            raise ValueError(f"drive.gate_mode {self.drive.gate_mode!r} is not one of the modes {labels}")
        flop = self.experiment.flop_mode
        if flop is not None and flop not in labels:
            raise ValueError(f"experiment.flop_mode {flop!r} is not one of the modes {labels}")
        if self.experiment.kind in ("carrier_flop", "sideband_flop", "ramsey") and self.experiment.times is None:
            raise ValueError(f"experiment {self.experiment.kind!r} needs a times grid")
        if self.sweep is not None:
            value = lookup_path(self.model_dump(mode="json"), self.sweep.variable)
            if not isinstance(value, (int, float)) or isinstance(value, bool):
                raise ValueError(f"sweep variable {self.sweep.variable!r} is not a numeric setting")
        return self

    # ----- conversão para o domínio -----

    def build_species(self) -> IonSpecies:
        return self.species.build()

    def build_modes(self) -> List[MotionalMode]:
        species = self.build_species()
        omega_com = TWO_PI * self.trap.omega_com_mhz * 1e6
        modes = []
        for config in self.modes:
            if config.frequency_mhz is not None:
                omega = TWO_PI * config.frequency_mhz * 1e6
            elif config.label == STR_AXIAL:
                omega = stretch_frequency(omega_com)
            elif config.label == COM_AXIAL:
                omega = omega_com
            else:
                raise ScenarioError(f"mode {config.label!r} needs frequency_mhz")
            mode = MotionalMode(config.label, omega, nbar=config.nbar, heating_rate=config.heating_rate_quanta_per_s)
            if config.eta is not None:
                eta = tuple(config.eta)
            elif mode.is_radial:
                raise ScenarioError(f"radial mode {config.label!r} needs an explicit eta")
            else:
                eta = lamb_dicke(self.trap.k_projection, species, mode)
            modes.append(mode.with_changes(eta=eta))
        return modes

    def mode(self, label: str) -> MotionalMode:
        return next(m for m in self.build_modes() if m.label == label)

    def build_drive(self) -> GateDrive:
        config = self.drive
        mode = self.mode(config.gate_mode)
        detuning = TWO_PI * config.detuning_khz * 1e3
        ramp = config.ramp_us * 1e-6
        if config.rabi_khz is None and config.gate_time_us is None:
            drive = solve_gate_drive(mode, detuning, ramp, config.include_carrier, config.spin_phase_rad)
        else:
            base = solve_gate_drive(mode, detuning, ramp, config.include_carrier, config.spin_phase_rad)
            drive = base.with_changes(
                rabi_rate=TWO_PI * config.rabi_khz * 1e3 if config.rabi_khz is not None else base.rabi_rate,
                total_duration=config.gate_time_us * 1e-6 if config.gate_time_us is not None else base.total_duration,
            )
        return drive.with_changes(
            carrier_freq_offset=TWO_PI * config.carrier_offset_hz,
            ion_rabi_scales=tuple(config.ion_rabi_scales),
        )

    def build_channels(self) -> list:
        species = self.build_species()
        return [n.build(species) if isinstance(n, SpontaneousEmissionConfig) else n.build() for n in self.noise]

    def carrier_rabi(self) -> float:
        """Ω da portadora (rad/s): experimento, senão feixe"""
        if self.experiment.rabi_khz is not None:
            return TWO_PI * self.experiment.rabi_khz * 1e3
        return self.beam.rabi()


# ============== Caminhos e arquivos ==============

def _split_path(path: str) -> List[Any]:
    return [int(p) if p.isdigit() else p for p in path.split(".")]


def lookup_path(data: Any, path: str) -> Any:
    """Valor num caminho pontuado (índices de lista como números)"""
    node = data
    try:
        for key in _split_path(path):
            node = node[key]
    except (KeyError, IndexError, TypeError):
        raise ValueError(f"setting {path!r} does not exist") from None
    return node


def with_setting(scenario: Scenario, path: str, value: Any) -> Scenario:
    """Cópia validada do cenário com um valor substituído"""
    data = scenario.model_dump(mode="json")
    keys = _split_path(path)
    try:
        parent = lookup_path(data, ".".join(str(k) for k in keys[:-1])) if len(keys) > 1 else data
        parent[keys[-1]]
    except (ValueError, KeyError, IndexError, TypeError):
        raise ScenarioError(f"setting {path!r} does not exist") from None
    parent[keys[-1]] = value
    try:
        return Scenario.model_validate(data)
    except ValidationError as exc:
        raise ScenarioError(f"invalid value {value!r} for {path!r}: {exc}") from exc


def load_scenario(path) -> Scenario:
    """Lê e valida um arquivo de cenário JSON"""
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ScenarioError(f"cannot read scenario {path}: {exc}") from exc
    try:
        scenario = Scenario.model_validate_json(text)
    except ValidationError as exc:
        raise ScenarioError(f"invalid scenario {path}:\n{exc}") from exc
    logger.debug("loaded scenario %s (%s)", scenario.name, scenario.experiment.kind)
    return scenario


def dump_scenario(scenario: Scenario) -> str:
    return scenario.model_dump_json(indent=2)


def canonical_json(scenario: Scenario) -> str:
    """JSON com chaves ordenadas para o hash de configuração"""
    return json.dumps(scenario.model_dump(mode="json"), sort_keys=True, separators=(",", ":"))
