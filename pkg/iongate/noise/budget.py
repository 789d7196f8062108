"""
Error Budget
Composição das contribuições de erro na ordem da tabela do orçamento.
"""

import logging
import math
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence

import numpy as np

from ..dynamics import GateDrive
from ..errors import PhysicsDomainError
from ..physcore import MotionalMode
from .channels import (
    Heating,
    Kerr,
    LaserSinusoid,
    MotionalDrift,
    Readout,
    SpectatorDephasing,
    SpontaneousEmission,
)
from .estimators import (
    QUADRATURE_ORDER,
    drift_error,
    gate_trajectory,
    heating_error,
    joint_infidelity,
    kerr_error,
    laser_noise_error,
    readout_interpretations,
    spectator_dephasing_error,
    spontaneous_emission_error,
)

logger = logging.getLogger(__name__)

# === LINHAS DA TABELA ===
HEATING_ROW = "Motional mode heating"
DRIFT_ROW = "Motional frequency drifts"
LASER_ROW = "Laser frequency noise"
READOUT_ROW = "Two-ion readout error"
KERR_ROW = "Kerr cross-coupling"
SPECTATOR_ROW = "Spectator mode occupancies"
EMISSION_ROW = "Spontaneous emission"

ROW_ORDER = (HEATING_ROW, DRIFT_ROW, LASER_ROW, READOUT_ROW, KERR_ROW, SPECTATOR_ROW, EMISSION_ROW)


@dataclass
class BudgetEntry:
    """Uma linha do orçamento"""
    source: str
    infidelity: float
    uncertainty: float = 0.0
    note: str = ""

    def __post_init__(self):
        if self.infidelity < 0 or self.uncertainty < 0:
            raise PhysicsDomainError(f"budget entry {self.source!r} must be non-negative")

    def to_dict(self) -> dict:
        return {
            "source": self.source,
            "infidelity": self.infidelity,
            "uncertainty": self.uncertainty,
            "note": self.note,
        }


@dataclass
class ErrorBudget:
    """Linhas ordenadas, total e notas de verificação"""
    entries: List[BudgetEntry]
    notes: Dict[str, float] = field(default_factory=dict)

    @property
    def total(self) -> float:
        return math.fsum(e.infidelity for e in self.entries)

    def entry(self, source: str) -> BudgetEntry:
        for e in self.entries:
            if e.source == source:
                return e
        raise KeyError(source)

    def to_records(self) -> List[dict]:
        rows = [e.to_dict() for e in self.entries]
        rows.append({"source": "Total", "infidelity": self.total, "uncertainty": 0.0, "note": ""})
        return rows

    def to_dict(self) -> dict:
        return {
            "entries": [e.to_dict() for e in self.entries],
            "total": self.total,
            "notes": dict(self.notes),
        }


@dataclass
class BudgetConfig:
    """Portão, modo do portão e canais que alimentam o orçamento"""
    gate: GateDrive
    mode: MotionalMode
    channels: Sequence = ()
    quadrature_order: int = QUADRATURE_ORDER
    joint_samples: int = 0
    seed: Optional[int] = None

    def find(self, channel_type):
        matches = [c for c in self.channels if isinstance(c, channel_type)]
        if len(matches) > 1:
            raise PhysicsDomainError(f"more than one {channel_type.__name__} channel configured")
        return matches[0] if matches else None


def _heating_row(config: BudgetConfig, channel: Heating) -> BudgetEntry:
    tau = config.gate.total_duration
    return BudgetEntry(
        HEATING_ROW, heating_error(channel.rate, tau), heating_error(channel.rate_uncertainty, tau), "rate*tau/2"
    )


def _drift_row(config: BudgetConfig, channel: MotionalDrift) -> BudgetEntry:
    return BudgetEntry(DRIFT_ROW, drift_error(channel, config.gate, config.mode, config.quadrature_order))


def _laser_row(config: BudgetConfig, channel: LaserSinusoid) -> BudgetEntry:
    return BudgetEntry(LASER_ROW, laser_noise_error(channel, config.gate, config.mode, config.quadrature_order))


def _readout_row(config: BudgetConfig, channel: Readout) -> BudgetEntry:
    values = readout_interpretations(channel)
    note = f"population-only interpretation {values['population_only']:.3e}"
    return BudgetEntry(READOUT_ROW, values["parity_and_population"], note=note)


def _kerr_row(config: BudgetConfig, channel: Kerr) -> BudgetEntry:
    return BudgetEntry(KERR_ROW, kerr_error(channel, config.gate, config.mode))


def _spectator_row(config: BudgetConfig, channel: SpectatorDephasing) -> BudgetEntry:
    return BudgetEntry(SPECTATOR_ROW, spectator_dephasing_error(channel, config.gate, config.mode))


def _emission_row(config: BudgetConfig, channel: SpontaneousEmission) -> BudgetEntry:
    trajectory = gate_trajectory(config.gate, config.mode)
    return BudgetEntry(EMISSION_ROW, spontaneous_emission_error(channel.lifetime, config.gate, trajectory))


ROW_HANDLERS = {
    HEATING_ROW: (Heating, _heating_row),
    DRIFT_ROW: (MotionalDrift, _drift_row),
    LASER_ROW: (LaserSinusoid, _laser_row),
    READOUT_ROW: (Readout, _readout_row),
    KERR_ROW: (Kerr, _kerr_row),
    SPECTATOR_ROW: (SpectatorDephasing, _spectator_row),
    EMISSION_ROW: (SpontaneousEmission, _emission_row),
}


def total_budget(config: BudgetConfig) -> ErrorBudget:
    """
    Roda cada estimador e monta as linhas na ordem da tabela.

    Canais ausentes entram como linha zero com nota "not configured".
    Com joint_samples > 0, anexa a verificação conjunta às notas.
    """
    entries = []
    for row in ROW_ORDER:
        channel_type, handler = ROW_HANDLERS[row]
        channel = config.find(channel_type)
        if channel is None:
            entries.append(BudgetEntry(row, 0.0, note="not configured"))
            continue
        entry = handler(config, channel)
        logger.info("%s: %.3e", row, entry.infidelity)
        entries.append(entry)

    budget = ErrorBudget(entries)
    readout = config.find(Readout)
    if readout is not None:
        values = readout_interpretations(readout)
        budget.notes["readout_population_only"] = values["population_only"]
        budget.notes["readout_p_one_to_two"] = values["p_one_to_two"]
        budget.notes["readout_p_two_to_one"] = values["p_two_to_one"]

    if config.joint_samples > 0:
        rng = np.random.default_rng(np.random.SeedSequence(config.seed, spawn_key=(0,)))
        mean, stderr = joint_infidelity(config.channels, config.gate, config.mode, rng, config.joint_samples)
        additive = math.fsum(budget.entry(r).infidelity for r in (HEATING_ROW, DRIFT_ROW, LASER_ROW, KERR_ROW, SPECTATOR_ROW))
        budget.notes.update({"joint_infidelity": mean, "joint_stderr": stderr, "joint_additive": additive})
    logger.info("budget total %.3e", budget.total)
    return budget
