"""
Evolution Result
Populações de spin ao longo do tempo e estado final.
"""

from dataclasses import dataclass, field
from typing import List, Optional, Tuple

import numpy as np
import qutip

from ..errors import PhysicsDomainError
from .register import QuantumRegister

POPULATION_TOLERANCE = 1e-9

TWO_ION_COLUMNS = ("p_down_down", "p_mixed", "p_up_up")
ONE_ION_COLUMNS = ("p_down", "p_up")


@dataclass(frozen=True, eq=False)
class EvolutionResult:
    """
    Resultado de uma evolução.

    spin_populations tem uma coluna por número de íons em |↑⟩:
    [P↓↓, P↑↓+↓↑, P↑↑] para dois íons, [P↓, P↑] para um.
    """
    times: np.ndarray
    spin_populations: np.ndarray
    final_state: Optional[QuantumRegister] = None
    fidelity_vs_target: Optional[float] = None
    ion_excitation: Optional[np.ndarray] = None
    spin_states: Tuple[qutip.Qobj, ...] = field(default_factory=tuple)

    def __post_init__(self):
        times = np.asarray(self.times, dtype=float)
        pops = np.atleast_2d(np.asarray(self.spin_populations, dtype=float))
        if pops.shape[0] != times.size:
            raise PhysicsDomainError("one population row per time point is required")
        if np.any(pops < -POPULATION_TOLERANCE) or np.any(pops > 1 + POPULATION_TOLERANCE):
            raise PhysicsDomainError("populations outside [0, 1]")
        if np.any(np.abs(pops.sum(axis=1) - 1.0) > POPULATION_TOLERANCE):
            raise PhysicsDomainError("populations do not sum to 1")
        object.__setattr__(self, "times", times)
        object.__setattr__(self, "spin_populations", np.clip(pops, 0.0, 1.0))
        if self.ion_excitation is not None:
            object.__setattr__(self, "ion_excitation", np.asarray(self.ion_excitation, dtype=float))

    @property
    def n_ions(self) -> int:
        return self.spin_populations.shape[1] - 1

    @property
    def columns(self) -> Tuple[str, ...]:
        if self.n_ions == 1:
            return ONE_ION_COLUMNS
        if self.n_ions == 2:
            return TWO_ION_COLUMNS
        return tuple(f"p_{k}_up" for k in range(self.n_ions + 1))

    def column(self, name: str) -> np.ndarray:
        return self.spin_populations[:, self.columns.index(name)]

    @property
    def excited_ions(self) -> np.ndarray:
        """Número médio de íons em |↑⟩ por instante"""
        return self.spin_populations @ np.arange(self.n_ions + 1)

    def at(self, time: float) -> np.ndarray:
        """Linha de populações no instante mais próximo"""
        return self.spin_populations[int(np.argmin(np.abs(self.times - time)))]

    def to_records(self) -> List[dict]:
        records = []
        for t, row in zip(self.times, self.spin_populations):
            record = {"time": float(t)}
            record.update({name: float(p) for name, p in zip(self.columns, row)})
            records.append(record)
        return records

    def to_dict(self) -> dict:
        return {
            "times": self.times.tolist(),
            "columns": list(self.columns),
            "spin_populations": self.spin_populations.tolist(),
            "fidelity_vs_target": self.fidelity_vs_target,
        }
