"""
Sideband Cooling
Resfriamento pulsado na banda lateral vermelha com rebombeio ideal.
"""

from typing import Iterable, Mapping, Union

import numpy as np

from ..physcore import ThermalDistribution
from .flopping import RED, sideband_rates


def cooling_schedule(rabi: float, eta: float, fock_levels: Iterable[int], repeats: int = 1) -> list:
    """Pulsos π para cada nível n: duração π/(Ωη√n), repetidos em sequência"""
    levels = list(fock_levels)
    return [
        {"duration": float(np.pi / (rabi * abs(eta) * np.sqrt(n)))}
        for _ in range(repeats)
        for n in levels
    ]


def sideband_cool(
    initial: ThermalDistribution,
    pulse_schedule: Iterable[Union[Mapping, float]],
    rabi: float,
    eta: float,
) -> ThermalDistribution:
    """
    Aplica ciclos de pulso vermelho + rebombeio à escada de Fock.

    Em cada ciclo n → n−1 com probabilidade sin²(Ωη√n t/2).
    """
    probs = np.array(initial.probabilities, dtype=float)
    n = initial.fock_numbers
    rates = sideband_rates(rabi, eta, n, RED)

    for pulse in pulse_schedule:
        duration = pulse["duration"] if isinstance(pulse, Mapping) else float(pulse)
        transfer = np.sin(0.5 * rates * duration) ** 2
        moved = probs * transfer
        probs = probs - moved
        probs[:-1] += moved[1:]

    return ThermalDistribution(
        probabilities=probs / probs.sum(),
        nbar_nominal=float(np.dot(n, probs)),
        truncation=initial.truncation,
        tail_mass=initial.tail_mass,
    )
