"""
Flop Fits
Ajustes de flop de portadora, decaimento de Rabi e tempo de portão.
"""

import logging
from typing import Sequence

import numpy as np

from ..dynamics import carrier_flop, ms_evolve, solve_gate_drive
from ..dynamics.flopping import rabi_scale_distribution
from ..errors import DegenerateDataError, FitError
from ..physcore import MotionalMode
from .fitting import FitResult, weighted_least_squares

logger = logging.getLogger(__name__)

MIN_STDERR = 1e-3


def _populations(data, n_columns: int):
    data = np.asarray(data, dtype=float)
    if data.ndim != 2 or data.shape[1] != 1 + 2 * n_columns:
        raise FitError(f"expected rows of t, {n_columns} populations and {n_columns} standard errors")
    if data.shape[0] < 2:
        raise DegenerateDataError("need at least two time points")
    return data[:, 0], data[:, 1:1 + n_columns], data[:, 1 + n_columns:]


def fit_carrier_flop(data, modes: Sequence[MotionalMode], rabi_guess: float, min_stderr: float = MIN_STDERR) -> FitResult:
    """
    Ω e desbalanço ε (Ω₁,₂ = Ω(1 ± ε/2)) a partir de [P↓↓, P_mixed, P↑↑] de dois íons.

    A distribuição de escalas de Debye-Waller dos modos é fixa durante o ajuste.
    """
    times, pops, stderr = _populations(data, 3)
    scales, weights = rabi_scale_distribution(modes, 2)

    def model(t, rabi, imbalance):
        factors = np.array([1 + imbalance / 2, 1 - imbalance / 2])
        # P↑ por íon, média térmica conjunta
        up = np.sin(0.5 * rabi * np.einsum("t,sk->tsk", t, scales * factors)) ** 2
        p1, p2 = up[..., 0], up[..., 1]
        both = (p1 * p2) @ weights
        one = (p1 * (1 - p2) + p2 * (1 - p1)) @ weights
        return np.column_stack([1 - both - one, one, both])

    starts = [(rabi_guess, 0.0), (rabi_guess, 0.05), (rabi_guess, -0.05)]
    bounds = ([0.5 * rabi_guess, -0.5], [2.0 * rabi_guess, 0.5])
    result = weighted_least_squares(
        model, times, pops, np.maximum(stderr, min_stderr), ("rabi", "imbalance"), starts, bounds, label="carrier_flop"
    )
    return result


def fit_rabi_decay(data, rabi_guess: float, decay_guess: float, min_stderr: float = MIN_STDERR) -> FitResult:
    """P↑(t) = [1 − exp(−(t/τ_d)²) cos Ωt]/2; devolve também o tempo π"""
    times, pops, stderr = _populations(data, 1)

    def model(t, rabi, decay):
        return 0.5 * (1 - np.exp(-(t / decay) ** 2) * np.cos(rabi * t))

    starts = [(rabi_guess * f, decay_guess) for f in (0.9, 1.0, 1.1)]
    bounds = ([0.25 * rabi_guess, 1e-3 * decay_guess], [4.0 * rabi_guess, 1e3 * decay_guess])
    result = weighted_least_squares(
        model, times, pops[:, 0], np.maximum(stderr[:, 0], min_stderr), ("rabi", "decay_time"), starts, bounds,
        label="rabi_decay",
    )
    lo, hi = result.confidence["rabi"]
    result.params["pi_time"] = float(np.pi / result.params["rabi"])
    result.confidence["pi_time"] = (float(np.pi / hi), float(np.pi / lo))
    return result


def fit_gate_time(
    data,
    mode: MotionalMode,
    gate_time_guess: float,
    ramp: float = 0.0,
    min_stderr: float = MIN_STDERR,
) -> FitResult:
    """
    Tempo de portão como único parâmetro livre.

    Para cada τ, δ = 2π/(τ − r) e Ω é resolvido pelo fechamento; as populações
    [P↓↓, P_mixed, P↑↑] vêm do caminho analítico de ms_evolve.
    Com rampas o laço fecha em duração diferente de τ; a duração efetiva do
    drive ajustado fica em extras["drive_duration"].
    """
    times, pops, stderr = _populations(data, 3)

    def model(t, gate_time):
        detuning = 2 * np.pi / (gate_time - ramp)
        drive = solve_gate_drive(mode, detuning, ramp)
        return ms_evolve(drive, mode, times=t, method="analytic").spin_populations

    bounds = ([max(0.5 * gate_time_guess, 2.5 * ramp)], [1.5 * gate_time_guess])
    result = weighted_least_squares(
        model, times, pops, np.maximum(stderr, min_stderr), ("gate_time",),
        [(gate_time_guess,), (0.95 * gate_time_guess,), (1.05 * gate_time_guess,)], bounds, label="gate_time",
    )
    fitted = result.params["gate_time"]
    result.extras["drive_duration"] = solve_gate_drive(mode, 2 * np.pi / (fitted - ramp), ramp).total_duration
    logger.info("gate time fit: %.4e s (drive %.4e s)", fitted, result.extras["drive_duration"])
    return result
