"""
Rabi Flopping
Oscilações de portadora e de banda lateral ponderadas termicamente.
"""

import logging
from typing import List, Sequence, Tuple

import numpy as np
import qutip
from scipy.signal import fftconvolve

from ..errors import PhysicsDomainError
from ..physcore import MotionalMode, ThermalDistribution, debye_waller, fock_cutoff, thermal_distribution
from .propagation import propagate
from .register import QuantumRegister, embed, excitation_populations, thermal_operator
from .result import EvolutionResult

logger = logging.getLogger(__name__)

BLUE = "blue"
RED = "red"

# Enumeração exata até este número de estados conjuntos
EXACT_JOINT_LIMIT = 50_000
LOG_GRID_STEP = 2e-7
COMPRESSED_BINS = 8192


# ============== Portadora ==============

def _mode_distributions(modes: Sequence[MotionalMode]) -> List[ThermalDistribution]:
    return [thermal_distribution(m.nbar, fock_cutoff(m.nbar)) for m in modes]


def _ion_etas(modes: Sequence[MotionalMode], n_ions: int) -> np.ndarray:
    """|η| por modo e íon; modos com eta escalar valem para todos os íons"""
    etas = np.zeros((len(modes), n_ions))
    for i, mode in enumerate(modes):
        if len(mode.eta) == 1:
            etas[i, :] = abs(mode.eta[0])
        elif len(mode.eta) == n_ions:
            etas[i, :] = np.abs(mode.eta)
        else:
            raise PhysicsDomainError(f"mode {mode.label} has {len(mode.eta)} eta entries for {n_ions} ions")
    return etas


def _exact_scales(etas: np.ndarray, dists: Sequence[ThermalDistribution]) -> Tuple[np.ndarray, np.ndarray]:
    """Enumera os estados de Fock conjuntos: (fatores por íon, pesos)"""
    n_ions = etas.shape[1]
    values = np.ones((1, n_ions))
    weights = np.ones(1)
    for eta_row, dist in zip(etas, dists):
        n = dist.fock_numbers
        factors = np.stack([debye_waller(e, n) for e in eta_row], axis=1)
        values = (values[:, None, :] * factors[None, :, :]).reshape(-1, n_ions)
        weights = (weights[:, None] * dist.probabilities[None, :]).ravel()
        keep = weights > 0
        values, weights = values[keep], weights[keep]
    return values, weights


def _log_grid_scales(eta_column: np.ndarray, dists: Sequence[ThermalDistribution]) -> Tuple[np.ndarray, np.ndarray]:
    """
    Distribuição do produto de Debye-Waller via convolução em log.

    Cada modo vira um histograma em uma grade uniforme de ln(fator); a soma de
    modos independentes é a convolução dos histogramas. O resultado é
    recompactado em COMPRESSED_BINS faixas preservando a média de cada faixa.
    """
    grid = None
    offset = 0.0
    for eta, dist in zip(eta_column, dists):
        factors = debye_waller(eta, dist.fock_numbers)
        if np.any(factors <= 0):
            raise PhysicsDomainError("Debye-Waller factor changes sign; Lamb-Dicke regime violated")
        logs = np.log(factors)
        start = logs.min()
        position = (logs - start) / LOG_GRID_STEP
        lower = np.floor(position).astype(int)
        frac = position - lower
        histogram = np.zeros(lower.max() + 2)
        np.add.at(histogram, lower, dist.probabilities * (1 - frac))
        np.add.at(histogram, lower + 1, dist.probabilities * frac)
        grid = histogram if grid is None else np.clip(fftconvolve(grid, histogram), 0.0, None)
        offset += start

    logs = offset + LOG_GRID_STEP * np.arange(grid.size)
    grid = grid / grid.sum()
    if grid.size <= COMPRESSED_BINS:
        keep = grid > 0
        return np.exp(logs[keep]), grid[keep]
    edges = np.linspace(0, grid.size, COMPRESSED_BINS + 1).astype(int)
    weights = np.add.reduceat(grid, edges[:-1])
    sums = np.add.reduceat(grid * logs, edges[:-1])
    keep = weights > 0
    return np.exp(sums[keep] / weights[keep]), weights[keep]


def rabi_scale_distribution(modes: Sequence[MotionalMode], n_ions: int = 2) -> Tuple[np.ndarray, np.ndarray]:
    """
    Fatores ∏ e^(−η²/2)L_n(η²) por íon e seus pesos térmicos.

    Returns:
        (values de forma (K, n_ions), weights de forma (K,))
    """
    if not modes:
        return np.ones((1, n_ions)), np.ones(1)
    etas = _ion_etas(modes, n_ions)
    dists = _mode_distributions(modes)
    joint = np.prod([d.truncation + 1 for d in dists], dtype=float)
    if joint <= EXACT_JOINT_LIMIT:
        return _exact_scales(etas, dists)
    if not np.allclose(etas, etas[:, :1]):
        raise PhysicsDomainError(
            "too many joint Fock states for unequal per-ion eta; reduce modes or occupancies"
        )
    logger.debug("using log-grid Debye-Waller distribution for %.2e joint states", joint)
    values, weights = _log_grid_scales(etas[:, 0], dists)
    return np.repeat(values[:, None], n_ions, axis=1), weights


def thermal_scale_distribution(etas: Sequence[float], nbars: Sequence[float]) -> Tuple[np.ndarray, np.ndarray]:
    """Fator comum ∏ e^(−η²/2)L_n(η²) de modos térmicos e seus pesos"""
    if len(etas) != len(nbars):
        raise PhysicsDomainError("one eta per spectator occupancy is required")
    if not len(etas):
        return np.ones(1), np.ones(1)
    dists = [thermal_distribution(n, fock_cutoff(n)) for n in nbars]
    eta_column = np.abs(np.asarray(etas, dtype=float))
    joint = np.prod([d.truncation + 1 for d in dists], dtype=float)
    if joint <= EXACT_JOINT_LIMIT:
        values, weights = _exact_scales(eta_column[:, None], dists)
        return values[:, 0], weights
    return _log_grid_scales(eta_column, dists)


def carrier_flop(rabi, modes: Sequence[MotionalMode], times, n_ions: int = 2) -> EvolutionResult:
    """
    Oscilação de Rabi na portadora com taxas Ω·∏ e^(−η²/2)L_n(η²).

    Args:
        rabi: Ω comum ou sequência com um Ω por íon (estudos de desbalanço)
        modes: modos com n̄ e η por íon
        times: instantes (s)
    """
    times = np.asarray(times, dtype=float)
    rabis = np.broadcast_to(np.asarray(rabi, dtype=float), (n_ions,))
    values, weights = rabi_scale_distribution(modes, n_ions)

    # prob. de |↑⟩ por íon, estado conjunto e instante: (T, K, n_ions)
    angles = 0.5 * times[:, None, None] * values[None, :, :] * rabis[None, None, :]
    up = np.sin(angles) ** 2
    ion_excitation = np.einsum("tki,k->ti", up, weights)

    # íons independentes dado o estado de Fock
    pops = np.zeros((times.size, n_ions + 1))
    for k in range(n_ions + 1):
        pops[:, k] = np.einsum("tk,k->t", _exactly_k(up, k), weights)
    return EvolutionResult(times=times, spin_populations=pops, ion_excitation=ion_excitation)


def _exactly_k(up: np.ndarray, k: int) -> np.ndarray:
    """Probabilidade de exatamente k íons em |↑⟩ (polinômio gerador)"""
    n_ions = up.shape[-1]
    poly = np.zeros(up.shape[:-1] + (n_ions + 1,))
    poly[..., 0] = 1.0
    for i in range(n_ions):
        p = up[..., i]
        shifted = np.zeros_like(poly)
        shifted[..., 1:] = poly[..., :-1] * p[..., None]
        poly = poly * (1 - p)[..., None] + shifted
    return poly[..., k]


def carrier_flop_numeric(rabi, modes: Sequence[MotionalMode], times, n_ions: int = 2, fock_dims=None) -> EvolutionResult:
    """
    Propagação direta do Hamiltoniano de portadora truncado,
    H = Σ_i (Ω_i/2) σx_i ⊗ D_i com D_i diagonal de Debye-Waller.
    """
    times = np.asarray(times, dtype=float)
    rabis = np.broadcast_to(np.asarray(rabi, dtype=float), (n_ions,))
    etas = _ion_etas(modes, n_ions)
    dists = _mode_distributions(modes)
    fock_dims = list(fock_dims) if fock_dims else [d.truncation + 1 for d in dists]
    dims = [2] * n_ions + fock_dims

    H = 0
    for i in range(n_ions):
        coupling = qutip.tensor(
            *[qutip.qeye(2) if j != i else qutip.sigmax() for j in range(n_ions)],
            *[qutip.Qobj(np.diag(debye_waller(etas[m, i], np.arange(d)))) for m, d in enumerate(fock_dims)],
        )
        H = H + 0.5 * rabis[i] * coupling

    initial = QuantumRegister.ground(n_ions, dists, fock_dims)
    states = propagate(H, initial.state, times)
    spins = [s.ptrace(list(range(n_ions))) for s in states]
    pops = np.array([excitation_populations(s) for s in spins])
    final = QuantumRegister(tuple([2] * n_ions), tuple(fock_dims), states[-1]) if states else None
    return EvolutionResult(times=times, spin_populations=pops, final_state=final, spin_states=tuple(spins))


# ============== Banda lateral ==============

def sideband_rates(rabi: float, eta: float, n: np.ndarray, sideband: str) -> np.ndarray:
    """Taxas de primeira ordem: Ωη√(n+1) (azul), Ωη√n (vermelha)"""
    if sideband == BLUE:
        return rabi * abs(eta) * np.sqrt(n + 1.0)
    if sideband == RED:
        return rabi * abs(eta) * np.sqrt(n)
    raise PhysicsDomainError(f"sideband must be 'blue' or 'red', got {sideband!r}")


def sideband_flop(
    rabi: float,
    eta,
    dist: ThermalDistribution,
    sideband: str,
    times,
    n_ions: int = 1,
) -> EvolutionResult:
    """
    Excitação média térmica sob um pulso de banda lateral.

    Um íon: soma analítica Σ p_n sin²(Ω_n t/2). Dois íons no mesmo modo:
    propagação numérica do acoplamento de Jaynes-Cummings coletivo.
    """
    times = np.asarray(times, dtype=float)
    if n_ions == 1:
        eta = float(np.ravel([eta])[0])
        rates = sideband_rates(rabi, eta, dist.fock_numbers, sideband)
        up = np.sin(0.5 * np.outer(times, rates)) ** 2 @ dist.probabilities
        pops = np.column_stack([1.0 - up, up])
        return EvolutionResult(times=times, spin_populations=pops, ion_excitation=up[:, None])
    return _collective_sideband(rabi, eta, dist, sideband, times, n_ions)


def _collective_sideband(rabi, eta, dist, sideband, times, n_ions) -> EvolutionResult:
    etas = np.broadcast_to(np.asarray(eta, dtype=float), (n_ions,))
    if sideband not in (BLUE, RED):
        raise PhysicsDomainError(f"sideband must be 'blue' or 'red', got {sideband!r}")
    # pulsos azuis podem somar até n_ions fônons
    dim = dist.truncation + 1 + n_ions
    dims = [2] * n_ions + [dim]
    a = embed(qutip.destroy(dim), n_ions, dims)
    H = 0
    for k in range(n_ions):
        sp = embed(qutip.sigmap(), k, dims)
        term = sp * a.dag() if sideband == BLUE else sp * a
        H = H + 0.5 * rabi * etas[k] * (term + term.dag())

    initial = QuantumRegister.ground(n_ions, [dist], [dim])
    states = propagate(H, initial.state, times)
    spins = [s.ptrace(list(range(n_ions))) for s in states]
    pops = np.array([excitation_populations(s) for s in spins])
    ion_up = np.array([[np.real(s.ptrace(k).diag()[0]) for k in range(n_ions)] for s in spins])
    final = QuantumRegister(tuple([2] * n_ions), (dim,), states[-1]) if states else None
    return EvolutionResult(
        times=times, spin_populations=pops, final_state=final,
        ion_excitation=ion_up, spin_states=tuple(spins),
    )
