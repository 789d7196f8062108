"""
Propagation
Integração numérica no espaço truncado (qutip), com passo adaptativo ou fixo.
"""

import logging
import math
from typing import List, Optional, Sequence

import numpy as np
import qutip

from ..errors import PhysicsDomainError

logger = logging.getLogger(__name__)

# Tolerâncias do integrador adaptativo
SOLVER_OPTIONS = {
    "atol": 1e-12,
    "rtol": 1e-10,
    "nsteps": 10_000_000,
    "store_states": True,
}

# Passo fixo: no máximo 1/(200·f_max)
STEPS_PER_PERIOD = 200

INTEGRATORS = ("adaptive", "fixed")


def _split(hamiltonian) -> tuple:
    """Separa a parte constante dos termos com coeficiente"""
    if isinstance(hamiltonian, qutip.Qobj):
        return hamiltonian, []
    constant = None
    terms = []
    for entry in hamiltonian:
        if isinstance(entry, qutip.Qobj):
            constant = entry if constant is None else constant + entry
        else:
            terms.append((entry[0], entry[1]))
    return constant, terms


def _at(constant, terms, t: float) -> qutip.Qobj:
    H = constant
    for op, coeff in terms:
        H = op * complex(coeff(t)) if H is None else H + op * complex(coeff(t))
    return H


def propagate(
    hamiltonian,
    initial: qutip.Qobj,
    times: Sequence[float],
    collapse_operators: Sequence[qutip.Qobj] = (),
    integrator: str = "adaptive",
    max_frequency: float = 0.0,
) -> List[qutip.Qobj]:
    """
    Evolui `initial` e devolve o estado em cada instante de `times`.

    Args:
        hamiltonian: Qobj ou lista no formato do qutip [H0, [H1, f1], ...]
        initial: ket ou matriz densidade no instante 0
        times: instantes crescentes (s), todos >= 0
        collapse_operators: operadores de Lindblad
        integrator: "adaptive" (qutip) ou "fixed" (ponto médio, expm)
        max_frequency: maior frequência angular do problema (rad/s)

    Returns:
        Lista de estados, um por instante
    """
    times = np.asarray(times, dtype=float)
    if times.size == 0:
        return []
    if np.any(times < 0) or np.any(np.diff(times) < 0):
        raise PhysicsDomainError("times must be non-negative and sorted")
    if integrator not in INTEGRATORS:
        raise PhysicsDomainError(f"unknown integrator {integrator!r}")

    if integrator == "fixed":
        return _propagate_fixed(hamiltonian, initial, times, collapse_operators, max_frequency)

    # o qutip exige que a lista de tempos comece no estado inicial
    prepend = times[0] > 0
    tlist = np.concatenate([[0.0], times]) if prepend else times
    options = dict(SOLVER_OPTIONS)
    if max_frequency > 0:
        options["max_step"] = 2 * np.pi / max_frequency / 20

    if collapse_operators or initial.isoper:
        rho0 = initial if initial.isoper else qutip.ket2dm(initial)
        result = qutip.mesolve(hamiltonian, rho0, tlist, c_ops=list(collapse_operators), options=options)
    else:
        result = qutip.sesolve(hamiltonian, initial, tlist, options=options)

    states = list(result.states)
    return states[1:] if prepend else states


def _propagate_fixed(hamiltonian, initial, times, collapse_operators, max_frequency) -> List[qutip.Qobj]:
    """Produto de propagadores de ponto médio com passo <= 1/(200 f_max)"""
    constant, terms = _split(hamiltonian)
    if terms and collapse_operators:
        raise PhysicsDomainError("fixed-step integration with dissipators needs a constant Hamiltonian")

    dt_max = math.inf
    if terms and max_frequency > 0:
        dt_max = 2 * np.pi / max_frequency / STEPS_PER_PERIOD

    state = initial
    if collapse_operators and state.isket:
        state = qutip.ket2dm(state)
    liouvillian = qutip.liouvillian(constant, list(collapse_operators)) if collapse_operators else None

    states = []
    now = 0.0
    for target in times:
        span = target - now
        steps = max(1, math.ceil(span / dt_max)) if span > 0 else 0
        h = span / steps if steps else 0.0
        for k in range(steps):
            if liouvillian is not None:
                propagator = (liouvillian * h).expm()
                state = qutip.vector_to_operator(propagator * qutip.operator_to_vector(state))
                continue
            H = _at(constant, terms, now + (k + 0.5) * h)
            U = (-1j * h * H).expm()
            state = U * state if state.isket else U * state * U.dag()
        now = target
        states.append(state)
    logger.debug("fixed-step propagation finished at t=%.3e s", now)
    return states
