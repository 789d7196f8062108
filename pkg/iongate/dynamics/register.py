"""
Quantum Register
Estado de spins ⊗ modos de Fock truncados (ordem: íon 1 ⊗ íon 2 ⊗ modo 1 ⊗ ...).

Convenção de base: |↑⟩ = basis(2, 0), |↓⟩ = basis(2, 1), de modo que
sigmap() = |↑⟩⟨↓| e sigmaz()|↑⟩ = +|↑⟩.
"""

from dataclasses import dataclass
from typing import Dict, Sequence, Tuple

import numpy as np
import qutip

from ..errors import PhysicsDomainError
from ..physcore import ThermalDistribution

UP = 0
DOWN = 1

BASIS_ORDER = "ion 1 spin ⊗ ion 2 spin ⊗ mode 1 ⊗ mode 2 ⊗ ..."

NORM_TOLERANCE = 1e-9


def spin_ket(labels: str) -> qutip.Qobj:
    """Ket de spins a partir de rótulos 'u'/'d' (ex: 'dd')"""
    index = {"u": UP, "d": DOWN}
    try:
        return qutip.tensor(*[qutip.basis(2, index[c]) for c in labels])
    except KeyError:
        raise PhysicsDomainError(f"spin labels must be 'u' or 'd', got {labels!r}") from None


def sigma_phi(phi: float) -> qutip.Qobj:
    """σ_φ = e^(−iφ)σ+ + e^(iφ)σ− = cos φ σx + sin φ σy"""
    return np.exp(-1j * phi) * qutip.sigmap() + np.exp(1j * phi) * qutip.sigmam()


def embed(op: qutip.Qobj, position: int, dims: Sequence[int]) -> qutip.Qobj:
    """Operador de um subsistema estendido ao espaço total"""
    factors = [qutip.qeye(d) for d in dims]
    factors[position] = op
    return qutip.tensor(*factors)


def thermal_operator(dist: ThermalDistribution, dim: int = None) -> qutip.Qobj:
    """Matriz densidade diagonal de uma distribuição de Fock"""
    dim = dim or dist.truncation + 1
    if dim < dist.truncation + 1:
        raise PhysicsDomainError("Fock dimension smaller than distribution support")
    probs = np.zeros(dim)
    probs[: dist.truncation + 1] = dist.probabilities
    return qutip.Qobj(np.diag(probs))


@dataclass(frozen=True, eq=False)
class QuantumRegister:
    """Estado puro (ket) ou misto (matriz densidade) de íons e modos"""
    spin_dims: Tuple[int, ...]
    fock_dims: Tuple[int, ...]
    state: qutip.Qobj

    def __post_init__(self):
        object.__setattr__(self, "spin_dims", tuple(int(d) for d in self.spin_dims))
        object.__setattr__(self, "fock_dims", tuple(int(d) for d in self.fock_dims))
        if any(d not in (2, 3) for d in self.spin_dims):
            raise PhysicsDomainError(f"spin dimensions must be 2 or 3, got {self.spin_dims}")
        expected = list(self.spin_dims + self.fock_dims)
        if list(self.state.dims[0]) != expected:
            raise PhysicsDomainError(f"state dims {self.state.dims[0]} do not match {expected}")

        if self.state.isket:
            if abs(self.state.norm() - 1.0) > NORM_TOLERANCE:
                raise PhysicsDomainError(f"state norm {self.state.norm()} differs from 1")
        elif self.state.isoper:
            matrix = self.state.full()
            if abs(np.trace(matrix).real - 1.0) > NORM_TOLERANCE:
                raise PhysicsDomainError(f"density matrix trace {np.trace(matrix)} differs from 1")
            if np.max(np.abs(matrix - matrix.conj().T)) > NORM_TOLERANCE:
                raise PhysicsDomainError("density matrix is not Hermitian")
        else:
            raise PhysicsDomainError("state must be a ket or a density matrix")

    @classmethod
    def ground(
        cls,
        n_ions: int = 2,
        modes: Sequence[ThermalDistribution] = (),
        fock_dims: Sequence[int] = None,
    ) -> "QuantumRegister":
        """|↓...↓⟩ ⊗ estados térmicos dos modos"""
        spins = spin_ket("d" * n_ions)
        dims = list(fock_dims) if fock_dims else [m.truncation + 1 for m in modes]
        if not modes:
            return cls((2,) * n_ions, (), spins)
        motion = [thermal_operator(m, d) for m, d in zip(modes, dims)]
        state = qutip.tensor(qutip.ket2dm(spins), *motion)
        return cls((2,) * n_ions, tuple(dims), state)

    @classmethod
    def from_spin_state(cls, state: qutip.Qobj) -> "QuantumRegister":
        return cls(tuple(state.dims[0]), (), state)

    @property
    def n_ions(self) -> int:
        return len(self.spin_dims)

    @property
    def is_pure(self) -> bool:
        return self.state.isket

    def density_matrix(self) -> qutip.Qobj:
        return qutip.ket2dm(self.state) if self.state.isket else self.state

    def spin_state(self) -> qutip.Qobj:
        """Estado reduzido dos spins (matriz densidade)"""
        if not self.fock_dims:
            return self.density_matrix()
        return self.state.ptrace(list(range(self.n_ions)))

    def mode_populations(self, index: int = 0) -> np.ndarray:
        """Populações de Fock do modo `index`"""
        reduced = self.state.ptrace(self.n_ions + index)
        return np.real(reduced.diag())

    def spin_populations(self) -> np.ndarray:
        """Populações por número de íons em |↑⟩ (colunas k = 0..n_ions)"""
        return excitation_populations(self.spin_state())

    def basis_populations(self) -> Dict[str, float]:
        """Populações na base computacional, chaves 'dd', 'du', ..."""
        if self.n_ions != 2 or any(d != 2 for d in self.spin_dims):
            raise PhysicsDomainError("basis populations are defined for two qubits")
        diag = np.real(self.spin_state().diag())
        labels = {UP: "u", DOWN: "d"}
        return {
            labels[i] + labels[j]: float(diag[2 * i + j])
            for i in (UP, DOWN)
            for j in (UP, DOWN)
        }

    def to_dict(self) -> dict:
        return {
            "spin_dims": list(self.spin_dims),
            "fock_dims": list(self.fock_dims),
            "basis_order": BASIS_ORDER,
            "pure": self.is_pure,
        }


def excitation_populations(spin_state: qutip.Qobj) -> np.ndarray:
    """
    Agrupa a diagonal de um estado de qubits pelo número de íons em |↑⟩.

    Para dois íons: [P↓↓, P↑↓+↓↑, P↑↑].
    """
    dims = list(spin_state.dims[0])
    if any(d != 2 for d in dims):
        raise PhysicsDomainError("excitation populations need two-level spins")
    diag = np.real(spin_state.diag()) if spin_state.isoper else np.abs(spin_state.full().ravel()) ** 2
    n = len(dims)
    ups = np.array([n - bin(i).count("1") for i in range(2 ** n)])  # bit 0 = |↑⟩
    return np.bincount(ups, weights=diag, minlength=n + 1)
