"""
Shot Sampling
Sorteio multinomial de disparos e fluxos aleatórios por ponto da varredura.
"""

from dataclasses import dataclass
from typing import Optional, Union

import numpy as np

from ..errors import PhysicsDomainError

NORMALIZATION_TOLERANCE = 1e-9


@dataclass(frozen=True)
class ShotSample:
    """Contagens por resultado, frequências e erro de projeção √(p(1−p)/N)"""
    counts: np.ndarray
    frequencies: np.ndarray
    stderr: np.ndarray
    n_shots: int

    def to_dict(self) -> dict:
        return {
            "counts": self.counts.tolist(),
            "frequencies": self.frequencies.tolist(),
            "stderr": self.stderr.tolist(),
            "n_shots": self.n_shots,
        }


def point_rng(seed: int, index: int, stream: int = 0) -> np.random.Generator:
    """
    Gerador do ponto `index` da varredura.

    Chaves (index, stream) da SeedSequence raiz: o particionamento entre
    processos não altera os sorteios.
    """
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(index, stream)))


def projection_stderr(frequencies, n_shots: int) -> np.ndarray:
    frequencies = np.asarray(frequencies, dtype=float)
    return np.sqrt(frequencies * (1.0 - frequencies) / n_shots)


def monte_carlo_shots(
    probabilities,
    n_shots: int,
    rng: Optional[Union[np.random.Generator, int]] = None,
) -> ShotSample:
    """
    Sorteio multinomial de n_shots disparos.

    Args:
        probabilities: probabilidades por resultado (somam 1)
        n_shots: número de disparos
        rng: Generator ou semente inteira

    Returns:
        ShotSample com contagens, frequências e erro padrão por resultado
    """
    p = np.asarray(probabilities, dtype=float)
    if n_shots < 1:
        raise PhysicsDomainError(f"n_shots must be >= 1, got {n_shots}")
    if np.any(p < -NORMALIZATION_TOLERANCE) or abs(p.sum() - 1.0) > NORMALIZATION_TOLERANCE:
        raise PhysicsDomainError(f"probabilities must be normalized, got {p.tolist()}")
    p = np.clip(p, 0.0, None)
    p = p / p.sum()
    generator = rng if isinstance(rng, np.random.Generator) else np.random.default_rng(rng)
    counts = generator.multinomial(n_shots, p)
    frequencies = counts / n_shots
    return ShotSample(counts, frequencies, projection_stderr(frequencies, n_shots), n_shots)
