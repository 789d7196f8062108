"""
Parity Analysis
Paridade, ajuste de contraste por máxima verossimilhança e fidelidade de Bell.

Modelo por fase φ: p_par = (1 + A sin 2φ + B cos 2φ)/2 com (A, B) = C(cos φ₀, sin φ₀),
isto é, paridade C sin(2φ + φ₀). A verossimilhança trinomial separa o termo
binomial par/ímpar (côncavo em A, B) da divisão ↓↓/↑↑ dentro dos pares.
"""

import logging
from dataclasses import dataclass
from typing import Dict, Iterable, Optional, Sequence, Tuple

import numpy as np
from scipy.optimize import brentq, minimize, minimize_scalar
from scipy.special import xlogy

from ..errors import DegenerateDataError, FitError, PhysicsDomainError
from .fitting import PROFILE_DELTA, FitResult
from .readout import classify_counts

logger = logging.getLogger(__name__)

# === RESULTADOS ===
BOTH_DOWN = "both_down"
MIXED = "mixed_up_down"
BOTH_UP = "both_up"
OUTCOMES = (BOTH_DOWN, MIXED, BOTH_UP)

# disparos de um íon (termometria)
DOWN = "down"
UP = "up"
SINGLE_ION_OUTCOMES = (DOWN, UP)

# número de íons brilhantes (↓ = S, fluorescente) → resultado
BRIGHT_TO_OUTCOME = {0: BOTH_UP, 1: MIXED, 2: BOTH_DOWN}

NORMALIZATION_TOLERANCE = 1e-6
BOUNDARY_CHECK = 0.999
FEASIBILITY_TOLERANCE = 1e-12
# piso de probabilidade da verossimilhança estendida
LOG_FLOOR = 1e-6


@dataclass(frozen=True)
class ShotRecord:
    """Um disparo: resultado classificado e/ou contagem de fótons"""
    shot_index: int
    analysis_phase: float = 0.0
    outcome: Optional[str] = None
    counts: Optional[int] = None

    def __post_init__(self):
        if self.outcome is None and self.counts is None:
            raise PhysicsDomainError("a shot record needs an outcome or photon counts")
        if self.outcome is not None and self.outcome not in OUTCOMES + SINGLE_ION_OUTCOMES:
            raise PhysicsDomainError(f"unknown outcome {self.outcome!r}")
        if self.counts is not None and self.counts < 0:
            raise PhysicsDomainError(f"photon counts must be >= 0, got {self.counts}")

    def resolve(self, thresholds: Optional[Tuple[int, int]] = None) -> str:
        """Resultado, classificando as contagens se necessário"""
        if self.outcome is not None:
            return self.outcome
        if thresholds is None:
            raise PhysicsDomainError("thresholds required to classify raw counts")
        return BRIGHT_TO_OUTCOME[int(classify_counts(self.counts, thresholds))]

    def to_dict(self) -> dict:
        return {
            "shot_index": self.shot_index,
            "sweep_value": self.analysis_phase,
            "outcome": self.outcome,
            "counts": self.counts,
        }


def group_shots(
    shots: Iterable[ShotRecord], thresholds: Optional[Tuple[int, int]] = None
) -> Tuple[np.ndarray, np.ndarray]:
    """Agrupa por fase: (fases, contagens [n↓↓, n_mixed, n↑↑])"""
    table: Dict[float, np.ndarray] = {}
    for shot in shots:
        outcome = shot.resolve(thresholds)
        if outcome in SINGLE_ION_OUTCOMES:
            raise FitError(f"shot {shot.shot_index} is a single-ion record; parity needs two-ion outcomes")
        row = table.setdefault(float(shot.analysis_phase), np.zeros(3))
        row[OUTCOMES.index(outcome)] += 1
    phases = np.array(sorted(table))
    return phases, np.array([table[p] for p in phases]).reshape(-1, 3)


def group_single_ion(shots: Iterable[ShotRecord]) -> Tuple[np.ndarray, np.ndarray]:
    """Agrupa disparos de um íon: (valores, contagens [n↓, n↑])"""
    table: Dict[float, np.ndarray] = {}
    for shot in shots:
        if shot.outcome not in SINGLE_ION_OUTCOMES:
            raise FitError(f"shot {shot.shot_index} is not a single-ion record")
        row = table.setdefault(float(shot.analysis_phase), np.zeros(2))
        row[SINGLE_ION_OUTCOMES.index(shot.outcome)] += 1
    values = np.array(sorted(table))
    return values, np.array([table[v] for v in values]).reshape(-1, 2)


# ============== Paridade e fidelidade ==============

def parity(populations: Dict[str, float]) -> float:
    """
    𝒫 = P↑↑ + P↓↓ − P↑↓ − P↓↑.

    Aceita as chaves uu/dd/ud/du; "mixed" substitui ud + du.
    """
    uu = populations.get("uu", 0.0)
    dd = populations.get("dd", 0.0)
    odd = populations["mixed"] if "mixed" in populations else populations.get("ud", 0.0) + populations.get("du", 0.0)
    total = uu + dd + odd
    if abs(total - 1.0) > NORMALIZATION_TOLERANCE:
        raise PhysicsDomainError(f"populations sum to {total}, not 1")
    return float(np.clip(uu + dd - odd, -1.0, 1.0))


def bell_fidelity(even_population: float, contrast: float) -> float:
    """F = (P↑↑ + P↓↓ + C)/2"""
    for name, value in (("even_population", even_population), ("contrast", contrast)):
        if not 0.0 <= value <= 1.0:
            raise PhysicsDomainError(f"{name} must lie in [0, 1], got {value}")
    return 0.5 * (even_population + contrast)


# ============== Verossimilhança ==============

def _design(phases: np.ndarray) -> np.ndarray:
    return np.column_stack([np.sin(2 * phases), np.cos(2 * phases)])


def _even_log_likelihood(ab, X, even, odd) -> float:
    x = X @ ab
    if np.any(np.abs(x) > 1 + FEASIBILITY_TOLERANCE):
        return -np.inf
    x = np.clip(x, -1.0, 1.0)
    p_even, p_odd = 0.5 * (1 + x), 0.5 * (1 - x)
    with np.errstate(divide="ignore"):
        return float(np.sum(xlogy(even, p_even) + xlogy(odd, p_odd)))


def _extended_log_terms(n, p):
    """
    n log p e suas duas derivadas em p; abaixo de LOG_FLOOR vale a expansão
    de segunda ordem em torno do piso (finita e côncava em toda a reta).
    """
    safe = np.maximum(p, LOG_FLOOR)
    d = p - safe
    value = xlogy(n, safe) + n * (d / safe - d ** 2 / (2 * safe ** 2))
    first = n / safe - n * d / safe ** 2
    second = -n / safe ** 2
    return value, first, second


def _split_log_likelihood(counts: np.ndarray) -> Tuple[float, float]:
    """Divisão ↓↓/↑↑ dentro dos eventos pares: (fração ↓↓, log L)"""
    n_dd, n_uu = counts[:, 0].sum(), counts[:, 2].sum()
    if n_dd + n_uu == 0:
        return 0.5, 0.0
    q = n_dd / (n_dd + n_uu)
    return float(q), float(xlogy(n_dd, q) + xlogy(n_uu, 1 - q))


def _maximize_ab(X, even, odd) -> np.ndarray:
    """
    Máximo em (A, B) no disco C ≤ 1.

    Região de confiança com hessiana exata sobre a verossimilhança estendida;
    se o ótimo cair fora do disco ou abaixo do piso de probabilidade, busca polar.
    """

    def terms(ab):
        x = X @ ab
        f_even = _extended_log_terms(even, 0.5 * (1 + x))
        f_odd = _extended_log_terms(odd, 0.5 * (1 - x))
        return f_even, f_odd

    def nll(ab):
        f_even, f_odd = terms(ab)
        return -float(np.sum(f_even[0] + f_odd[0]))

    def grad(ab):
        f_even, f_odd = terms(ab)
        return -X.T @ (0.5 * (f_even[1] - f_odd[1]))

    def hess(ab):
        f_even, f_odd = terms(ab)
        w = -0.25 * (f_even[2] + f_odd[2])
        return (X * w[:, None]).T @ X

    result = minimize(nll, np.zeros(2), jac=grad, hess=hess, method="trust-exact", options={"gtol": 1e-13})
    ab = result.x
    if np.all(np.isfinite(ab)) and np.hypot(*ab) <= 1.0:
        x = X @ ab
        floor_ok = ((even == 0) | (0.5 * (1 + x) >= LOG_FLOOR)) & ((odd == 0) | (0.5 * (1 - x) >= LOG_FLOOR))
        if np.all(floor_ok):
            return ab
    logger.debug("parity optimum at the feasibility boundary; switching to polar search")
    return _polar_maximum(X, even, odd)


def _polar_maximum(X, even, odd) -> np.ndarray:
    """max_φ₀ max_C log L com C em [0, 1]"""
    grid = np.linspace(-np.pi, np.pi, 72, endpoint=False)
    values = [_best_contrast_at(p, X, even, odd)[1] for p in grid]
    start = grid[int(np.argmax(values))]
    step = 2 * np.pi / 72
    result = minimize_scalar(
        lambda p: -_best_contrast_at(p, X, even, odd)[1],
        bounds=(start - step, start + step), method="bounded", options={"xatol": 1e-12},
    )
    contrast, _ = _best_contrast_at(result.x, X, even, odd)
    return contrast * np.array([np.cos(result.x), np.sin(result.x)])


def _best_phase_at(contrast, X, even, odd, center: float) -> Tuple[float, float]:
    """max_φ₀ log L para C fixo, buscando em [center − π, center + π]"""
    if contrast == 0:
        return center, _even_log_likelihood(np.zeros(2), X, even, odd)

    def negative(phi0):
        ab = contrast * np.array([np.cos(phi0), np.sin(phi0)])
        value = _even_log_likelihood(ab, X, even, odd)
        return -value if np.isfinite(value) else 1e300

    grid = center + np.linspace(-np.pi, np.pi, 73)
    start = grid[int(np.argmin([negative(p) for p in grid]))]
    step = 2 * np.pi / 72
    result = minimize_scalar(negative, bounds=(start - step, start + step), method="bounded", options={"xatol": 1e-12})
    return float(result.x), -float(result.fun)


def _best_contrast_at(phi0, X, even, odd) -> Tuple[float, float]:
    """(C, max_C log L) na direção φ₀, incluindo a fronteira C = 1"""
    direction = np.array([np.cos(phi0), np.sin(phi0)])

    def negative(c):
        value = _even_log_likelihood(c * direction, X, even, odd)
        return -value if np.isfinite(value) else 1e300

    result = minimize_scalar(negative, bounds=(0.0, 1.0), method="bounded", options={"xatol": 1e-12})
    contrast, value = float(result.x), -float(result.fun)
    for edge in (0.0, 1.0):
        edge_value = -negative(edge)
        if edge_value >= value:
            contrast, value = edge, edge_value
    return contrast, value


def _wrap(angle: float) -> float:
    return float((angle + np.pi) % (2 * np.pi) - np.pi)


def _validate_counts(phases, counts) -> Tuple[np.ndarray, np.ndarray]:
    phases = np.asarray(phases, dtype=float)
    counts = np.asarray(counts, dtype=float).reshape(-1, 3)
    if phases.size != counts.shape[0]:
        raise FitError("one count row per analysis phase is required")
    if np.any(counts < 0):
        raise FitError("outcome counts must be non-negative")
    keep = counts.sum(axis=1) > 0
    phases, counts = phases[keep], counts[keep]
    if np.unique(np.round(np.mod(phases, np.pi), 12)).size < 2:
        raise DegenerateDataError("contrast fit needs at least two distinct analysis phases")
    return phases, counts


def _point_estimate(phases, counts) -> Tuple[float, float, float]:
    """(C, φ₀, log L par/ímpar) com C restrito a [0, 1]"""
    X = _design(phases)
    even, odd = counts[:, 0] + counts[:, 2], counts[:, 1]
    ab = _maximize_ab(X, even, odd)
    contrast = float(np.hypot(*ab))
    phi0 = float(np.arctan2(ab[1], ab[0])) if contrast > 1e-12 else 0.0
    log_l = _even_log_likelihood(ab, X, even, odd)
    if contrast > BOUNDARY_CHECK:
        # máximo na fronteira C = 1 quando algum p_ímpar → 0
        boundary_phase, boundary_log_l = _best_phase_at(1.0, X, even, odd, phi0)
        if contrast > 1.0 or boundary_log_l >= log_l:
            contrast, phi0, log_l = 1.0, boundary_phase, boundary_log_l
    if contrast <= 1e-12:
        contrast = 0.0
    return contrast, _wrap(phi0), log_l


def fit_parity_contrast(
    shots: Optional[Sequence[ShotRecord]] = None,
    phases=None,
    counts=None,
    thresholds: Optional[Tuple[int, int]] = None,
) -> FitResult:
    """
    Ajuste de máxima verossimilhança de 𝒫(φ) = C sin(2φ + φ₀).

    Args:
        shots: registros de disparo (agrupados por fase)
        phases, counts: alternativa já agrupada; counts por fase [n↓↓, n_mixed, n↑↑],
            frequências exatas também servem
        thresholds: limiares para registros só com contagens de fótons

    Returns:
        FitResult com contrast, phase_offset, even_split e intervalos de perfil
    """
    if shots is not None:
        phases, counts = group_shots(shots, thresholds)
    phases, counts = _validate_counts(phases, counts)

    X = _design(phases)
    even, odd = counts[:, 0] + counts[:, 2], counts[:, 1]
    contrast, phi0, log_l = _point_estimate(phases, counts)
    split, split_log_l = _split_log_likelihood(counts)

    threshold = log_l - PROFILE_DELTA

    def contrast_excess(c):
        return _best_phase_at(c, X, even, odd, phi0)[1] - threshold

    lo = 0.0 if contrast == 0 or contrast_excess(0.0) >= 0 else brentq(contrast_excess, 0.0, contrast, xtol=1e-12)
    hi = 1.0 if contrast == 1 or contrast_excess(1.0) >= 0 else brentq(contrast_excess, contrast, 1.0, xtol=1e-12)

    def phase_excess(p):
        return _best_contrast_at(p, X, even, odd)[1] - threshold

    half = np.pi / 2
    if contrast == 0 or phase_excess(phi0 - half) >= 0:
        phase_lo = phi0 - half
    else:
        phase_lo = brentq(phase_excess, phi0 - half, phi0, xtol=1e-12)
    if contrast == 0 or phase_excess(phi0 + half) >= 0:
        phase_hi = phi0 + half
    else:
        phase_hi = brentq(phase_excess, phi0, phi0 + half, xtol=1e-12)

    logger.info("parity contrast %.5f [%.5f, %.5f] over %d phases", contrast, lo, hi, phases.size)
    return FitResult(
        params={"contrast": contrast, "phase_offset": phi0, "even_split": split},
        confidence={"contrast": (lo, hi), "phase_offset": (phase_lo, phase_hi)},
        log_likelihood=float(log_l + split_log_l),
        model="parity_sinusoid",
        extras={"n_phases": float(phases.size), "n_shots": float(counts.sum())},
    )


def empirical_parity(counts) -> np.ndarray:
    """Paridade empírica por linha de contagens [n↓↓, n_mixed, n↑↑]"""
    counts = np.asarray(counts, dtype=float).reshape(-1, 3)
    total = counts.sum(axis=1)
    return (counts[:, 0] + counts[:, 2] - counts[:, 1]) / np.where(total > 0, total, 1)


def bootstrap_contrast(
    phases,
    counts,
    rng: np.random.Generator,
    n_resamples: int = 200,
) -> dict:
    """
    Bootstrap paramétrico do contraste.

    Reamostra contagens trinomiais a partir do ajuste e reajusta só a estimativa pontual.
    """
    phases, counts = _validate_counts(phases, counts)
    contrast, phi0, _ = _point_estimate(phases, counts)
    split, _ = _split_log_likelihood(counts)
    p_even = 0.5 * (1 + contrast * np.sin(2 * phases + phi0))
    probs = np.column_stack([p_even * split, 1 - p_even, p_even * (1 - split)])
    probs = np.clip(probs, 0.0, None)
    probs /= probs.sum(axis=1, keepdims=True)
    totals = counts.sum(axis=1).astype(int)

    samples = np.empty(n_resamples)
    for i in range(n_resamples):
        draw = np.array([rng.multinomial(n, p) for n, p in zip(totals, probs)])
        samples[i] = _point_estimate(phases, draw)[0]
    lo, hi = np.percentile(samples, [15.865, 84.135])
    return {
        "contrast": contrast,
        "bootstrap_mean": float(samples.mean()),
        "bootstrap_std": float(samples.std(ddof=1)) if n_resamples > 1 else 0.0,
        "interval": (float(lo), float(hi)),
        "n_resamples": n_resamples,
    }
