"""
Thermometry
Termometria por banda lateral azul e taxa de aquecimento.
"""

import logging
from typing import Optional, Sequence, Tuple

import numpy as np
from scipy.optimize import curve_fit

from ..dynamics import BLUE, sideband_flop
from ..errors import DegenerateDataError, FitError, NonIdentifiableError
from ..physcore import fock_cutoff, thermal_distribution
from .fitting import FitResult, weighted_least_squares

logger = logging.getLogger(__name__)

NBAR_UPPER = 5.0
MIN_STDERR = 1e-3
# fração mínima de um período de flop (n = 0) coberta pelos dados
MIN_PERIOD_FRACTION = 0.25
NBAR_STARTS = (0.02, 0.2, 1.0)


def _unpack(flop_data) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    data = np.asarray(flop_data, dtype=float)
    if data.ndim != 2 or data.shape[1] != 3:
        raise FitError("flop data must be rows of (t, P_up, stderr)")
    return data[:, 0], data[:, 1], data[:, 2]


def sideband_model(times, nbar: float, rabi: float, eta: float, n_max: int) -> np.ndarray:
    """P↑(t) da banda azul de um íon com estado térmico n̄"""
    dist = thermal_distribution(nbar, n_max)
    return sideband_flop(rabi, eta, dist, BLUE, times).ion_excitation[:, 0]


def fit_sideband_nbar(
    flop_data,
    rabi: float,
    eta: float,
    fit_rabi: bool = False,
    nbar_upper: float = NBAR_UPPER,
    min_stderr: float = MIN_STDERR,
) -> FitResult:
    """
    Estimativa de n̄ (e opcionalmente Ω) por mínimos quadrados ponderados.

    Args:
        flop_data: linhas (t [s], P↑, erro padrão)
        rabi: Ω da portadora (rad/s), valor inicial se fit_rabi
        eta: Lamb-Dicke do modo sondado
        fit_rabi: ajusta Ω junto com n̄
        nbar_upper: limite superior de n̄
        min_stderr: piso do erro padrão (pontos com P ∈ {0, 1})

    Raises:
        NonIdentifiableError: dados cobrem menos de um quarto de período
    """
    times, p_up, stderr = _unpack(flop_data)
    if times.size < 2:
        raise DegenerateDataError("sideband fit needs at least two time points")
    period = 2 * np.pi / (rabi * abs(eta))
    span = float(np.ptp(times))
    if span < MIN_PERIOD_FRACTION * period:
        raise NonIdentifiableError(
            f"data span {span:.3e} s is below {MIN_PERIOD_FRACTION} of the sideband period {period:.3e} s"
        )

    sigma = np.maximum(stderr, min_stderr)
    n_max = fock_cutoff(nbar_upper)

    if fit_rabi:
        def model(t, nbar, rabi_rate):
            return sideband_model(t, nbar, rabi_rate, eta, n_max)

        starts = [(n, rabi) for n in NBAR_STARTS]
        bounds = ([0.0, 0.5 * rabi], [nbar_upper, 2.0 * rabi])
        names = ("nbar", "rabi")
    else:
        def model(t, nbar):
            return sideband_model(t, nbar, rabi, eta, n_max)

        starts = [(n,) for n in NBAR_STARTS]
        bounds = ([0.0], [nbar_upper])
        names = ("nbar",)

    result = weighted_least_squares(model, times, p_up, sigma, names, starts, bounds, label="blue_sideband")
    logger.info("sideband thermometry: nbar=%.4f %s", result.params["nbar"], result.confidence["nbar"])
    return result


def fit_heating_rate(wait_times, nbars, nbar_errors) -> FitResult:
    """n̄(t) = n̄₀ + ṅ t por mínimos quadrados ponderados (erros absolutos)"""
    wait_times = np.asarray(wait_times, dtype=float)
    nbars = np.asarray(nbars, dtype=float)
    nbar_errors = np.asarray(nbar_errors, dtype=float)
    if np.unique(wait_times).size < 2:
        raise DegenerateDataError("heating-rate fit needs at least two distinct wait times")
    if np.any(nbar_errors <= 0):
        raise FitError("nbar errors must be positive")

    def line(t, rate, nbar0):
        return nbar0 + rate * t

    (rate, nbar0), covariance = curve_fit(
        line, wait_times, nbars, p0=(0.0, float(nbars[0])), sigma=nbar_errors, absolute_sigma=True
    )
    rate_err, nbar0_err = np.sqrt(np.diag(covariance))
    residual = (line(wait_times, rate, nbar0) - nbars) / nbar_errors
    return FitResult(
        params={"heating_rate": float(rate), "nbar0": float(nbar0)},
        confidence={
            "heating_rate": (float(rate - rate_err), float(rate + rate_err)),
            "nbar0": (float(nbar0 - nbar0_err), float(nbar0 + nbar0_err)),
        },
        log_likelihood=float(-0.5 * np.dot(residual, residual)),
        model="linear_heating",
    )
