"""
Physical Constants
Fonte única das constantes físicas (CODATA via scipy.constants).
"""

from scipy import constants as _codata

HBAR = _codata.hbar
ELEMENTARY_CHARGE = _codata.e
EPSILON_0 = _codata.epsilon_0
ATOMIC_MASS = _codata.atomic_mass
ELECTRON_MASS = _codata.m_e
SPEED_OF_LIGHT = _codata.c

# Massa atômica do 40Ca (AME2016), em u
CALCIUM_40_ATOMIC_MASS_U = 39.962590863

TWO_PI = 2.0 * _codata.pi


def hz(value: float) -> float:
    """Converte frequência em Hz para rad/s"""
    return TWO_PI * value


def khz(value: float) -> float:
    return TWO_PI * value * 1e3


def mhz(value: float) -> float:
    return TWO_PI * value * 1e6


def to_hz(angular: float) -> float:
    """Converte rad/s para Hz"""
    return angular / TWO_PI
