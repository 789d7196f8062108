"""
IonGate
Simulador e kit de análise para portas de dois íons aprisionados.
"""

__version__ = "1.0.0"

from .errors import (
    IonGateError,
    PhysicsDomainError,
    TruncationOverflowError,
    TruncationWarning,
    ScenarioError,
    FitError,
    DegenerateDataError,
    NonIdentifiableError,
)

__all__ = [
    "__version__",
    "IonGateError",
    "PhysicsDomainError",
    "TruncationOverflowError",
    "TruncationWarning",
    "ScenarioError",
    "FitError",
    "DegenerateDataError",
    "NonIdentifiableError",
]
