"""
Errors
Hierarquia de exceções do IonGate.
"""


class IonGateError(Exception):
    """Erro base do pacote"""


class PhysicsDomainError(IonGateError, ValueError):
    """Parâmetro físico fora do domínio válido"""


class TruncationOverflowError(IonGateError):
    """Espaço de Fock truncado pequeno demais para a dinâmica pedida"""


class TruncationWarning(UserWarning):
    """Massa de cauda descartada pela truncagem acima da tolerância"""


class ScenarioError(IonGateError):
    """Arquivo de cenário inválido ou inconsistente"""


class FitError(IonGateError):
    """Falha em um ajuste de dados"""


class DegenerateDataError(FitError):
    """Dados insuficientes para o modelo (ex: uma única fase)"""


class NonIdentifiableError(FitError):
    """Parâmetro não identificável com o intervalo de dados disponível"""
