#!/usr/bin/env python3
"""
Volterra LDP - Hierarquia de Exceções

Todas as exceções do motor numérico derivam de VolterraLdpError e carregam
o código de saída que a CLI devolve ao sistema operacional:

    2 - erro de configuração/validação
    3 - falha numérica (quadratura, fatoração, estimação, domínio)
    4 - recusa do gate de auto-similaridade
"""

from typing import Optional


class VolterraLdpError(Exception):
    """Erro base do pacote."""

    exit_code: int = 1
    kind: str = "error"

    def __init__(self, message: str):
        super().__init__(message)
        self.message = message

    def as_dict(self) -> dict:
        """Representação de uma linha, usada pela CLI no stderr."""
        return {"error": self.kind, "exit_code": self.exit_code, "message": self.message}


class ConfigError(VolterraLdpError):
    """Configuração inválida (arquivo, flags ou parâmetros de modelo)."""

    exit_code = 2
    kind = "config"


class NumericalError(VolterraLdpError):
    """Falha numérica genérica."""

    exit_code = 3
    kind = "numerical"


class DomainError(NumericalError):
    """Argumento fora do domínio da operação (ex.: tempo fora de [0, T])."""

    kind = "domain"


class QuadratureError(NumericalError):
    """A quadratura adaptativa não atingiu a tolerância pedida."""

    kind = "quadrature"

    def __init__(self, message: str, error_estimate: float):
        super().__init__(f"{message} (erro estimado={error_estimate:.3e})")
        self.error_estimate = error_estimate


class FactorizationError(NumericalError):
    """Cholesky falhou mesmo após o jitter máximo."""

    kind = "factorization"

    def __init__(self, message: str, min_eigenvalue: float):
        super().__init__(f"{message} (menor autovalor={min_eigenvalue:.3e})")
        self.min_eigenvalue = min_eigenvalue


class EstimationError(NumericalError):
    """Dados insuficientes para a regressão de inclinação."""

    kind = "estimation"


class RangeError(NumericalError):
    """Parâmetro fora da faixa em que o resultado vale (ex.: limiar do lema de momentos)."""

    kind = "range"


class DegenerateLimitError(NumericalError):
    """Limite indefinido, como a vol implícita quando I(y) = 0."""

    kind = "degenerate"


class GateRefusal(VolterraLdpError):
    """O kernel não passou no teste de auto-similaridade exigido pelo regime de tempo curto."""

    exit_code = 4
    kind = "gate"

    def __init__(self, message: str, defect: Optional[float] = None):
        if defect is not None:
            message = f"{message} (defeito={defect:.3e})"
        super().__init__(message)
        self.defect = defect
