"""
Hierarquia de exceções do BGCN.

Cada exceção carrega o código de saída que a CLI devolve quando ela escapa
até o handler global (0 sucesso, 1 falha de execução, 2 uso/validação).
"""

from typing import Any, Dict, Optional


class BGCNError(Exception):
    """Erro base de todo o pacote."""

    exit_code = 1


class ConfigError(BGCNError):
    """Configuração inválida (arquivo key=value, flags ou chaves desconhecidas)."""

    exit_code = 2


class ShapeError(BGCNError, ValueError):
    """Dimensões incompatíveis entre matrizes."""


class NumericError(BGCNError, ValueError):
    """Valor NaN/Inf encontrado no modo verificado."""


class GraphIndexError(BGCNError, IndexError):
    """Id de nó fora do intervalo do grafo."""

    exit_code = 2


class LoadError(BGCNError):
    """Falha ao carregar o dataset (arquivo ausente, linha malformada, id inválido)."""


class CheckpointError(BGCNError):
    """Checkpoint corrompido, truncado ou de versão desconhecida."""


class CheckpointMismatchError(CheckpointError):
    """Dimensões do checkpoint não batem com o dataset carregado."""

    exit_code = 2

    def __init__(self, tensor: str, expected: Any, found: Any):
        self.tensor = tensor
        super().__init__(
            f"Tensor '{tensor}' com shape {tuple(found)} incompatível com o dataset "
            f"(esperado {tuple(expected)})"
        )


class TrainingError(BGCNError):
    """Falha durante o treino (gradiente não finito, split sem positivos...)."""


class TrainingDivergedError(TrainingError):
    """Perda não finita; carrega os últimos parâmetros válidos."""

    def __init__(
        self,
        message: str,
        last_good: Optional[Dict[str, Any]] = None,
        log: Optional[list] = None,
    ):
        super().__init__(message)
        self.last_good = last_good
        self.log = log or []
