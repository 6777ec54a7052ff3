"""
Adam com correção de viés, aplicado no lugar sobre arrays numpy.
"""

import logging
from dataclasses import dataclass, field
from typing import Dict, Mapping

import numpy as np

from ..errors import ShapeError, TrainingError

logger = logging.getLogger(__name__)


@dataclass
class AdamState:
    """Momentos de primeira e segunda ordem de um parâmetro."""

    m: np.ndarray
    v: np.ndarray
    step: int = 0
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8
    lr: float = 1e-3

    @classmethod
    def zeros_like(cls, params: np.ndarray, **kwargs) -> "AdamState":
        return cls(m=np.zeros_like(params, dtype=np.float64), v=np.zeros_like(params, dtype=np.float64), **kwargs)


def adam_step(params: np.ndarray, grads: np.ndarray, state: AdamState, name: str = "param") -> np.ndarray:
    """
    Um passo de Adam no lugar.

    Args:
        params: parâmetros (alterados no lugar)
        grads: gradiente com o mesmo shape
        state: momentos e contador (alterados no lugar)
        name: nome do tensor, usado nas mensagens de erro

    Returns:
        O próprio `params`, já atualizado.
    """
    if params.shape != grads.shape or state.m.shape != params.shape:
        raise ShapeError(f"adam_step '{name}': {params.shape} vs {grads.shape} vs {state.m.shape}")
    if not np.all(np.isfinite(grads)):
        raise TrainingError(f"Gradiente não finito em '{name}'")

    state.step += 1
    state.m *= state.beta1
    state.m += (1.0 - state.beta1) * grads
    state.v *= state.beta2
    state.v += (1.0 - state.beta2) * grads * grads

    m_hat = state.m / (1.0 - state.beta1 ** state.step)
    v_hat = state.v / (1.0 - state.beta2 ** state.step)
    params -= state.lr * m_hat / (np.sqrt(v_hat) + state.eps)
    return params


@dataclass
class Adam:
    """Otimizador sobre um dicionário nome -> tensor."""

    params: Dict[str, np.ndarray]
    lr: float = 1e-3
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8
    state: Dict[str, AdamState] = field(default_factory=dict)

    def __post_init__(self):
        if self.lr <= 0:
            raise ValueError(f"Taxa de aprendizado inválida: {self.lr}")
        if not (0.0 <= self.beta1 < 1.0 and 0.0 <= self.beta2 < 1.0):
            raise ValueError(f"betas inválidos: {(self.beta1, self.beta2)}")

    def step(self, grads: Mapping[str, np.ndarray]) -> None:
        """Atualiza todos os tensores com gradiente, em ordem de nome fixa."""
        for name, tensor in self.params.items():
            grad = grads.get(name)
            if grad is None:
                continue
            state = self.state.get(name)
            if state is None:
                state = AdamState.zeros_like(
                    tensor, beta1=self.beta1, beta2=self.beta2, eps=self.eps, lr=self.lr
                )
                self.state[name] = state
            adam_step(tensor, grad, state, name=name)
