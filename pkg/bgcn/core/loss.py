"""
Objetivo BPR par a par com regularização L2 sobre todos os parâmetros.
"""

from typing import Iterable, Mapping, Union

import numpy as np
from scipy.special import expit

from ..errors import ShapeError

Tensors = Union[Mapping[str, np.ndarray], Iterable[np.ndarray]]


def squared_norm(tensors: Tensors) -> float:
    """‖Θ‖²: soma dos quadrados de todas as entradas."""
    values = tensors.values() if isinstance(tensors, Mapping) else tensors
    return float(sum(np.sum(np.square(t)) for t in values))


def bpr_loss(pos: np.ndarray, neg: np.ndarray, tensors: Tensors, reg_lambda: float) -> float:
    """
    Σ −ln σ(pos − neg) + λ‖Θ‖².

    −ln σ(x) = softplus(−x) = logaddexp(0, −x), estável para |x| grande.
    """
    pos = np.asarray(pos, dtype=np.float64)
    neg = np.asarray(neg, dtype=np.float64)
    if pos.shape != neg.shape:
        raise ShapeError(f"bpr_loss: pos {pos.shape} vs neg {neg.shape}")
    data = float(np.sum(np.logaddexp(0.0, -(pos - neg))))
    if reg_lambda == 0:
        return data
    return data + reg_lambda * squared_norm(tensors)


def bpr_margin_grad(pos: np.ndarray, neg: np.ndarray) -> np.ndarray:
    """∂/∂x de −ln σ(x) em x = pos − neg, ou seja −σ(−x)."""
    return -expit(-(np.asarray(pos, dtype=np.float64) - np.asarray(neg, dtype=np.float64)))
