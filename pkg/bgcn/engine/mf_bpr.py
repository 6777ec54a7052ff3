"""
Baseline MF-BPR: fatoração de matriz usuário-bundle com perda BPR.
"""

from dataclasses import dataclass
from typing import Dict, Tuple

import numpy as np

from ..core.loss import bpr_loss, bpr_margin_grad
from ..errors import CheckpointMismatchError, ShapeError
from .params import glorot_uniform


@dataclass
class MFParams:
    """Fatores d-dimensionais separados para usuários (P) e bundles (R)."""

    users: np.ndarray
    bundles: np.ndarray

    @property
    def d(self) -> int:
        return self.users.shape[1]

    def named_tensors(self) -> Dict[str, np.ndarray]:
        return {"P": self.users, "R": self.bundles}

    @classmethod
    def from_tensors(cls, tensors: Dict[str, np.ndarray]) -> "MFParams":
        try:
            params = cls(users=tensors["P"], bundles=tensors["R"])
        except KeyError as e:
            raise ShapeError(f"Tensor ausente: {e.args[0]}") from e
        if params.users.shape[1] != params.bundles.shape[1]:
            raise ShapeError("P e R precisam da mesma dimensão d")
        return params

    def check_dims(self, n_users: int, n_bundles: int) -> None:
        for name, tensor, rows in (("P", self.users, n_users), ("R", self.bundles, n_bundles)):
            if tensor.shape[0] != rows:
                raise CheckpointMismatchError(name, (rows, self.d), tensor.shape)

    def copy(self) -> "MFParams":
        return MFParams(users=self.users.copy(), bundles=self.bundles.copy())

    def score_pairs(self, users: np.ndarray, bundles: np.ndarray) -> np.ndarray:
        return np.einsum("ij,ij->i", self.users[users], self.bundles[bundles])

    def score_users(self, users: np.ndarray) -> np.ndarray:
        return self.users[np.asarray(users, dtype=np.int64)] @ self.bundles.T


def init_mf_params(n_users: int, n_bundles: int, d: int, seed: int) -> MFParams:
    if min(n_users, n_bundles, d) <= 0:
        raise ValueError("contagens precisam ser > 0")
    rng = np.random.default_rng(seed)
    return MFParams(users=glorot_uniform(n_users, d, rng), bundles=glorot_uniform(n_bundles, d, rng))


def mf_bpr_score(params: MFParams, user: int, bundle: int) -> float:
    """Produto interno simples ⟨P_u, R_b⟩."""
    return float(params.users[user] @ params.bundles[bundle])


def mf_bpr_loss(
    params: MFParams, users: np.ndarray, pos: np.ndarray, neg: np.ndarray, reg_lambda: float
) -> float:
    return bpr_loss(
        params.score_pairs(users, pos), params.score_pairs(users, neg), params.named_tensors(), reg_lambda
    )


def mf_bpr_backward(
    params: MFParams, users: np.ndarray, pos: np.ndarray, neg: np.ndarray, reg_lambda: float
) -> Tuple[float, Dict[str, np.ndarray]]:
    """Perda do batch e gradientes de P e R."""
    users = np.asarray(users, dtype=np.int64)
    pos = np.asarray(pos, dtype=np.int64)
    neg = np.asarray(neg, dtype=np.int64)
    pos_scores = params.score_pairs(users, pos)
    neg_scores = params.score_pairs(users, neg)
    loss = bpr_loss(pos_scores, neg_scores, params.named_tensors(), reg_lambda)

    g = bpr_margin_grad(pos_scores, neg_scores)[:, None]
    d_users = np.zeros_like(params.users)
    d_bundles = np.zeros_like(params.bundles)
    np.add.at(d_users, users, g * (params.bundles[pos] - params.bundles[neg]))
    np.add.at(d_bundles, pos, g * params.users[users])
    np.add.at(d_bundles, neg, -g * params.users[users])

    d_users += 2.0 * reg_lambda * params.users
    d_bundles += 2.0 * reg_lambda * params.bundles
    return loss, {"P": d_users, "R": d_bundles}
