"""
Backward analítico do BGCN para a arquitetura fixa de dois níveis.

O gradiente sai da perda BPR do mini-batch, desce pelas concatenações de
cada nível e percorre as camadas em ordem reversa. As ativações da rede
inteira são recalculadas a cada batch (sem cache entre batches).
"""

import logging
from typing import Dict, Optional, Tuple

import numpy as np

from ..core.loss import bpr_loss, bpr_margin_grad
from ..core.numeric import DEFAULT_SLOPE, leaky_relu_grad, split_columns
from ..errors import TrainingError
from ..graph.overlap import OverlapWeights
from ..graph.tripartite import TripartiteGraph
from ..models.config import AblationSwitches
from .params import ModelParams
from .propagation import (
    BundleLevelLayers,
    DropoutMasks,
    ItemLevelLayers,
    PropagatedEmbeddings,
    forward,
)

logger = logging.getLogger(__name__)


def _check(arr: np.ndarray, where: str) -> None:
    if not np.all(np.isfinite(arr)):
        raise TrainingError(f"Gradiente não finito em {where}")


def _masked(mask: Optional[np.ndarray], x: np.ndarray) -> np.ndarray:
    return x if mask is None else x * mask


def _pair_grads(
    users_star: np.ndarray,
    bundles_star: np.ndarray,
    users: np.ndarray,
    pos: np.ndarray,
    neg: np.ndarray,
    g: np.ndarray,
) -> Tuple[np.ndarray, np.ndarray]:
    """
    Gradientes de Σ g_t·(⟨p*_u, r*_b⟩ − ⟨p*_u, r*_c⟩) nas concatenações.

    Índices repetidos no batch acumulam via np.add.at.
    """
    gcol = g[:, None]
    d_users = np.zeros_like(users_star)
    d_bundles = np.zeros_like(bundles_star)
    np.add.at(d_users, users, gcol * (bundles_star[pos] - bundles_star[neg]))
    np.add.at(d_bundles, pos, gcol * users_star[users])
    np.add.at(d_bundles, neg, -gcol * users_star[users])
    return d_users, d_bundles


def _item_level_backward(
    layers: ItemLevelLayers,
    params: ModelParams,
    d_users_star: np.ndarray,
    d_bundles_star: np.ndarray,
    masks: DropoutMasks,
    slope: float,
    grads: Dict[str, np.ndarray],
) -> None:
    n_layers = params.n_layers
    widths = [params.d] * (n_layers + 1)
    dp = [block.copy() for block in split_columns(d_users_star, widths)]
    dr = split_columns(d_bundles_star, widths)
    # r_b1^(l) = pool @ q^(l), sem transformação
    dq = [np.asarray(layers.pool.T @ block) for block in dr]

    for layer in reversed(range(n_layers)):
        w = params.w1[layer]
        dpre_u = dp[layer + 1] * leaky_relu_grad(layers.user_pre[layer], slope)
        dpre_i = dq[layer + 1] * leaky_relu_grad(layers.item_pre[layer], slope)

        grads[f"W1.{layer + 1}"] = layers.user_inputs[layer].T @ dpre_u + layers.item_inputs[layer].T @ dpre_i
        grads[f"b1.{layer + 1}"] = dpre_u.sum(axis=0) + dpre_i.sum(axis=0)

        dz_u = dpre_u @ w.T
        dz_i = dpre_i @ w.T
        _check(dz_u, f"nível de item, camada {layer + 1} (usuários)")
        _check(dz_i, f"nível de item, camada {layer + 1} (itens)")

        dp[layer] += dz_u
        dq[layer] += dz_i
        dq[layer] += layers.adj_ui.T @ _masked(masks.message_mask("ui", layer), dz_u)
        dp[layer] += layers.adj_iu.T @ _masked(masks.message_mask("iu", layer), dz_i)

    grads["P"] += dp[0]
    grads["Q"] += dq[0]


def _bundle_level_backward(
    layers: BundleLevelLayers,
    params: ModelParams,
    d_users_star: np.ndarray,
    d_bundles_star: np.ndarray,
    masks: DropoutMasks,
    slope: float,
    grads: Dict[str, np.ndarray],
) -> None:
    n_layers = params.n_layers
    widths = [params.d] * (n_layers + 1)
    dp = [block.copy() for block in split_columns(d_users_star, widths)]
    dr = [block.copy() for block in split_columns(d_bundles_star, widths)]

    for layer in reversed(range(n_layers)):
        w = params.w2[layer]
        dpre_u = dp[layer + 1] * leaky_relu_grad(layers.user_pre[layer], slope)
        dpre_b = dr[layer + 1] * leaky_relu_grad(layers.bundle_pre[layer], slope)

        grads[f"W2.{layer + 1}"] = layers.user_inputs[layer].T @ dpre_u + layers.bundle_inputs[layer].T @ dpre_b
        grads[f"b2.{layer + 1}"] = dpre_u.sum(axis=0) + dpre_b.sum(axis=0)

        dz_u = dpre_u @ w.T
        dz_b = dpre_b @ w.T
        _check(dz_u, f"nível de bundle, camada {layer + 1} (usuários)")
        _check(dz_b, f"nível de bundle, camada {layer + 1} (bundles)")

        dp[layer] += dz_u
        dr[layer] += dz_b
        dr[layer] += layers.adj_ub.T @ _masked(masks.message_mask("ub", layer), dz_u)
        dp[layer] += layers.adj_bu.T @ _masked(masks.message_mask("bu", layer), dz_b)
        if layers.adj_bb is not None:
            dr[layer] += layers.adj_bb.T @ _masked(masks.message_mask("bb", layer), dz_b)

    grads["P"] += dp[0]
    grads["R"] += dr[0]


def _zero_grads(params: ModelParams) -> Dict[str, np.ndarray]:
    return {name: np.zeros_like(t) for name, t in params.named_tensors().items()}


def backward(
    graph: TripartiteGraph,
    overlap: Optional[OverlapWeights],
    params: ModelParams,
    switches: AblationSwitches,
    users: np.ndarray,
    pos: np.ndarray,
    neg: np.ndarray,
    reg_lambda: float,
    masks: Optional[DropoutMasks] = None,
    slope: float = DEFAULT_SLOPE,
    embeddings: Optional[PropagatedEmbeddings] = None,
) -> Tuple[float, Dict[str, np.ndarray]]:
    """
    Perda do mini-batch e gradiente exato em relação a todos os tensores.

    Args:
        users, pos, neg: triplas (u, b, c) do batch, alinhadas
        reg_lambda: λ da regularização λ‖Θ‖²
        masks: as mesmas máscaras de dropout do forward pareado
        embeddings: forward já calculado com `masks` (recalculado se None)

    Returns:
        (perda, gradientes por nome de tensor). Só os tensores dos níveis
        ligados existem em `params`, e só eles entram em λ‖Θ‖².
    """
    masks = masks or DropoutMasks()
    users = np.asarray(users, dtype=np.int64)
    pos = np.asarray(pos, dtype=np.int64)
    neg = np.asarray(neg, dtype=np.int64)
    if embeddings is None:
        embeddings = forward(graph, overlap, params, switches, masks, slope)

    tensors = params.named_tensors()
    pos_scores = embeddings.score_pairs(users, pos)
    neg_scores = embeddings.score_pairs(users, neg)
    loss = bpr_loss(pos_scores, neg_scores, tensors, reg_lambda)

    grads = _zero_grads(params)
    g = bpr_margin_grad(pos_scores, neg_scores)

    if embeddings.item_level is not None:
        d_users, d_bundles = _pair_grads(
            embeddings.users_item, embeddings.bundles_item, users, pos, neg, g
        )
        _item_level_backward(embeddings.item_level, params, d_users, d_bundles, masks, slope, grads)

    if embeddings.bundle_level is not None:
        d_users, d_bundles = _pair_grads(
            embeddings.users_bundle, embeddings.bundles_bundle, users, pos, neg, g
        )
        _bundle_level_backward(embeddings.bundle_level, params, d_users, d_bundles, masks, slope, grads)

    if reg_lambda:
        for name, tensor in tensors.items():
            grads[name] += 2.0 * reg_lambda * tensor

    for name, grad in grads.items():
        _check(grad, f"'{name}'")
    return loss, grads


def bgcn_loss(
    graph: TripartiteGraph,
    overlap: Optional[OverlapWeights],
    params: ModelParams,
    switches: AblationSwitches,
    users: np.ndarray,
    pos: np.ndarray,
    neg: np.ndarray,
    reg_lambda: float,
    masks: Optional[DropoutMasks] = None,
    slope: float = DEFAULT_SLOPE,
) -> float:
    """Só a perda (usada pelo oráculo de diferenças finitas)."""
    embeddings = forward(graph, overlap, params, switches, masks, slope)
    pos_scores = embeddings.score_pairs(np.asarray(users), np.asarray(pos))
    neg_scores = embeddings.score_pairs(np.asarray(users), np.asarray(neg))
    return bpr_loss(pos_scores, neg_scores, params.named_tensors(), reg_lambda)
