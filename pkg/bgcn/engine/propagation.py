"""
Propagação em dois níveis do BGCN e predição.

Nível de item: usuários e itens trocam mensagens pela relação usuário-item;
bundles são o pooling (média) dos seus itens, sem transformação.
Nível de bundle: usuários e bundles trocam mensagens pela relação
usuário-bundle, e bundles recebem a soma ponderada por β dos vizinhos no
meta-caminho bundle-item-bundle.

Cada nível guarda as entradas e pré-ativações de todas as camadas, que o
backward reaproveita.
"""

import logging
from dataclasses import dataclass, field
from functools import cached_property
from typing import Dict, List, Optional, Tuple

import numpy as np

from ..core.numeric import (
    DEFAULT_SLOPE,
    SparseMatrix,
    concat_rows,
    leaky_relu,
    make_dropout_mask,
    scale_rows,
    spmm,
)
from ..graph.overlap import OverlapWeights
from ..graph.tripartite import TripartiteGraph
from ..models.config import AblationSwitches, B2BMode
from .params import ModelParams

logger = logging.getLogger(__name__)

ITEM_LEVEL_ADJ = ("ui", "iu")
BUNDLE_LEVEL_ADJ = ("ub", "bu", "bb")


def _adjacency_rows(graph: TripartiteGraph, name: str) -> int:
    return {
        "ui": graph.n_users,
        "iu": graph.n_items,
        "ub": graph.n_users,
        "bu": graph.n_bundles,
        "bb": graph.n_bundles,
    }[name]


@dataclass
class DropoutMasks:
    """
    Máscaras fixas de uma passada forward/backward.

    node: nome da adjacência -> escala por linha (dropout de nó, por época)
    message: (adjacência, camada) -> máscara n x d sobre o agregado
    """

    node: Dict[str, np.ndarray] = field(default_factory=dict)
    message: Dict[Tuple[str, int], np.ndarray] = field(default_factory=dict)

    def adjacency(self, name: str, base: SparseMatrix) -> SparseMatrix:
        scale = self.node.get(name)
        return base if scale is None else scale_rows(base, scale)

    def message_mask(self, name: str, layer: int) -> Optional[np.ndarray]:
        return self.message.get((name, layer))

    @staticmethod
    def sample_nodes(
        graph: TripartiteGraph,
        switches: AblationSwitches,
        rate: float,
        rng: np.random.Generator,
    ) -> Dict[str, np.ndarray]:
        """Zera linhas inteiras das adjacências (com escala invertida)."""
        if rate <= 0:
            return {}
        names = _active_adjacencies(switches)
        return {
            name: make_dropout_mask(_adjacency_rows(graph, name), 1, rate, rng).ravel()
            for name in names
        }

    @classmethod
    def sample(
        cls,
        graph: TripartiteGraph,
        switches: AblationSwitches,
        n_layers: int,
        d: int,
        message_rate: float,
        rng: np.random.Generator,
        node: Optional[Dict[str, np.ndarray]] = None,
    ) -> "DropoutMasks":
        message = {}
        if message_rate > 0:
            for name in _active_adjacencies(switches):
                rows = _adjacency_rows(graph, name)
                for layer in range(n_layers):
                    message[(name, layer)] = make_dropout_mask(rows, d, message_rate, rng)
        return cls(node=dict(node or {}), message=message)


def _active_adjacencies(switches: AblationSwitches) -> List[str]:
    names: List[str] = []
    if switches.item_level:
        names.extend(ITEM_LEVEL_ADJ)
    if switches.bundle_level:
        names.extend(BUNDLE_LEVEL_ADJ[:2])
        if switches.b2b_mode != B2BMode.NONE:
            names.append("bb")
    return names


def _aggregate(adj: SparseMatrix, x: np.ndarray, mask: Optional[np.ndarray]) -> np.ndarray:
    out = spmm(adj, x)
    if mask is not None:
        out = out * mask
    return out


@dataclass
class ItemLevelLayers:
    """Camadas 0..L do nível de item e intermediários das camadas 1..L."""

    users: List[np.ndarray]
    items: List[np.ndarray]
    bundles: List[np.ndarray]
    user_inputs: List[np.ndarray]
    item_inputs: List[np.ndarray]
    user_pre: List[np.ndarray]
    item_pre: List[np.ndarray]
    adj_ui: SparseMatrix
    adj_iu: SparseMatrix
    pool: SparseMatrix


@dataclass
class BundleLevelLayers:
    """Camadas 0..L do nível de bundle e intermediários das camadas 1..L."""

    users: List[np.ndarray]
    bundles: List[np.ndarray]
    user_inputs: List[np.ndarray]
    bundle_inputs: List[np.ndarray]
    user_pre: List[np.ndarray]
    bundle_pre: List[np.ndarray]
    adj_ub: SparseMatrix
    adj_bu: SparseMatrix
    adj_bb: Optional[SparseMatrix]


def item_level_forward(
    graph: TripartiteGraph,
    params: ModelParams,
    masks: Optional[DropoutMasks] = None,
    slope: float = DEFAULT_SLOPE,
) -> ItemLevelLayers:
    """
    Propagação usuário-item com pooling item -> bundle.

    A camada 0 dos bundles é o pooling dos embeddings crus de item, para
    que a concatenação tenha L+1 blocos dos dois lados.
    """
    masks = masks or DropoutMasks()
    adj_ui = masks.adjacency("ui", graph.norm_ui)
    adj_iu = masks.adjacency("iu", graph.norm_iu)
    pool = graph.norm_bi_pool

    users = [params.users]
    items = [params.items]
    bundles = [spmm(pool, params.items)]
    user_inputs, item_inputs, user_pre, item_pre = [], [], [], []

    for layer in range(params.n_layers):
        w, b = params.w1[layer], params.b1[layer]
        z_u = users[layer] + _aggregate(adj_ui, items[layer], masks.message_mask("ui", layer))
        z_i = items[layer] + _aggregate(adj_iu, users[layer], masks.message_mask("iu", layer))
        pre_u = z_u @ w + b
        pre_i = z_i @ w + b

        user_inputs.append(z_u)
        item_inputs.append(z_i)
        user_pre.append(pre_u)
        item_pre.append(pre_i)
        users.append(leaky_relu(pre_u, slope))
        items.append(leaky_relu(pre_i, slope))
        bundles.append(spmm(pool, items[-1]))

    return ItemLevelLayers(
        users=users,
        items=items,
        bundles=bundles,
        user_inputs=user_inputs,
        item_inputs=item_inputs,
        user_pre=user_pre,
        item_pre=item_pre,
        adj_ui=adj_ui,
        adj_iu=adj_iu,
        pool=pool,
    )


def bundle_level_forward(
    graph: TripartiteGraph,
    overlap: Optional[OverlapWeights],
    params: ModelParams,
    switches: AblationSwitches,
    masks: Optional[DropoutMasks] = None,
    slope: float = DEFAULT_SLOPE,
) -> BundleLevelLayers:
    """Propagação usuário-bundle com o termo B2B conforme `switches.b2b_mode`."""
    masks = masks or DropoutMasks()
    adj_ub = masks.adjacency("ub", graph.norm_ub)
    adj_bu = masks.adjacency("bu", graph.norm_bu)
    adj_bb = None
    if switches.b2b_mode != B2BMode.NONE:
        if overlap is None:
            raise ValueError("b2b_mode exige OverlapWeights")
        adj_bb = masks.adjacency("bb", overlap.operator(switches.b2b_mode))

    users = [params.users]
    bundles = [params.bundles]
    user_inputs, bundle_inputs, user_pre, bundle_pre = [], [], [], []

    for layer in range(params.n_layers):
        w, b = params.w2[layer], params.b2[layer]
        z_u = users[layer] + _aggregate(adj_ub, bundles[layer], masks.message_mask("ub", layer))
        z_b = bundles[layer] + _aggregate(adj_bu, users[layer], masks.message_mask("bu", layer))
        if adj_bb is not None:
            # β já normalizado por linha: soma ponderada simples
            z_b = z_b + _aggregate(adj_bb, bundles[layer], masks.message_mask("bb", layer))
        pre_u = z_u @ w + b
        pre_b = z_b @ w + b

        user_inputs.append(z_u)
        bundle_inputs.append(z_b)
        user_pre.append(pre_u)
        bundle_pre.append(pre_b)
        users.append(leaky_relu(pre_u, slope))
        bundles.append(leaky_relu(pre_b, slope))

    return BundleLevelLayers(
        users=users,
        bundles=bundles,
        user_inputs=user_inputs,
        bundle_inputs=bundle_inputs,
        user_pre=user_pre,
        bundle_pre=bundle_pre,
        adj_ub=adj_ub,
        adj_bu=adj_bu,
        adj_bb=adj_bb,
    )


@dataclass
class PropagatedEmbeddings:
    """Camadas dos dois níveis e as concatenações p*, r* usadas na predição."""

    item_level: Optional[ItemLevelLayers]
    bundle_level: Optional[BundleLevelLayers]

    @cached_property
    def users_item(self) -> Optional[np.ndarray]:
        return concat_rows(self.item_level.users) if self.item_level else None

    @cached_property
    def bundles_item(self) -> Optional[np.ndarray]:
        return concat_rows(self.item_level.bundles) if self.item_level else None

    @cached_property
    def users_bundle(self) -> Optional[np.ndarray]:
        return concat_rows(self.bundle_level.users) if self.bundle_level else None

    @cached_property
    def bundles_bundle(self) -> Optional[np.ndarray]:
        return concat_rows(self.bundle_level.bundles) if self.bundle_level else None

    @property
    def n_bundles(self) -> int:
        level = self.bundles_item if self.item_level else self.bundles_bundle
        return level.shape[0]

    def predict(self, user: int, bundle: int) -> float:
        """ŷ_ub = ⟨p*_u1, r*_b1⟩ + ⟨p*_u2, r*_b2⟩ (só os níveis ativos)."""
        score = 0.0
        if self.item_level:
            score += float(self.users_item[user] @ self.bundles_item[bundle])
        if self.bundle_level:
            score += float(self.users_bundle[user] @ self.bundles_bundle[bundle])
        return score

    def score_pairs(self, users: np.ndarray, bundles: np.ndarray) -> np.ndarray:
        """Scores de pares (u, b) alinhados."""
        scores = np.zeros(len(users), dtype=np.float64)
        if self.item_level:
            scores += np.einsum("ij,ij->i", self.users_item[users], self.bundles_item[bundles])
        if self.bundle_level:
            scores += np.einsum("ij,ij->i", self.users_bundle[users], self.bundles_bundle[bundles])
        return scores

    def score_users(self, users: np.ndarray) -> np.ndarray:
        """Scores de cada usuário em `users` contra todos os bundles."""
        users = np.asarray(users, dtype=np.int64)
        scores = np.zeros((len(users), self.n_bundles), dtype=np.float64)
        if self.item_level:
            scores += self.users_item[users] @ self.bundles_item.T
        if self.bundle_level:
            scores += self.users_bundle[users] @ self.bundles_bundle.T
        return scores


def forward(
    graph: TripartiteGraph,
    overlap: Optional[OverlapWeights],
    params: ModelParams,
    switches: AblationSwitches,
    masks: Optional[DropoutMasks] = None,
    slope: float = DEFAULT_SLOPE,
) -> PropagatedEmbeddings:
    """Forward completo nos níveis ligados em `switches`."""
    params.check_switches(switches)
    item_level = item_level_forward(graph, params, masks, slope) if switches.item_level else None
    bundle_level = (
        bundle_level_forward(graph, overlap, params, switches, masks, slope)
        if switches.bundle_level
        else None
    )
    return PropagatedEmbeddings(item_level=item_level, bundle_level=bundle_level)


def predict(embeddings: PropagatedEmbeddings, user: int, bundle: int) -> float:
    return embeddings.predict(user, bundle)
