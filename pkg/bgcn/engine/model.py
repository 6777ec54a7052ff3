"""
Adaptadores de modelo usados pelo treino, pela avaliação e pelo checkpoint.

Os dois modelos (BGCN e MF-BPR) expõem a mesma superfície: tensores
nomeados vivos (o Adam os altera no lugar), perda + gradientes de um batch
e um `scorer` congelado para ranking.
"""

import logging
from typing import Dict, Optional, Protocol, Tuple, Union

import numpy as np

from ..graph.overlap import OverlapWeights
from ..graph.tripartite import TripartiteGraph
from ..models.config import AblationSwitches, ModelKind, TrainConfig
from .backward import backward
from .mf_bpr import MFParams, init_mf_params, mf_bpr_backward
from .params import ModelParams, init_params
from .propagation import DropoutMasks, forward

logger = logging.getLogger(__name__)


class Scorer(Protocol):
    """Qualquer coisa que pontue usuários contra todos os bundles."""

    def score_users(self, users: np.ndarray) -> np.ndarray: ...

    def score_pairs(self, users: np.ndarray, bundles: np.ndarray) -> np.ndarray: ...


class BGCNModel:
    """BGCN com dropout de nó por época e de mensagem por batch."""

    kind = ModelKind.BGCN

    def __init__(
        self,
        graph: TripartiteGraph,
        overlap: Optional[OverlapWeights],
        params: ModelParams,
        switches: AblationSwitches,
        message_dropout: float = 0.0,
        node_dropout: float = 0.0,
        slope: float = 0.01,
    ):
        self.graph = graph
        self.overlap = overlap
        self.params = params
        self.switches = switches
        self.message_dropout = message_dropout
        self.node_dropout = node_dropout
        self.slope = slope
        self._node_masks: Dict[str, np.ndarray] = {}

    def tensors(self) -> Dict[str, np.ndarray]:
        return self.params.named_tensors()

    def load_tensors(self, tensors: Dict[str, np.ndarray]) -> None:
        self.params = ModelParams.from_tensors({k: np.array(v, dtype=np.float64) for k, v in tensors.items()})

    def start_epoch(self, rng: np.random.Generator) -> None:
        """Sorteia as escalas de dropout de nó que valem a época inteira."""
        self._node_masks = DropoutMasks.sample_nodes(self.graph, self.switches, self.node_dropout, rng)

    def loss_and_grads(
        self, users: np.ndarray, pos: np.ndarray, neg: np.ndarray, reg_lambda: float, rng: np.random.Generator
    ) -> Tuple[float, Dict[str, np.ndarray]]:
        masks = DropoutMasks.sample(
            self.graph,
            self.switches,
            self.params.n_layers,
            self.params.d,
            self.message_dropout,
            rng,
            node=self._node_masks,
        )
        return backward(
            self.graph, self.overlap, self.params, self.switches,
            users, pos, neg, reg_lambda, masks=masks, slope=self.slope,
        )

    def scorer(self) -> Scorer:
        """Forward sem dropout sobre os parâmetros atuais."""
        return forward(self.graph, self.overlap, self.params, self.switches, slope=self.slope)


class MFBPRModel:
    """MF-BPR com a mesma superfície do BGCN; não usa o grafo."""

    kind = ModelKind.MFBPR

    def __init__(self, params: MFParams):
        self.params = params

    def tensors(self) -> Dict[str, np.ndarray]:
        return self.params.named_tensors()

    def load_tensors(self, tensors: Dict[str, np.ndarray]) -> None:
        self.params = MFParams.from_tensors({k: np.array(v, dtype=np.float64) for k, v in tensors.items()})

    def start_epoch(self, rng: np.random.Generator) -> None:
        pass

    def loss_and_grads(
        self, users: np.ndarray, pos: np.ndarray, neg: np.ndarray, reg_lambda: float, rng: np.random.Generator
    ) -> Tuple[float, Dict[str, np.ndarray]]:
        return mf_bpr_backward(self.params, users, pos, neg, reg_lambda)

    def scorer(self) -> Scorer:
        return self.params


RankingModel = Union[BGCNModel, MFBPRModel]


def build_model(
    config: TrainConfig,
    graph: TripartiteGraph,
    overlap: Optional[OverlapWeights] = None,
    tensors: Optional[Dict[str, np.ndarray]] = None,
) -> RankingModel:
    """
    Instancia o modelo da config, com parâmetros iniciais pela seed ou
    carregados de `tensors` (checkpoint).
    """
    if config.model == ModelKind.MFBPR:
        if tensors is not None:
            params = MFParams.from_tensors(tensors)
            params.check_dims(graph.n_users, graph.n_bundles)
        else:
            params = init_mf_params(graph.n_users, graph.n_bundles, config.embedding_size, config.seed)
        return MFBPRModel(params)

    if tensors is not None:
        params = ModelParams.from_tensors(tensors)
        params.check_dims(graph.n_users, graph.n_bundles, graph.n_items)
        params.check_switches(config.switches)
    else:
        params = init_params(
            graph.n_users, graph.n_bundles, graph.n_items,
            config.embedding_size, config.n_layers, config.seed, config.switches,
        )
    return BGCNModel(
        graph,
        overlap,
        params,
        config.switches,
        message_dropout=config.message_dropout,
        node_dropout=config.node_dropout,
        slope=config.leaky_slope,
    )
