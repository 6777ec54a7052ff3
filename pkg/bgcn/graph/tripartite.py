"""
Grafo heterogêneo usuário-item-bundle.

As três relações binárias (usuário-bundle X, usuário-item Y, bundle-item Z)
e as adjacências normalizadas por linha usadas como agregador de média.
A codificação one-hot dos nós é só indexação de linha nas tabelas de
embedding; os vetores one-hot nunca são materializados.
"""

import logging
from dataclasses import dataclass
from enum import Enum
from typing import List, Sequence

import numpy as np
import scipy.sparse as sp

from ..core.numeric import SparseMatrix, csr_from_pairs, row_normalize
from ..errors import ConfigError, GraphIndexError, LoadError

logger = logging.getLogger(__name__)


class Relation(str, Enum):
    """Relação consultada por `neighbors`."""
    USER_BUNDLES = "user-bundles"
    USER_ITEMS = "user-items"
    BUNDLE_USERS = "bundle-users"
    BUNDLE_ITEMS = "bundle-items"
    ITEM_USERS = "item-users"
    ITEM_BUNDLES = "item-bundles"


def _as_pairs(pairs, relation: str) -> np.ndarray:
    arr = np.asarray(pairs, dtype=np.int64)
    if arr.size == 0:
        return np.zeros((0, 2), dtype=np.int64)
    if arr.ndim != 2 or arr.shape[1] != 2:
        raise LoadError(f"{relation}: esperado lista de pares, recebido shape {arr.shape}")
    return arr


def _check_range(pairs: np.ndarray, n_rows: int, n_cols: int, relation: str) -> None:
    for col, limit, kind in ((0, n_rows, "linha"), (1, n_cols, "coluna")):
        values = pairs[:, col]
        bad = np.flatnonzero((values < 0) | (values >= limit))
        if bad.size:
            idx = int(bad[0])
            raise LoadError(
                f"{relation}: par #{idx + 1} {tuple(pairs[idx])} com {kind} fora de [0, {limit})"
            )


@dataclass(frozen=True)
class TripartiteGraph:
    """
    Grafo imutável com as relações binárias e suas versões normalizadas.

    Campos normalizados:
        norm_ui: M x O, média dos itens de cada usuário
        norm_iu: O x M, média dos usuários de cada item
        norm_bi_pool: N x O, pooling de itens por bundle
        norm_ub: M x N, média dos bundles de cada usuário
        norm_bu: N x M, média dos usuários de cada bundle
    """

    n_users: int
    n_bundles: int
    n_items: int
    ub: SparseMatrix
    ui: SparseMatrix
    bi: SparseMatrix
    bu: SparseMatrix
    iu: SparseMatrix
    ib: SparseMatrix
    norm_ui: SparseMatrix
    norm_iu: SparseMatrix
    norm_bi_pool: SparseMatrix
    norm_ub: SparseMatrix
    norm_bu: SparseMatrix

    @property
    def bundle_sizes(self) -> np.ndarray:
        return np.diff(self.bi.indptr)

    def user_bundle_degree(self) -> np.ndarray:
        return np.diff(self.ub.indptr)


def build_graph(
    ub_pairs,
    ui_pairs,
    bi_pairs,
    n_users: int,
    n_bundles: int,
    n_items: int,
) -> TripartiteGraph:
    """
    Monta o grafo a partir das listas de pares.

    Pares duplicados viram uma única aresta. Todo bundle precisa de pelo
    menos um item.
    """
    if min(n_users, n_bundles, n_items) <= 0:
        raise LoadError(f"Contagens inválidas: M={n_users} N={n_bundles} O={n_items}")

    ub_arr = _as_pairs(ub_pairs, "user_bundle")
    ui_arr = _as_pairs(ui_pairs, "user_item")
    bi_arr = _as_pairs(bi_pairs, "bundle_item")
    _check_range(ub_arr, n_users, n_bundles, "user_bundle")
    _check_range(ui_arr, n_users, n_items, "user_item")
    _check_range(bi_arr, n_bundles, n_items, "bundle_item")

    ub = csr_from_pairs(ub_arr[:, 0], ub_arr[:, 1], (n_users, n_bundles))
    ui = csr_from_pairs(ui_arr[:, 0], ui_arr[:, 1], (n_users, n_items))
    bi = csr_from_pairs(bi_arr[:, 0], bi_arr[:, 1], (n_bundles, n_items))

    empty = np.flatnonzero(np.diff(bi.indptr) == 0)
    if empty.size:
        raise LoadError(f"bundle_item: bundle {int(empty[0])} sem itens ({empty.size} no total)")

    bu = ub.T.tocsr()
    iu = ui.T.tocsr()
    ib = bi.T.tocsr()
    for mat in (bu, iu, ib):
        mat.sort_indices()

    graph = TripartiteGraph(
        n_users=n_users,
        n_bundles=n_bundles,
        n_items=n_items,
        ub=ub,
        ui=ui,
        bi=bi,
        bu=bu,
        iu=iu,
        ib=ib,
        norm_ui=row_normalize(ui),
        norm_iu=row_normalize(iu),
        norm_bi_pool=row_normalize(bi),
        norm_ub=row_normalize(ub),
        norm_bu=row_normalize(bu),
    )
    logger.debug(
        f"Grafo: M={n_users} N={n_bundles} O={n_items} |ub|={ub.nnz} |ui|={ui.nnz} |bi|={bi.nnz}"
    )
    return graph


def _relation_matrix(graph: TripartiteGraph, relation: Relation) -> sp.csr_matrix:
    return {
        Relation.USER_BUNDLES: graph.ub,
        Relation.USER_ITEMS: graph.ui,
        Relation.BUNDLE_USERS: graph.bu,
        Relation.BUNDLE_ITEMS: graph.bi,
        Relation.ITEM_USERS: graph.iu,
        Relation.ITEM_BUNDLES: graph.ib,
    }[Relation(relation)]


def neighbors(graph: TripartiteGraph, relation: Relation, node_id: int) -> List[int]:
    """Vizinhos ordenados e sem repetição de `node_id` na relação pedida."""
    mat = _relation_matrix(graph, relation)
    if not 0 <= node_id < mat.shape[0]:
        raise GraphIndexError(f"{Relation(relation).value}: id {node_id} fora de [0, {mat.shape[0]})")
    start, end = mat.indptr[node_id], mat.indptr[node_id + 1]
    return [int(c) for c in mat.indices[start:end]]


def sparsity_groups(graph: TripartiteGraph, boundaries: Sequence[int] = (4, 16)) -> List[np.ndarray]:
    """
    Particiona os usuários pelo grau usuário-bundle de treino.

    Com [4, 16]: grupo 0 = 0~3 interações, grupo 1 = 4~15, grupo 2 = 16+.
    """
    bounds = list(boundaries)
    if any(b <= a for a, b in zip(bounds, bounds[1:])):
        raise ConfigError(f"Fronteiras precisam ser estritamente crescentes: {bounds}")
    degree = graph.user_bundle_degree()
    group_of = np.searchsorted(np.asarray(bounds, dtype=np.int64), degree, side="right")
    return [np.flatnonzero(group_of == g) for g in range(len(bounds) + 1)]


def group_labels(boundaries: Sequence[int]) -> List[str]:
    """Rótulos legíveis das faixas, ex: ['0-3', '4-15', '16+']."""
    edges = [0, *boundaries]
    labels = [f"{lo}-{hi - 1}" for lo, hi in zip(edges, edges[1:])]
    labels.append(f"{edges[-1]}+")
    return labels
