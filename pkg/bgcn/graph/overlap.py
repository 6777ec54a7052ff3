"""
Pesos de sobreposição no meta-caminho bundle-item-bundle.

o(b, b') = |itens(b) ∩ itens(b')| para b != b', calculado como Z·Zᵀ
esparso sem a diagonal; β é a normalização por linha de o.
"""

import logging
from dataclasses import dataclass
from typing import Optional

import numpy as np
import scipy.sparse as sp

from ..core.numeric import SparseMatrix, row_normalize
from ..models.config import B2BMode, OverlapMeasure
from .tripartite import TripartiteGraph

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class OverlapWeights:
    """
    β sobre bundles x bundles.

    `counts` guarda o número bruto de itens compartilhados (usado pelo
    índice de negativos difíceis); `weights` é β normalizado por linha.
    """

    counts: SparseMatrix
    weights: SparseMatrix

    @property
    def n_bundles(self) -> int:
        return self.weights.shape[0]

    def uniform(self) -> SparseMatrix:
        """Mesmo suporte de β com peso 1/|M_b| (B2B sem peso)."""
        pattern = self.weights.copy()
        pattern.data[:] = 1.0
        return row_normalize(pattern)

    def operator(self, mode: B2BMode) -> Optional[SparseMatrix]:
        """Matriz da agregação B2B para o modo pedido (None se desligada)."""
        mode = B2BMode(mode)
        if mode == B2BMode.NONE:
            return None
        if mode == B2BMode.UNWEIGHTED:
            return self.uniform()
        return self.weights


def overlap_counts(bi: SparseMatrix) -> SparseMatrix:
    """Itens compartilhados entre pares de bundles, diagonal removida."""
    co = sp.csr_matrix(bi @ bi.T, dtype=np.float64)
    co.setdiag(0.0)
    co.eliminate_zeros()
    co.sort_indices()
    return co


def build_overlap(
    graph: TripartiteGraph, measure: OverlapMeasure = OverlapMeasure.COUNT
) -> OverlapWeights:
    """
    Calcula β a partir da relação bundle-item.

    Bundles sem itens em comum com nenhum outro ficam com linha vazia.
    """
    counts = overlap_counts(graph.bi)
    raw = counts
    if OverlapMeasure(measure) == OverlapMeasure.JACCARD:
        sizes = graph.bundle_sizes.astype(np.float64)
        coo = counts.tocoo()
        union = sizes[coo.row] + sizes[coo.col] - coo.data
        raw = sp.csr_matrix((coo.data / union, (coo.row, coo.col)), shape=counts.shape)
        raw.sort_indices()

    weights = row_normalize(raw)
    logger.debug(f"Sobreposição: {counts.nnz} pares de bundles com itens em comum")
    return OverlapWeights(counts=counts, weights=weights)
