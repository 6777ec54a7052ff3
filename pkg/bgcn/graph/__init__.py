"""Grafo heterogêneo e pesos de sobreposição entre bundles."""

from .overlap import OverlapWeights, build_overlap, overlap_counts
from .tripartite import (
    Relation,
    TripartiteGraph,
    build_graph,
    group_labels,
    neighbors,
    sparsity_groups,
)

__all__ = [
    "OverlapWeights",
    "build_overlap",
    "overlap_counts",
    "Relation",
    "TripartiteGraph",
    "build_graph",
    "group_labels",
    "neighbors",
    "sparsity_groups",
]
