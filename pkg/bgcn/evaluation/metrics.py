"""Recall@K e NDCG@K sobre um ranking completo."""

from typing import Collection, Sequence, Set

import numpy as np


def _truth_set(truth: Collection[int], name: str) -> Set[int]:
    truth_set = {int(t) for t in truth}
    if len(truth_set) == 0:
        raise ValueError(f"{name} com verdade vazia")
    return truth_set


def _hits(ranked: Sequence[int], truth: Set[int], k: int) -> np.ndarray:
    return np.fromiter((int(b) in truth for b in ranked[:k]), dtype=bool, count=min(k, len(ranked)))


def recall_at_k(ranked: Sequence[int], truth: Collection[int], k: int) -> float:
    """|top-K ∩ verdade| / |verdade|."""
    truth_set = _truth_set(truth, "recall_at_k")
    return float(_hits(ranked, truth_set, k).sum()) / len(truth_set)


def ndcg_at_k(ranked: Sequence[int], truth: Collection[int], k: int) -> float:
    """DCG com ganho binário e desconto 1/log2(posição+1), normalizado pelo ideal."""
    truth_set = _truth_set(truth, "ndcg_at_k")
    hits = _hits(ranked, truth_set, k)
    discounts = 1.0 / np.log2(np.arange(2, k + 2))
    dcg = float(discounts[: len(hits)][hits].sum())
    idcg = float(discounts[: min(len(truth_set), k)].sum())
    return dcg / idcg
