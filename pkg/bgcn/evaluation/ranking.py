"""Ranking completo de bundles com desempate determinístico."""

from typing import Optional, Sequence

import numpy as np


def rank_scores(scores: np.ndarray, exclude: Optional[Sequence[int]] = None) -> np.ndarray:
    """
    Ids ordenados por score decrescente, sem os ids de `exclude`.

    Empates ficam em ordem crescente de id (argsort estável sobre -score).
    """
    scores = np.asarray(scores, dtype=np.float64)
    candidates = np.arange(scores.shape[0])
    if exclude is not None and len(exclude):
        keep = np.ones(scores.shape[0], dtype=bool)
        keep[np.asarray(exclude, dtype=np.int64)] = False
        candidates = candidates[keep]
    order = np.argsort(-scores[candidates], kind="stable")
    return candidates[order]


def rank_bundles(scorer, user: int, exclude: Optional[Sequence[int]] = None) -> np.ndarray:
    """Ranking de todos os bundles para `user` (tipicamente excluindo os positivos de treino)."""
    scores = scorer.score_users(np.asarray([user], dtype=np.int64))[0]
    return rank_scores(scores, exclude)
