"""
Split determinístico por usuário dos pares usuário-bundle.

Só a relação usuário-bundle é dividida; usuário-item e bundle-item são
informação lateral e ficam inteiras.
"""

import logging
import math
from dataclasses import dataclass
from typing import Tuple

import numpy as np
import scipy.sparse as sp

from ..core.numeric import SparseMatrix, csr_from_pairs
from ..models.config import SplitSpec
from .loader import Dataset

logger = logging.getLogger(__name__)


def _round_half_up(x: float) -> int:
    return int(math.floor(x + 0.5))


@dataclass(frozen=True)
class DatasetSplit:
    """Pares (u, b) de treino, validação e teste; partição exata de `ub`."""

    n_users: int
    n_bundles: int
    train: np.ndarray
    val: np.ndarray
    test: np.ndarray

    def matrix(self, which: str) -> SparseMatrix:
        pairs = getattr(self, which)
        return csr_from_pairs(pairs[:, 0], pairs[:, 1], (self.n_users, self.n_bundles))

    def train_matrix(self) -> SparseMatrix:
        return self.matrix("train")

    def known_before(self, which: str) -> SparseMatrix:
        """Positivos excluídos do ranking ao avaliar `which` (val: treino; test: treino + val)."""
        if which == "val":
            return self.matrix("train")
        if which == "test":
            mat = sp.csr_matrix(self.matrix("train") + self.matrix("val"))
            mat.data[:] = 1.0
            return mat
        raise ValueError(f"split desconhecido: {which!r}")


def _cut_sizes(n: int, ratios: Tuple[float, float, float]) -> Tuple[int, int, int]:
    _, val_ratio, test_ratio = ratios
    n_test = _round_half_up(n * test_ratio)
    n_val = _round_half_up(n * val_ratio)
    # treino nunca fica vazio: reduz validação primeiro, depois teste
    while n - n_test - n_val < 1:
        if n_val > 0:
            n_val -= 1
        else:
            n_test -= 1
    return n - n_val - n_test, n_val, n_test


def split(dataset: Dataset, spec: SplitSpec) -> DatasetSplit:
    """
    Embaralha os bundles de cada usuário (rng semeado, usuários em ordem
    crescente) e corta nas proporções. Usuários com menos de
    `spec.min_interactions` pares ficam inteiros no treino.
    """
    rng = np.random.default_rng(spec.seed)
    ub = dataset.ub
    order = np.lexsort((ub[:, 1], ub[:, 0]))
    ub = ub[order]
    bounds = np.searchsorted(ub[:, 0], np.arange(dataset.n_users + 1))

    train, val, test = [], [], []
    for user in range(dataset.n_users):
        bundles = ub[bounds[user]:bounds[user + 1], 1].copy()
        n = len(bundles)
        if n == 0:
            continue
        if n < spec.min_interactions:
            train.append(ub[bounds[user]:bounds[user + 1]])
            continue
        rng.shuffle(bundles)
        n_train, n_val, n_test = _cut_sizes(n, spec.ratios)
        users = np.full(n, user, dtype=np.int64)
        pairs = np.column_stack([users, bundles])
        test.append(pairs[:n_test])
        val.append(pairs[n_test:n_test + n_val])
        train.append(pairs[n_test + n_val:])

    def stack(parts) -> np.ndarray:
        if not parts:
            return np.zeros((0, 2), dtype=np.int64)
        out = np.concatenate(parts)
        return out[np.lexsort((out[:, 1], out[:, 0]))]

    result = DatasetSplit(
        n_users=dataset.n_users,
        n_bundles=dataset.n_bundles,
        train=stack(train),
        val=stack(val),
        test=stack(test),
    )
    logger.info(
        f"Split (seed={spec.seed}): treino={len(result.train)} val={len(result.val)} teste={len(result.test)}"
    )
    return result
