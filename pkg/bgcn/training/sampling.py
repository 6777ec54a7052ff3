"""
Amostragem de triplas (u, b, c) para o BPR.

Positivos saem uniformemente de Y⁺ do treino; negativos uniformes saem de
Y⁻ por rejeição vetorizada. Na fase 2, negativos difíceis vêm do índice de
candidatos: bundles que cobrem boa parte dos itens do usuário ou que
compartilham itens com o positivo.
"""

import logging
from dataclasses import dataclass
from typing import Callable, Iterable, List, NamedTuple, Optional, Tuple

import numpy as np
import scipy.sparse as sp

from ..core.numeric import SparseMatrix
from ..errors import TrainingError
from ..graph.overlap import OverlapWeights, overlap_counts
from ..graph.tripartite import TripartiteGraph
from ..models.config import HardFamily

logger = logging.getLogger(__name__)


class TrainTriple(NamedTuple):
    u: int
    b: int
    c: int
    hard: bool


@dataclass
class TripleBatch:
    """Batch de triplas em colunas alinhadas."""

    users: np.ndarray
    pos: np.ndarray
    neg: np.ndarray
    hard: np.ndarray

    def __len__(self) -> int:
        return len(self.users)

    @property
    def hard_fraction(self) -> float:
        return float(self.hard.mean()) if len(self) else 0.0

    def triples(self) -> List[TrainTriple]:
        return [
            TrainTriple(int(u), int(b), int(c), bool(h))
            for u, b, c, h in zip(self.users, self.pos, self.neg, self.hard)
        ]


class UniformSampler:
    """
    Amostrador uniforme sobre a matriz de positivos de treino.

    Usuários positivos em todos os bundles não têm negativo possível; um
    positivo desses é trocado por outro sorteado entre os válidos (aviso
    registrado uma única vez).
    """

    def __init__(self, train: SparseMatrix):
        train = sp.csr_matrix(train)
        train.sort_indices()
        if train.nnz == 0:
            raise TrainingError("Split de treino sem positivos")
        self.train = train
        self.n_bundles = train.shape[1]
        self.rows = np.repeat(np.arange(train.shape[0], dtype=np.int64), np.diff(train.indptr))
        self.cols = train.indices.astype(np.int64)
        self.keys = self.rows * self.n_bundles + self.cols

        full = np.diff(train.indptr) >= self.n_bundles
        self.eligible = np.flatnonzero(~full[self.rows])
        if self.eligible.size == 0:
            raise TrainingError("Nenhum usuário com bundle negativo disponível")
        self._has_full = self.eligible.size < train.nnz
        self._warned = False

    @property
    def n_positives(self) -> int:
        return self.train.nnz

    def positives_of(self, user: int) -> np.ndarray:
        return self.cols[self.train.indptr[user]:self.train.indptr[user + 1]]

    def sample_negatives(self, users: np.ndarray, rng: np.random.Generator) -> np.ndarray:
        neg = rng.integers(0, self.n_bundles, size=len(users))
        pending = np.flatnonzero(np.isin(users * self.n_bundles + neg, self.keys))
        while pending.size:
            neg[pending] = rng.integers(0, self.n_bundles, size=pending.size)
            still = np.isin(users[pending] * self.n_bundles + neg[pending], self.keys)
            pending = pending[still]
        return neg

    def sample(self, size: int, rng: np.random.Generator) -> TripleBatch:
        idx = rng.integers(0, self.train.nnz, size=size)
        if self._has_full:
            bad = np.flatnonzero(~np.isin(idx, self.eligible))
            if bad.size:
                if not self._warned:
                    logger.warning("Usuário positivo em todos os bundles: positivo reamostrado")
                    self._warned = True
                idx[bad] = self.eligible[rng.integers(0, self.eligible.size, size=bad.size)]
        users = self.rows[idx]
        pos = self.cols[idx]
        neg = self.sample_negatives(users, rng)
        return TripleBatch(users=users, pos=pos, neg=neg, hard=np.zeros(size, dtype=bool))


def sample_uniform_batch(train: SparseMatrix, size: int, rng: np.random.Generator) -> TripleBatch:
    return UniformSampler(train).sample(size, rng)


@dataclass(frozen=True)
class HardCandidateIndex:
    """
    Candidatos a negativo difícil.

    coverage: M x N, c entra para u se cobertura(u, c) >= τ e c não é positivo de u
    overlap: N x N, c entra para b se os dois compartilham >= min_overlap itens
    """

    coverage: SparseMatrix
    overlap: SparseMatrix
    train: SparseMatrix
    tau: float
    min_overlap: int

    def coverage_candidates(self, user: int) -> np.ndarray:
        return self.coverage.indices[self.coverage.indptr[user]:self.coverage.indptr[user + 1]]

    def overlap_candidates(self, bundle: int) -> np.ndarray:
        return self.overlap.indices[self.overlap.indptr[bundle]:self.overlap.indptr[bundle + 1]]

    def candidates(
        self,
        user: int,
        bundle: int,
        families: Iterable[HardFamily] = (HardFamily.ITEM, HardFamily.BUNDLE),
    ) -> np.ndarray:
        """União das famílias pedidas menos os positivos de treino de `user`."""
        families = set(families)
        parts = []
        if HardFamily.ITEM in families:
            parts.append(self.coverage_candidates(user))
        if HardFamily.BUNDLE in families:
            parts.append(self.overlap_candidates(bundle))
        if not parts:
            return np.zeros(0, dtype=np.int64)
        union = np.unique(np.concatenate(parts))
        positives = self.train.indices[self.train.indptr[user]:self.train.indptr[user + 1]]
        return np.setdiff1d(union, positives, assume_unique=True)


def build_hard_index(
    graph: TripartiteGraph,
    overlap: Optional[OverlapWeights],
    train: SparseMatrix,
    tau: float,
    min_overlap: int = 1,
) -> HardCandidateIndex:
    """
    Materializa as duas famílias de candidatos.

    A cobertura usa as interações usuário-item do grafo e `train` (positivos
    de treino) para excluir bundles já consumidos.
    """
    if not 0.0 < tau <= 1.0:
        raise ValueError(f"tau fora de (0, 1]: {tau}")
    train = sp.csr_matrix(train, dtype=np.float64)
    train.sort_indices()

    hits = sp.csr_matrix(graph.ui @ graph.bi.T, dtype=np.float64)
    hits.sort_indices()
    sizes = graph.bundle_sizes.astype(np.float64)
    ratio = hits.copy()
    ratio.data = hits.data / sizes[hits.indices]
    ratio.data[ratio.data < tau] = 0.0
    ratio.eliminate_zeros()
    # tira positivos de treino
    ratio = ratio - ratio.multiply(train > 0)
    coverage = sp.csr_matrix(ratio)
    coverage.eliminate_zeros()
    coverage.data[:] = 1.0
    coverage.sort_indices()

    counts = overlap.counts if overlap is not None else overlap_counts(graph.bi)
    shared = sp.csr_matrix(counts, copy=True)
    shared.data[shared.data < min_overlap] = 0.0
    shared.eliminate_zeros()
    shared.data[:] = 1.0
    shared.sort_indices()

    logger.info(
        f"Índice de negativos difíceis: {coverage.nnz} pares por cobertura (τ={tau}), "
        f"{shared.nnz} pares por sobreposição (>= {min_overlap})"
    )
    return HardCandidateIndex(
        coverage=coverage, overlap=shared, train=train, tau=tau, min_overlap=min_overlap
    )


def sample_hard(
    u: int,
    b: int,
    index: HardCandidateIndex,
    p_hard: float,
    rng: np.random.Generator,
    fallback: Callable[[int], int],
    families: Iterable[HardFamily] = (HardFamily.ITEM, HardFamily.BUNDLE),
) -> Tuple[int, bool]:
    """
    Com probabilidade p_hard sorteia c da união de candidatos; se a união
    estiver vazia (ou na probabilidade complementar) usa `fallback(u)`.
    """
    if rng.random() < p_hard:
        pool = index.candidates(u, b, families)
        if pool.size:
            return int(pool[rng.integers(0, pool.size)]), True
    return int(fallback(u)), False


def sample_hard_batch(
    uniform: TripleBatch,
    index: HardCandidateIndex,
    p_hard: float,
    rng: np.random.Generator,
    families: Iterable[HardFamily] = (HardFamily.ITEM, HardFamily.BUNDLE),
) -> TripleBatch:
    """Aplica `sample_hard` a cada tripla, com o negativo uniforme como fallback."""
    families = tuple(families)
    neg = uniform.neg.copy()
    hard = np.zeros(len(uniform), dtype=bool)
    for t in range(len(uniform)):
        neg[t], hard[t] = sample_hard(
            int(uniform.users[t]),
            int(uniform.pos[t]),
            index,
            p_hard,
            rng,
            fallback=lambda _u, t=t: uniform.neg[t],
            families=families,
        )
    return TripleBatch(users=uniform.users, pos=uniform.pos, neg=neg, hard=hard)
