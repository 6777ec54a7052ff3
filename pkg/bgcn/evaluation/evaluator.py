"""
Avaliação top-K com ranking completo.

Para cada usuário com verdade não vazia no split avaliado, todos os
bundles menos os positivos já conhecidos (treino; treino + validação ao
avaliar teste) são ranqueados. As médias saem por usuário e, opcionalmente,
por grupo de esparsidade.
"""

import logging
from concurrent.futures import ThreadPoolExecutor
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
from tqdm import tqdm

from ..core.numeric import SparseMatrix
from ..data.split import DatasetSplit
from ..graph.tripartite import TripartiteGraph, group_labels, sparsity_groups
from ..models.report import EvalReport, GroupReport
from .metrics import ndcg_at_k, recall_at_k
from .ranking import rank_scores

logger = logging.getLogger(__name__)

CHUNK_SIZE = 256


def _row(mat: SparseMatrix, user: int) -> np.ndarray:
    return mat.indices[mat.indptr[user]:mat.indptr[user + 1]]


def _evaluate_chunk(
    scorer,
    users: np.ndarray,
    truth: SparseMatrix,
    known: SparseMatrix,
    ks: Sequence[int],
) -> List[Tuple[int, np.ndarray, np.ndarray]]:
    scores = scorer.score_users(users)
    out = []
    for row, user in enumerate(users):
        ranked = rank_scores(scores[row], _row(known, user))
        target = _row(truth, user)
        recall = np.array([recall_at_k(ranked, target, k) for k in ks])
        ndcg = np.array([ndcg_at_k(ranked, target, k) for k in ks])
        out.append((int(user), recall, ndcg))
    return out


def _metric_set(users: np.ndarray, per_user: Dict[int, Tuple[np.ndarray, np.ndarray]], ks: Sequence[int]) -> Dict:
    users = [int(u) for u in users if int(u) in per_user]
    if not users:
        return {"n_users": 0, "recall": {k: 0.0 for k in ks}, "ndcg": {k: 0.0 for k in ks}}
    recall = np.mean([per_user[u][0] for u in users], axis=0)
    ndcg = np.mean([per_user[u][1] for u in users], axis=0)
    return {
        "n_users": len(users),
        "recall": {k: float(v) for k, v in zip(ks, recall)},
        "ndcg": {k: float(v) for k, v in zip(ks, ndcg)},
    }


def evaluate(
    scorer,
    data_split: DatasetSplit,
    which: str = "test",
    ks: Sequence[int] = (20, 40, 80),
    graph: Optional[TripartiteGraph] = None,
    group_boundaries: Optional[Sequence[int]] = None,
    threads: int = 1,
    progress: bool = False,
    config: Optional[Dict] = None,
) -> EvalReport:
    """
    Avalia `scorer` (embeddings propagados ou fatores MF) num split.

    Args:
        scorer: objeto com `score_users(users) -> len(users) x N`
        data_split: split do dataset
        which: "val" ou "test"
        ks: valores de K
        graph: grafo de treino, necessário para os grupos de esparsidade
        group_boundaries: fronteiras dos grupos (None = sem grupos)
        threads: workers para o fan-out por blocos de usuários
        progress: barra de progresso tqdm
        config: eco da config, anexado ao relatório

    Returns:
        EvalReport com médias gerais e por grupo.
    """
    ks = sorted(set(int(k) for k in ks))
    truth = data_split.matrix(which)
    known = data_split.known_before(which)
    users = np.flatnonzero(np.diff(truth.indptr) > 0)
    chunks = [users[i:i + CHUNK_SIZE] for i in range(0, len(users), CHUNK_SIZE)]

    per_user: Dict[int, Tuple[np.ndarray, np.ndarray]] = {}
    bar = tqdm(total=len(users), desc=f"avaliando ({which})", unit="usuário", disable=not progress, leave=False)
    if threads > 1 and len(chunks) > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            futures = [pool.submit(_evaluate_chunk, scorer, chunk, truth, known, ks) for chunk in chunks]
            for chunk, future in zip(chunks, futures):
                for user, recall, ndcg in future.result():
                    per_user[user] = (recall, ndcg)
                bar.update(len(chunk))
    else:
        for chunk in chunks:
            for user, recall, ndcg in _evaluate_chunk(scorer, chunk, truth, known, ks):
                per_user[user] = (recall, ndcg)
            bar.update(len(chunk))
    bar.close()

    groups: List[GroupReport] = []
    if group_boundaries is not None:
        if graph is None:
            raise ValueError("grupos de esparsidade exigem o grafo de treino")
        labels = group_labels(group_boundaries)
        for index, members in enumerate(sparsity_groups(graph, group_boundaries)):
            groups.append(GroupReport(group=index, label=labels[index], **_metric_set(members, per_user, ks)))

    overall = _metric_set(users, per_user, ks)
    report = EvalReport(ks=ks, split=which, groups=groups, config=config, **overall)
    logger.info(
        f"Avaliação ({which}, {report.n_users} usuários): "
        + " ".join(f"Recall@{k}={report.recall[k]:.4f} NDCG@{k}={report.ndcg[k]:.4f}" for k in ks)
    )
    return report
