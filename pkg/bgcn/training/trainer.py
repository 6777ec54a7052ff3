"""
Loop de treino BPR em duas fases.

Fase 1 usa negativos uniformes até a validação (Recall@K) passar
`patience` avaliações sem melhorar (contando só depois de `min_epochs`);
então, se negativos difíceis estiverem habilitados, a fase 2 recomeça do
melhor snapshot da fase 1 e segue com o mesmo critério de parada.
O melhor snapshot de validação é o resultado.
"""

import logging
from dataclasses import dataclass, field
from typing import Dict, List, Optional

import numpy as np
from tqdm import tqdm

from ..core.optim import Adam
from ..data.split import DatasetSplit
from ..engine.model import RankingModel, build_model
from ..errors import TrainingDivergedError, TrainingError
from ..evaluation.evaluator import evaluate
from ..graph.overlap import OverlapWeights
from ..graph.tripartite import TripartiteGraph
from ..logging_config import render_records
from ..models.config import TrainConfig
from ..models.report import TrainingLogRecord
from .sampling import HardCandidateIndex, UniformSampler, build_hard_index, sample_hard_batch

logger = logging.getLogger(__name__)

UNIFORM = "uniform"
HARD = "hard"


def _snapshot(tensors: Dict[str, np.ndarray]) -> Dict[str, np.ndarray]:
    return {name: t.copy() for name, t in tensors.items()}


@dataclass
class TrainResult:
    """Modelo com o melhor snapshot carregado e o log estruturado."""

    model: RankingModel
    log: List[TrainingLogRecord] = field(default_factory=list)
    best_epoch: int = 0
    best_recall: Optional[float] = None
    switch_epoch: Optional[int] = None
    epochs_run: int = 0

    def log_lines(self) -> List[str]:
        return render_records(record.compact() for record in self.log)


def train(
    config: TrainConfig,
    data_split: DatasetSplit,
    graph: TripartiteGraph,
    overlap: Optional[OverlapWeights] = None,
    threads: int = 1,
    progress: bool = False,
) -> TrainResult:
    """
    Treina o modelo de `config` no split dado.

    Args:
        config: config resolvida (modelo, otimização, amostragem, ablações)
        data_split: pares de treino/validação/teste
        graph: grafo construído só com os pares de treino
        overlap: pesos B2B (obrigatório se b2b_mode != none)
        threads: workers da avaliação de validação
        progress: barra de progresso por época

    Raises:
        TrainingDivergedError: perda ou gradiente não finito; carrega o
            último snapshot válido e o log até ali.
    """
    rng = np.random.default_rng(config.seed)
    model = build_model(config, graph, overlap)
    sampler = UniformSampler(data_split.train_matrix())
    optimizer = Adam(model.tensors(), lr=config.lr)
    eval_ks = sorted(set(config.ks) | {config.early_stop_k})
    families = sorted(config.hard_families, key=lambda f: f.value)

    log: List[TrainingLogRecord] = [TrainingLogRecord(kind="config", config=config.echo())]
    logger.info(
        f"Treino {config.model.value}: {sampler.n_positives} positivos, batch={config.batch_size}, "
        f"seed={config.seed}, níveis={config.switches.label()}"
    )

    best = _snapshot(model.tensors())
    last_good = best
    best_epoch, best_recall = 0, None
    phase, stale, switch_epoch = UNIFORM, 0, None
    index: Optional[HardCandidateIndex] = None
    epochs_run = 0

    epochs = tqdm(range(1, config.max_epochs + 1), desc="treino", unit="época", disable=not progress)
    for epoch in epochs:
        model.start_epoch(rng)
        total_loss, hard_count = 0.0, 0
        n = sampler.n_positives
        try:
            for start in range(0, n, config.batch_size):
                batch = sampler.sample(min(config.batch_size, n - start), rng)
                if phase == HARD:
                    batch = sample_hard_batch(batch, index, config.p_hard, rng, families)
                loss, grads = model.loss_and_grads(batch.users, batch.pos, batch.neg, config.reg_lambda, rng)
                if not np.isfinite(loss):
                    raise TrainingError(f"Perda não finita na época {epoch}")
                optimizer.step(grads)
                total_loss += loss
                hard_count += int(batch.hard.sum())
        except TrainingError as e:
            logger.error(f"❌ Treino divergiu: {e}")
            raise TrainingDivergedError(str(e), last_good=last_good, log=log) from e

        epochs_run = epoch
        last_good = _snapshot(model.tensors())
        mean_loss = total_loss / n
        log.append(
            TrainingLogRecord(
                kind="epoch", epoch=epoch, phase=phase, loss=mean_loss, hard_fraction=hard_count / n
            )
        )
        epochs.set_postfix(loss=f"{mean_loss:.4f}", fase=phase)

        if epoch % config.eval_every:
            continue

        report = evaluate(model.scorer(), data_split, "val", eval_ks, threads=threads)
        recall = report.recall[config.early_stop_k]
        if best_recall is None or recall > best_recall:
            best, best_epoch, best_recall, stale = last_good, epoch, recall, 0
        else:
            stale += 1
        log.append(
            TrainingLogRecord(
                kind="eval",
                epoch=epoch,
                phase=phase,
                recall={str(k): v for k, v in report.recall.items()},
                ndcg={str(k): v for k, v in report.ndcg.items()},
                best_epoch=best_epoch,
            )
        )
        logger.info(
            f"Época {epoch} ({phase}): perda={mean_loss:.4f} "
            f"Recall@{config.early_stop_k}={recall:.4f} (melhor {best_recall:.4f} na época {best_epoch})"
        )

        if stale < config.patience or epoch < config.min_epochs:
            continue
        if phase == UNIFORM and config.hard_enabled:
            phase, stale, switch_epoch = HARD, 0, epoch
            # fase 2 parte do melhor snapshot da fase 1, com momentos zerados
            model.load_tensors(best)
            optimizer = Adam(model.tensors(), lr=config.lr)
            last_good = best
            index = build_hard_index(
                graph, overlap, data_split.train_matrix(), config.tau, config.min_overlap
            )
            log.append(TrainingLogRecord(kind="switch", epoch=epoch, switch_epoch=epoch))
            logger.info(f"🔄 Convergiu na fase uniforme; negativos difíceis a partir da época {epoch + 1}")
        else:
            logger.info(f"Parada antecipada na época {epoch} ({phase})")
            break

    if best_recall is None:
        # nenhuma avaliação: fica com os parâmetros finais
        best = last_good
    model.load_tensors(best)
    log.append(
        TrainingLogRecord(kind="summary", epoch=epochs_run, best_epoch=best_epoch, switch_epoch=switch_epoch)
    )
    return TrainResult(
        model=model,
        log=log,
        best_epoch=best_epoch,
        best_recall=best_recall,
        switch_epoch=switch_epoch,
        epochs_run=epochs_run,
    )
