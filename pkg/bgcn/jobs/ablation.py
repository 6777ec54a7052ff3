"""
Job do estudo de ablação.

Treina cada variante nomeada (linhas da tabela de ablação, mais o
baseline MF-BPR) para cada semente, avalia no teste e resume por mediana.
"""

import json
import logging
import statistics
import sys
import time
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Union

# Adicionar diretório raiz ao path
sys.path.insert(0, str(Path(__file__).parent.parent.parent))

from bgcn.config import validate_schema
from bgcn.data.loader import Dataset
from bgcn.data.split import split
from bgcn.errors import ConfigError
from bgcn.evaluation.evaluator import evaluate
from bgcn.graph.overlap import build_overlap
from bgcn.models.config import ABLATION_PRESETS, TrainConfig
from bgcn.models.report import AblationReport, AblationRun
from bgcn.storage.checkpoint_manager import CheckpointManager
from bgcn.storage.files import atomic_write_text
from bgcn.training.trainer import train

logger = logging.getLogger(__name__)

DEFAULT_VARIANTS = (
    "ib-levels",
    "item-level",
    "bundle-level",
    "no-b2b",
    "unweighted-b2b",
    "no-hard",
    "mfbpr",
)
FULL_MODEL = "ib-levels"


def variant_config(base: TrainConfig, variant: str, seed: int) -> TrainConfig:
    """Config base com o preset da variante e a semente aplicados."""
    preset = ABLATION_PRESETS.get(variant)
    if preset is None:
        raise ConfigError(f"Variante desconhecida: {variant!r}")
    values = base.model_dump()
    values.update(preset)
    values["seed"] = seed
    return validate_schema(TrainConfig, values)


def run_ablation_study(
    dataset: Dataset,
    base: TrainConfig,
    variants: Sequence[str] = DEFAULT_VARIANTS,
    seeds: Sequence[int] = (1, 2, 3),
    k: int = 5,
    out_dir: Optional[Union[str, Path]] = None,
    threads: int = 1,
) -> AblationReport:
    """
    Executa o estudo completo.

    O split (semente `base.split_seed`) e o grafo de treino são os mesmos
    para todas as variantes; só a config de treino muda.
    """
    for variant in variants:
        if variant not in ABLATION_PRESETS:
            raise ConfigError(f"Variante desconhecida: {variant!r}")

    start = time.perf_counter()
    logger.info("=" * 60)
    logger.info(f"🧪 Estudo de ablação: {len(variants)} variantes x {len(seeds)} sementes, K={k}")
    logger.info("=" * 60)

    data_split = split(dataset, base.split_spec)
    graph = dataset.graph(data_split.train)
    overlap = build_overlap(graph, base.overlap_measure)
    manager = CheckpointManager(Path(out_dir) / "checkpoints") if out_dir is not None else None

    runs: List[AblationRun] = []
    for variant in variants:
        for seed in seeds:
            config = variant_config(base, variant, seed)
            logger.info(f"  ▶ {variant} (seed={seed})")
            result = train(config, data_split, graph, overlap, threads=threads)
            report = evaluate(result.model.scorer(), data_split, "test", [k], threads=threads)
            runs.append(
                AblationRun(
                    variant=variant,
                    seed=seed,
                    recall=report.recall[k],
                    ndcg=report.ndcg[k],
                    best_epoch=result.best_epoch,
                )
            )
            if manager is not None:
                manager.save(f"{variant}-seed{seed}", result.model.tensors(), config.echo())

    median_recall: Dict[str, float] = {}
    median_ndcg: Dict[str, float] = {}
    for variant in variants:
        mine = [r for r in runs if r.variant == variant]
        median_recall[variant] = statistics.median(r.recall for r in mine)
        median_ndcg[variant] = statistics.median(r.ndcg for r in mine)

    ablation = AblationReport(k=k, runs=runs, median_recall=median_recall, median_ndcg=median_ndcg)
    if out_dir is not None:
        write_ablation_report(ablation, Path(out_dir) / "ablation.tsv", base)

    duration = time.perf_counter() - start
    logger.info("=" * 60)
    logger.info("📊 MEDIANAS POR VARIANTE")
    logger.info("=" * 60)
    for variant in sorted(variants, key=lambda v: -median_recall[v]):
        logger.info(f"  {variant:<16} Recall@{k}={median_recall[variant]:.4f} NDCG@{k}={median_ndcg[variant]:.4f}")
    if FULL_MODEL in median_recall and len(variants) > 1:
        weakest = min(variants, key=lambda v: median_recall[v])
        logger.info(
            f"  Completo vs mais fraco ({weakest}): "
            f"{median_recall[FULL_MODEL]:.4f} vs {median_recall[weakest]:.4f}"
        )
    logger.info(f"  Duração: {duration:.2f}s ({duration / 60:.1f} min)")
    logger.info("=" * 60)
    return ablation


def write_ablation_report(report: AblationReport, path: Path, base: TrainConfig) -> Path:
    """TSV `variant<TAB>seed<TAB>metric<TAB>k<TAB>value`; seed 'median' nas linhas de resumo."""
    lines = [f"# config={json.dumps(base.echo(), sort_keys=True, separators=(',', ':'))}"]
    lines.append("variant\tseed\tmetric\tk\tvalue")
    for run in report.runs:
        lines.append(f"{run.variant}\t{run.seed}\trecall\t{report.k}\t{run.recall:.6f}")
        lines.append(f"{run.variant}\t{run.seed}\tndcg\t{report.k}\t{run.ndcg:.6f}")
    for variant, value in report.median_recall.items():
        lines.append(f"{variant}\tmedian\trecall\t{report.k}\t{value:.6f}")
        lines.append(f"{variant}\tmedian\tndcg\t{report.k}\t{report.median_ndcg[variant]:.6f}")
    return atomic_write_text(path, "\n".join(lines) + "\n")
