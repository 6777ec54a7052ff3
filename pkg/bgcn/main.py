"""
BGCN - interface de linha de comando.

Subcomandos:
    train      treina BGCN ou MF-BPR e grava checkpoint + log
    evaluate   Recall@K / NDCG@K com ranking completo
    recommend  top-K bundles de um usuário
    gradcheck  verificação de gradientes na instância de brinquedo
    synth      gera um dataset sintético com estrutura plantada
    ablate     estudo de ablação com várias sementes

Códigos de saída: 0 sucesso, 1 falha de execução, 2 uso/validação.
"""

import argparse
import json
import logging
import sys
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence

import numpy as np
from dotenv import load_dotenv
from pydantic import ValidationError

from .config import get_settings, parse_kv_file, resolve_train_config, validate_schema, validation_message
from .core.numeric import set_checked
from .data.loader import Dataset, load_dataset
from .data.split import DatasetSplit, split
from .data.synth import save_synthetic, synth_generate
from .engine.model import RankingModel, build_model
from .errors import BGCNError, CheckpointError, ConfigError, GraphIndexError, TrainingDivergedError
from .evaluation.evaluator import evaluate
from .evaluation.ranking import rank_scores
from .evaluation.report import format_report, write_report
from .graph.overlap import OverlapWeights, build_overlap
from .graph.tripartite import TripartiteGraph
from .jobs.ablation import DEFAULT_VARIANTS, run_ablation_study
from .jobs.gradcheck import format_results, run_gradcheck
from .logging_config import render_records, setup_logging
from .models.config import AblationSwitches, ModelKind, SynthSpec, TrainConfig
from .storage.checkpoint_manager import load_checkpoint, save_checkpoint
from .storage.files import atomic_write_text
from .training.trainer import train

logger = logging.getLogger("bgcn")


def _int_list(value: str) -> List[int]:
    try:
        return [int(v) for v in value.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"lista de inteiros inválida: {value!r}") from None


def _log_resolved(config: Dict[str, Any], seed: Optional[int] = None) -> None:
    logger.info(f"Config resolvida: {json.dumps(config, sort_keys=True)}")
    if seed is not None:
        logger.info(f"Seed: {seed}")


def _progress_enabled() -> bool:
    return get_settings().progress and sys.stderr.isatty()


def _threads(args: argparse.Namespace) -> int:
    return args.threads if args.threads is not None else get_settings().threads


class _Context:
    """Dataset, split e grafo de treino montados a partir de uma config."""

    def __init__(self, dataset: Dataset, config: TrainConfig):
        self.dataset = dataset
        self.config = config
        self.split: DatasetSplit = split(dataset, config.split_spec)
        self.graph: TripartiteGraph = dataset.graph(self.split.train)
        self.overlap: Optional[OverlapWeights] = None
        if config.model == ModelKind.BGCN and (config.bundle_level or config.hard_enabled):
            self.overlap = build_overlap(self.graph, config.overlap_measure)


def _load_model(args: argparse.Namespace):
    checkpoint = load_checkpoint(args.ckpt)
    try:
        config = TrainConfig.model_validate(checkpoint.config)
    except ValidationError as e:
        raise CheckpointError(f"{args.ckpt}: eco de config inválido ({validation_message(e)})") from e
    dataset = load_dataset(args.data)
    context = _Context(dataset, config)
    model: RankingModel = build_model(config, context.graph, context.overlap, tensors=checkpoint.tensors)
    return config, context, model


# --- Subcomandos ---


def cmd_train(args: argparse.Namespace) -> int:
    overrides = {
        "seed": args.seed,
        "max_epochs": args.max_epochs,
        "lr": args.lr,
        "reg_lambda": args.reg_lambda,
        "batch_size": args.batch_size,
        "embedding_size": args.embedding_size,
        "n_layers": args.n_layers,
        "p_hard": args.p_hard,
        "patience": args.patience,
    }
    config = resolve_train_config(args.config, overrides, args.ablation or ())
    _log_resolved(config.echo(), config.seed)

    dataset = load_dataset(args.data)
    context = _Context(dataset, config)
    out = Path(args.out)
    log_path = Path(args.log) if args.log else out.with_name(out.name + ".log.jsonl")

    try:
        result = train(
            config, context.split, context.graph, context.overlap,
            threads=_threads(args), progress=_progress_enabled(),
        )
    except TrainingDivergedError as e:
        if e.last_good is not None:
            save_checkpoint(e.last_good, config.echo(), out)
        atomic_write_text(log_path, "\n".join(render_records(r.compact() for r in e.log)) + "\n")
        raise

    save_checkpoint(result.model.tensors(), config.echo(), out)
    atomic_write_text(log_path, "\n".join(result.log_lines()) + "\n")
    logger.info(
        f"✅ Treino concluído: {result.epochs_run} épocas, melhor época {result.best_epoch}, "
        f"troca de fase {result.switch_epoch}"
    )
    return 0


def cmd_evaluate(args: argparse.Namespace) -> int:
    config, context, model = _load_model(args)
    ks = args.ks or config.ks
    _log_resolved(config.echo(), config.seed)
    report = evaluate(
        model.scorer(),
        context.split,
        args.split,
        ks,
        graph=context.graph,
        group_boundaries=config.group_boundaries if args.groups else None,
        threads=_threads(args),
        progress=_progress_enabled(),
        config=config.echo(),
    )
    sys.stdout.write(format_report(report))
    report_path = Path(args.report) if args.report else Path(str(args.ckpt) + f".{args.split}.tsv")
    write_report(report, report_path)
    logger.info(f"Relatório gravado em {report_path}")
    return 0


def cmd_recommend(args: argparse.Namespace) -> int:
    config, context, model = _load_model(args)
    if not 0 <= args.user < context.graph.n_users:
        raise GraphIndexError(f"usuário {args.user} fora de [0, {context.graph.n_users})")
    if args.k < 1:
        raise ConfigError("--k precisa ser >= 1")
    _log_resolved(config.echo(), config.seed)

    known = context.split.train_matrix()
    exclude = known.indices[known.indptr[args.user]:known.indptr[args.user + 1]]
    scores = model.scorer().score_users(np.asarray([args.user]))[0]
    ranked = rank_scores(scores, exclude)[: args.k]
    for rank, bundle in enumerate(ranked, 1):
        sys.stdout.write(f"{rank} {int(bundle)} {scores[bundle]:.6f}\n")
    return 0


def cmd_gradcheck(args: argparse.Namespace) -> int:
    switches = None
    if args.switches:
        try:
            switches = [AblationSwitches.from_label(label) for label in args.switches]
        except (ValueError, ValidationError) as e:
            raise ConfigError(f"--switches inválido: {e}") from e
    _log_resolved({"seed": args.seed, "switches": args.switches or "all"}, args.seed)
    results = run_gradcheck(seed=args.seed, switches=switches, corrupt=args.corrupt)
    sys.stdout.write(format_results(results))
    return 0 if all(r.passed for r in results) else 1


def cmd_synth(args: argparse.Namespace) -> int:
    values: Dict[str, Any] = parse_kv_file(args.spec) if args.spec else {}
    if args.seed is not None:
        values["seed"] = args.seed
    spec = validate_schema(SynthSpec, values)
    _log_resolved(spec.model_dump(mode="json"), spec.seed)
    save_synthetic(synth_generate(spec), args.out)
    logger.info(f"✅ Dataset sintético gravado em {args.out}")
    return 0


def cmd_ablate(args: argparse.Namespace) -> int:
    base = resolve_train_config(args.config, {"max_epochs": args.max_epochs})
    _log_resolved(base.echo(), base.seed)
    dataset = load_dataset(args.data)
    variants = [v.strip() for v in args.variants.split(",") if v.strip()] if args.variants else DEFAULT_VARIANTS
    report = run_ablation_study(
        dataset, base, variants, args.seeds, k=args.k, out_dir=args.out, threads=_threads(args)
    )
    for variant in variants:
        sys.stdout.write(
            f"{variant}\t{report.median_recall[variant]:.4f}\t{report.median_ndcg[variant]:.4f}\n"
        )
    return 0


# --- Parser ---


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="bgcn", description="Recomendação de bundles com BGCN")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("train", help="Treina e grava checkpoint + log")
    p.add_argument("--data", required=True, help="Diretório do dataset")
    p.add_argument("--config", type=Path, help="Arquivo key=value")
    p.add_argument("--out", required=True, help="Checkpoint de saída")
    p.add_argument("--log", help="Log de treino (padrão: <out>.log.jsonl)")
    p.add_argument("--ablation", action="append", help="Linha de ablação (pode repetir)")
    p.add_argument("--seed", type=int)
    p.add_argument("--max-epochs", type=int)
    p.add_argument("--lr", type=float)
    p.add_argument("--reg-lambda", type=float)
    p.add_argument("--batch-size", type=int)
    p.add_argument("--embedding-size", type=int)
    p.add_argument("--n-layers", type=int)
    p.add_argument("--p-hard", type=float)
    p.add_argument("--patience", type=int)
    p.add_argument("--threads", type=int)
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("evaluate", help="Avalia um checkpoint")
    p.add_argument("--data", required=True)
    p.add_argument("--ckpt", required=True)
    p.add_argument("--ks", type=_int_list, help="Ex: 20,40,80")
    p.add_argument("--groups", action="store_true", help="Quebra por grupos de esparsidade")
    p.add_argument("--split", choices=["test", "val"], default="test")
    p.add_argument("--report", help="TSV de saída (padrão: <ckpt>.<split>.tsv)")
    p.add_argument("--threads", type=int)
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("recommend", help="Top-K bundles de um usuário")
    p.add_argument("--data", required=True)
    p.add_argument("--ckpt", required=True)
    p.add_argument("--user", type=int, required=True)
    p.add_argument("--k", type=int, default=10)
    p.set_defaults(func=cmd_recommend)

    p = sub.add_parser("gradcheck", help="Verificação de gradientes")
    p.add_argument("--seed", type=int, default=2020)
    p.add_argument("--switches", action="append", help="Ex: item+bundle/weighted (pode repetir)")
    p.add_argument("--corrupt", action="store_true", help=argparse.SUPPRESS)
    p.set_defaults(func=cmd_gradcheck)

    p = sub.add_parser("synth", help="Gera dataset sintético")
    p.add_argument("--spec", type=Path, help="Arquivo key=value do SynthSpec")
    p.add_argument("--out", required=True)
    p.add_argument("--seed", type=int)
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("ablate", help="Estudo de ablação")
    p.add_argument("--data", required=True)
    p.add_argument("--config", type=Path)
    p.add_argument("--variants", help=f"Padrão: {','.join(DEFAULT_VARIANTS)}")
    p.add_argument("--seeds", type=_int_list, default=[1, 2, 3])
    p.add_argument("--k", type=int, default=5)
    p.add_argument("--max-epochs", type=int)
    p.add_argument("--out", help="Diretório para checkpoints e ablation.tsv")
    p.add_argument("--threads", type=int)
    p.set_defaults(func=cmd_ablate)

    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    """
    Ponto de entrada. Erros conhecidos viram mensagem curta e código de
    saída; exceções inesperadas são logadas com traceback e saem com 1.
    """
    load_dotenv()
    settings = get_settings()
    setup_logging(settings.log_level, settings.log_json)
    set_checked(settings.checked)

    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0)

    try:
        return args.func(args)
    except BGCNError as e:
        logger.error(f"❌ {type(e).__name__}: {e}")
        return e.exit_code
    except ValidationError as e:
        logger.error(f"❌ Validação: {validation_message(e)}")
        return 2
    except Exception as e:
        logger.error(f"❌ Erro inesperado: {e}", exc_info=True)
        return 1


if __name__ == "__main__":
    sys.exit(main())
