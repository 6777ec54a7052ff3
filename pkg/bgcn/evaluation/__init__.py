"""Avaliação top-K: ranking, métricas, relatórios."""

from .evaluator import evaluate
from .metrics import ndcg_at_k, recall_at_k
from .ranking import rank_bundles, rank_scores
from .report import format_report, read_report, report_rows, write_report

__all__ = [
    "evaluate",
    "ndcg_at_k",
    "recall_at_k",
    "rank_bundles",
    "rank_scores",
    "format_report",
    "read_report",
    "report_rows",
    "write_report",
]
