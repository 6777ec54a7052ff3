"""
Saídas do relatório de avaliação: tabela de texto e arquivo TSV
`metric<TAB>k<TAB>group<TAB>value`, com a config ecoada no cabeçalho.
"""

import json
from pathlib import Path
from typing import Dict, List, Tuple, Union

from ..models.report import EvalReport, MetricSet
from ..storage.files import atomic_write_text

OVERALL = "all"


def _table(metrics: MetricSet, ks: List[int]) -> List[str]:
    lines = [f"{'K':>5}  {'Recall':>8}  {'NDCG':>8}"]
    for k in ks:
        lines.append(f"{k:>5}  {metrics.recall[k]:>8.4f}  {metrics.ndcg[k]:>8.4f}")
    return lines


def format_report(report: EvalReport) -> str:
    """Tabela legível: bloco geral e um bloco por grupo de esparsidade."""
    lines = [f"Avaliação ({report.split}) - {report.n_users} usuários"]
    lines.extend(_table(report, report.ks))
    for group in report.groups:
        lines.append("")
        lines.append(f"Grupo {group.label} - {group.n_users} usuários")
        lines.extend(_table(group, report.ks))
    return "\n".join(lines) + "\n"


def report_rows(report: EvalReport) -> List[Tuple[str, int, str, float]]:
    rows = []
    blocks: List[Tuple[str, MetricSet]] = [(OVERALL, report)]
    blocks.extend((g.label, g) for g in report.groups)
    for label, metrics in blocks:
        for k in report.ks:
            rows.append(("recall", k, label, metrics.recall[k]))
            rows.append(("ndcg", k, label, metrics.ndcg[k]))
        rows.append(("n_users", 0, label, float(metrics.n_users)))
    return rows


def write_report(report: EvalReport, path: Union[str, Path]) -> Path:
    """Grava o TSV atomicamente; a primeira linha é `# config=<json>`."""
    config: Dict = report.config or {}
    lines = [f"# config={json.dumps(config, sort_keys=True, separators=(',', ':'))}"]
    lines.append("metric\tk\tgroup\tvalue")
    lines.extend(f"{metric}\t{k}\t{group}\t{value:.6f}" for metric, k, group, value in report_rows(report))
    return atomic_write_text(path, "\n".join(lines) + "\n")


def read_report(path: Union[str, Path]) -> Dict[Tuple[str, int, str], float]:
    """Lê o TSV de volta como {(métrica, k, grupo): valor}."""
    values = {}
    for line in Path(path).read_text(encoding="utf-8").splitlines():
        if not line or line.startswith("#") or line.startswith("metric\t"):
            continue
        metric, k, group, value = line.split("\t")
        values[(metric, int(k), group)] = float(value)
    return values
