"""
Job de verificação de gradientes.

Compara o backward analítico com diferenças centrais numa instância de
brinquedo (5 usuários, 8 itens, 4 bundles, d=8, L=2) para todas as
combinações de ablação, com máscaras de dropout fixas, e para o MF-BPR.
"""

import logging
import sys
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, List, Optional, Sequence

import numpy as np

# Adicionar diretório raiz ao path
sys.path.insert(0, str(Path(__file__).parent.parent.parent))

from bgcn.core.numeric import finite_diff_grad
from bgcn.engine.backward import backward, bgcn_loss
from bgcn.engine.mf_bpr import init_mf_params, mf_bpr_backward, mf_bpr_loss
from bgcn.engine.params import init_params
from bgcn.engine.propagation import DropoutMasks
from bgcn.graph.overlap import build_overlap
from bgcn.graph.tripartite import TripartiteGraph, build_graph
from bgcn.models.config import AblationSwitches

logger = logging.getLogger(__name__)

TOLERANCE = 1e-4
EPS = 1e-5

TOY_UB = [(0, 0), (0, 1), (1, 1), (1, 2), (2, 0), (2, 3), (3, 2), (4, 3), (4, 1)]
TOY_UI = [
    (0, 0), (0, 1), (0, 2), (1, 2), (1, 3), (1, 4), (2, 0), (2, 5),
    (3, 4), (3, 6), (3, 7), (4, 1), (4, 3), (4, 7),
]
TOY_BI = [(0, 0), (0, 1), (0, 2), (1, 2), (1, 3), (2, 3), (2, 4), (2, 5), (2, 6), (3, 6), (3, 7)]
TOY_TRIPLES = np.array([(0, 0, 2), (1, 1, 0), (2, 3, 1), (3, 2, 3), (4, 1, 2), (0, 1, 3)], dtype=np.int64)


def toy_graph() -> TripartiteGraph:
    return build_graph(TOY_UB, TOY_UI, TOY_BI, n_users=5, n_bundles=4, n_items=8)


def relative_error(analytic: np.ndarray, numeric: np.ndarray) -> float:
    """‖a − n‖∞ / max(‖a‖∞, ‖n‖∞, 1e−8)."""
    diff = float(np.max(np.abs(analytic - numeric))) if analytic.size else 0.0
    scale = max(
        float(np.max(np.abs(analytic))) if analytic.size else 0.0,
        float(np.max(np.abs(numeric))) if numeric.size else 0.0,
        1e-8,
    )
    return diff / scale


@dataclass
class GradcheckResult:
    """Erro relativo máximo por tensor para uma combinação."""

    label: str
    errors: Dict[str, float] = field(default_factory=dict)

    @property
    def max_error(self) -> float:
        return max(self.errors.values()) if self.errors else 0.0

    @property
    def passed(self) -> bool:
        return self.max_error < TOLERANCE


def _check_tensors(label, tensors, analytic, loss_fn, corrupt: bool) -> GradcheckResult:
    result = GradcheckResult(label=label)
    for name, tensor in tensors.items():
        grad = analytic[name]
        if corrupt:
            grad = grad.copy()
            grad.reshape(-1)[0] += 1.0
            corrupt = False
        numeric = finite_diff_grad(loss_fn, tensor, eps=EPS)
        result.errors[name] = relative_error(grad, numeric)
    return result


def check_bgcn(
    switches: AblationSwitches,
    seed: int = 2020,
    d: int = 8,
    n_layers: int = 2,
    reg_lambda: float = 1e-3,
    dropout: float = 0.2,
    corrupt: bool = False,
) -> GradcheckResult:
    graph = toy_graph()
    overlap = build_overlap(graph)
    params = init_params(graph.n_users, graph.n_bundles, graph.n_items, d, n_layers, seed, switches)
    rng = np.random.default_rng(seed)
    # vieses não nulos para exercitar o gradiente de b
    for bias in params.b1 + params.b2:
        bias[:] = rng.normal(scale=0.1, size=bias.shape)
    node = DropoutMasks.sample_nodes(graph, switches, dropout, rng)
    masks = DropoutMasks.sample(graph, switches, n_layers, d, dropout, rng, node=node)
    users, pos, neg = TOY_TRIPLES.T

    _, analytic = backward(graph, overlap, params, switches, users, pos, neg, reg_lambda, masks=masks)

    def loss_fn() -> float:
        return bgcn_loss(graph, overlap, params, switches, users, pos, neg, reg_lambda, masks=masks)

    return _check_tensors(switches.label(), params.named_tensors(), analytic, loss_fn, corrupt)


def check_mfbpr(seed: int = 2020, d: int = 8, reg_lambda: float = 1e-3, corrupt: bool = False) -> GradcheckResult:
    params = init_mf_params(5, 4, d, seed)
    users, pos, neg = TOY_TRIPLES.T
    _, analytic = mf_bpr_backward(params, users, pos, neg, reg_lambda)

    def loss_fn() -> float:
        return mf_bpr_loss(params, users, pos, neg, reg_lambda)

    return _check_tensors("mfbpr", params.named_tensors(), analytic, loss_fn, corrupt)


def run_gradcheck(
    seed: int = 2020,
    switches: Optional[Sequence[AblationSwitches]] = None,
    include_mfbpr: bool = True,
    corrupt: bool = False,
) -> List[GradcheckResult]:
    """
    Roda a suíte inteira.

    Args:
        seed: semente da instância (parâmetros e máscaras)
        switches: combinações a checar (padrão: as 9)
        include_mfbpr: inclui o baseline
        corrupt: adultera um gradiente (controle negativo)
    """
    start = time.perf_counter()
    logger.info("=" * 60)
    logger.info("🔍 Verificação de gradientes (diferenças centrais, eps=1e-5)")
    logger.info("=" * 60)

    combos = list(switches) if switches is not None else AblationSwitches.all_combinations()
    results = [check_bgcn(s, seed=seed, corrupt=corrupt) for s in combos]
    if include_mfbpr:
        results.append(check_mfbpr(seed=seed, corrupt=corrupt))

    for result in results:
        status = "✅" if result.passed else "❌"
        logger.info(f"  {status} {result.label}: erro máximo {result.max_error:.2e}")

    duration = time.perf_counter() - start
    failed = sum(not r.passed for r in results)
    logger.info("=" * 60)
    logger.info(f"  Combinações: {len(results)}  Falhas: {failed}  Duração: {duration:.2f}s")
    logger.info("=" * 60)
    return results


def format_results(results: Sequence[GradcheckResult]) -> str:
    """Uma linha por (combinação, tensor) com o erro relativo."""
    lines = []
    for result in results:
        for name, error in result.errors.items():
            flag = "ok" if error < TOLERANCE else "FALHOU"
            lines.append(f"{result.label}\t{name}\t{error:.3e}\t{flag}")
    return "\n".join(lines) + "\n"


if __name__ == "__main__":
    logging.basicConfig(level=logging.INFO, format="%(asctime)s - %(name)s - %(levelname)s - %(message)s")
    outcome = run_gradcheck()
    sys.exit(0 if all(r.passed for r in outcome) else 1)
