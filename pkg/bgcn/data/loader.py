"""
Leitura e escrita de datasets no formato de três arquivos de pares.

Diretório:
    sizes.txt        "M N O" (usuários, bundles, itens)
    user_bundle.txt  "u<TAB>b" por linha
    user_item.txt    "u<TAB>i" por linha
    bundle_item.txt  "b<TAB>i" por linha

Ids são inteiros base zero, densos em [0, contagem).
"""

import hashlib
import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, Optional, Tuple, Union

import numpy as np

from ..errors import LoadError
from ..graph.tripartite import TripartiteGraph, build_graph
from ..storage.files import atomic_write_text

logger = logging.getLogger(__name__)

SIZES_FILE = "sizes.txt"
UB_FILE = "user_bundle.txt"
UI_FILE = "user_item.txt"
BI_FILE = "bundle_item.txt"


@dataclass(frozen=True)
class Dataset:
    """
    Dataset imutável: contagens, as três listas de pares (ordenadas e sem
    repetição) e a proveniência dos arquivos lidos.
    """

    n_users: int
    n_bundles: int
    n_items: int
    ub: np.ndarray
    ui: np.ndarray
    bi: np.ndarray
    provenance: Dict[str, str] = field(default_factory=dict)
    duplicates: int = 0

    @property
    def avg_items_per_bundle(self) -> float:
        return len(self.bi) / self.n_bundles

    def stats_line(self) -> str:
        return (
            f"#U={self.n_users} #I={self.n_items} #B={self.n_bundles} "
            f"#U-I={len(self.ui)} #U-B={len(self.ub)} AvgI/B={self.avg_items_per_bundle:.2f}"
        )

    def graph(self, ub: Optional[np.ndarray] = None) -> TripartiteGraph:
        """Grafo com `ub` no lugar dos pares usuário-bundle (ex: só treino)."""
        return build_graph(
            self.ub if ub is None else ub,
            self.ui,
            self.bi,
            self.n_users,
            self.n_bundles,
            self.n_items,
        )


def _sha256(path: Path) -> str:
    return hashlib.sha256(path.read_bytes()).hexdigest()


def _read_sizes(path: Path) -> Tuple[int, int, int]:
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as e:
        raise LoadError(f"{path}: arquivo ausente ou ilegível ({e.strerror})") from e
    lines = [(n, line) for n, line in enumerate(text.splitlines(), 1) if line.strip()]
    if len(lines) != 1:
        raise LoadError(f"{path}: esperado uma linha 'M N O'")
    lineno, line = lines[0]
    parts = line.split()
    try:
        sizes = tuple(int(p) for p in parts)
    except ValueError:
        sizes = ()
    if len(sizes) != 3 or min(sizes) <= 0:
        raise LoadError(f"{path}:{lineno}: esperado três inteiros positivos 'M N O', recebido {line!r}")
    return sizes  # type: ignore[return-value]


def _read_pairs(path: Path, n_rows: int, n_cols: int) -> Tuple[np.ndarray, int]:
    """
    Lê pares de inteiros, valida intervalo e remove duplicatas.

    Returns:
        (pares ordenados k x 2, nº de duplicatas removidas)
    """
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as e:
        raise LoadError(f"{path}: arquivo ausente ou ilegível ({e.strerror})") from e

    pairs = []
    for lineno, line in enumerate(text.splitlines(), 1):
        if not line.strip():
            continue
        parts = line.split()
        if len(parts) != 2:
            raise LoadError(f"{path}:{lineno}: esperado dois inteiros, recebido {line!r}")
        try:
            row, col = int(parts[0]), int(parts[1])
        except ValueError:
            raise LoadError(f"{path}:{lineno}: esperado dois inteiros, recebido {line!r}") from None
        if not 0 <= row < n_rows:
            raise LoadError(f"{path}:{lineno}: id {row} fora de [0, {n_rows})")
        if not 0 <= col < n_cols:
            raise LoadError(f"{path}:{lineno}: id {col} fora de [0, {n_cols})")
        pairs.append((row, col))

    if not pairs:
        return np.zeros((0, 2), dtype=np.int64), 0
    arr = np.asarray(pairs, dtype=np.int64)
    unique = np.unique(arr, axis=0)
    return unique, len(arr) - len(unique)


def load_dataset(directory: Union[str, Path]) -> Dataset:
    """
    Carrega e valida um diretório de dataset.

    Raises:
        LoadError: arquivo ausente, linha malformada, id fora do intervalo
            ou bundle sem itens (sempre com arquivo:linha quando houver)
    """
    directory = Path(directory)
    if not directory.is_dir():
        raise LoadError(f"{directory}: diretório de dataset não encontrado")

    n_users, n_bundles, n_items = _read_sizes(directory / SIZES_FILE)
    ub, dup_ub = _read_pairs(directory / UB_FILE, n_users, n_bundles)
    ui, dup_ui = _read_pairs(directory / UI_FILE, n_users, n_items)
    bi, dup_bi = _read_pairs(directory / BI_FILE, n_bundles, n_items)

    covered = np.zeros(n_bundles, dtype=bool)
    covered[bi[:, 0]] = True
    if not covered.all():
        empty = int(np.flatnonzero(~covered)[0])
        raise LoadError(f"{directory / BI_FILE}: bundle {empty} sem itens")

    duplicates = dup_ub + dup_ui + dup_bi
    if duplicates:
        logger.warning(
            f"⚠️ {duplicates} pares duplicados ignorados "
            f"(user_bundle={dup_ub}, user_item={dup_ui}, bundle_item={dup_bi})"
        )

    provenance = {
        name: _sha256(directory / name) for name in (SIZES_FILE, UB_FILE, UI_FILE, BI_FILE)
    }
    provenance["path"] = str(directory.resolve())

    dataset = Dataset(
        n_users=n_users,
        n_bundles=n_bundles,
        n_items=n_items,
        ub=ub,
        ui=ui,
        bi=bi,
        provenance=provenance,
        duplicates=duplicates,
    )
    logger.info(dataset.stats_line())
    return dataset


def _pairs_text(pairs: np.ndarray) -> str:
    return "".join(f"{int(a)}\t{int(b)}\n" for a, b in pairs)


def save_dataset(dataset: Dataset, directory: Union[str, Path]) -> Path:
    """Grava os quatro arquivos do formato, cada um atomicamente."""
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    atomic_write_text(directory / SIZES_FILE, f"{dataset.n_users} {dataset.n_bundles} {dataset.n_items}\n")
    atomic_write_text(directory / UB_FILE, _pairs_text(dataset.ub))
    atomic_write_text(directory / UI_FILE, _pairs_text(dataset.ui))
    atomic_write_text(directory / BI_FILE, _pairs_text(dataset.bi))
    logger.info(f"Dataset salvo em {directory}: {dataset.stats_line()}")
    return directory
