"""
Parâmetros do BGCN: tabelas de embedding P, Q, R e transformações por camada.

Só os tensores dos níveis ligados existem: sem nível de item não há Q nem
W1/b1; sem nível de bundle não há R nem W2/b2. P é compartilhado.
"""

import logging
from dataclasses import dataclass, field
from typing import Dict, List, Optional

import numpy as np

from ..errors import CheckpointMismatchError, ShapeError
from ..models.config import AblationSwitches

logger = logging.getLogger(__name__)


def glorot_uniform(rows: int, cols: int, rng: np.random.Generator) -> np.ndarray:
    """Uniforme em ±√(6/(fan_in+fan_out)), fan_in = cols, fan_out = rows."""
    bound = np.sqrt(6.0 / (rows + cols))
    return rng.uniform(-bound, bound, size=(rows, cols))


def _layer_count(tensors: Dict[str, np.ndarray], prefix: str) -> int:
    return sum(1 for name in tensors if name.startswith(f"{prefix}."))


@dataclass
class ModelParams:
    """
    Θ do BGCN.

    Convenção de linha: a transformação de uma camada é `z @ W + b`, com
    z = própria representação + agregado. W1/b1 são compartilhados pelas
    atualizações de usuário e item no nível de item; W2/b2 pelas de usuário
    e bundle no nível de bundle.
    """

    users: np.ndarray
    items: Optional[np.ndarray] = None
    bundles: Optional[np.ndarray] = None
    w1: List[np.ndarray] = field(default_factory=list)
    b1: List[np.ndarray] = field(default_factory=list)
    w2: List[np.ndarray] = field(default_factory=list)
    b2: List[np.ndarray] = field(default_factory=list)

    @property
    def d(self) -> int:
        return self.users.shape[1]

    @property
    def n_layers(self) -> int:
        return len(self.w1) if self.has_item_level else len(self.w2)

    @property
    def has_item_level(self) -> bool:
        return self.items is not None

    @property
    def has_bundle_level(self) -> bool:
        return self.bundles is not None

    def named_tensors(self) -> Dict[str, np.ndarray]:
        """Tensores em ordem canônica (a mesma do checkpoint)."""
        tensors = {"P": self.users}
        if self.has_item_level:
            tensors["Q"] = self.items
        if self.has_bundle_level:
            tensors["R"] = self.bundles
        for layer in range(len(self.w1)):
            tensors[f"W1.{layer + 1}"] = self.w1[layer]
            tensors[f"b1.{layer + 1}"] = self.b1[layer]
        for layer in range(len(self.w2)):
            tensors[f"W2.{layer + 1}"] = self.w2[layer]
            tensors[f"b2.{layer + 1}"] = self.b2[layer]
        return tensors

    @classmethod
    def from_tensors(cls, tensors: Dict[str, np.ndarray]) -> "ModelParams":
        n1 = _layer_count(tensors, "W1") if "Q" in tensors else 0
        n2 = _layer_count(tensors, "W2") if "R" in tensors else 0
        try:
            params = cls(
                users=tensors["P"],
                items=tensors.get("Q"),
                bundles=tensors.get("R"),
                w1=[tensors[f"W1.{i}"] for i in range(1, n1 + 1)],
                b1=[tensors[f"b1.{i}"] for i in range(1, n1 + 1)],
                w2=[tensors[f"W2.{i}"] for i in range(1, n2 + 1)],
                b2=[tensors[f"b2.{i}"] for i in range(1, n2 + 1)],
            )
        except KeyError as e:
            raise ShapeError(f"Tensor ausente: {e.args[0]}") from e
        extra = set(tensors) - set(params.named_tensors())
        if extra:
            raise ShapeError(f"Tensores sem nível correspondente: {', '.join(sorted(extra))}")
        params.validate()
        return params

    def validate(self) -> None:
        if not (self.has_item_level or self.has_bundle_level):
            raise ShapeError("Tensor ausente: é preciso Q (nível de item) ou R (nível de bundle)")
        if self.has_item_level and self.has_bundle_level and len(self.w1) != len(self.w2):
            raise ShapeError(f"Níveis com profundidades diferentes: {len(self.w1)} vs {len(self.w2)}")
        d = self.d
        for name, tensor in self.named_tensors().items():
            if name in ("Q", "R") and tensor.shape[1] != d:
                raise ShapeError("P, Q e R precisam da mesma dimensão d")
            expected = (d,) if name.startswith("b") else (d, d)
            if name[0] in "Wb" and tensor.shape != expected:
                raise ShapeError(f"'{name}' com shape {tensor.shape}, esperado {expected}")
            if not np.all(np.isfinite(tensor)):
                raise ShapeError(f"'{name}' contém valores não finitos")

    def check_switches(self, switches: AblationSwitches) -> None:
        """Os níveis ligados em `switches` precisam ter seus tensores."""
        for active, present, name in (
            (switches.item_level, self.has_item_level, "Q"),
            (switches.bundle_level, self.has_bundle_level, "R"),
        ):
            if active and not present:
                raise ShapeError(f"Tensor ausente: {name} (nível ligado em {switches.label()})")

    def check_dims(self, n_users: int, n_bundles: int, n_items: int) -> None:
        """Confere P/Q/R contra as contagens do dataset."""
        for name, tensor, rows in (
            ("P", self.users, n_users),
            ("Q", self.items, n_items),
            ("R", self.bundles, n_bundles),
        ):
            if tensor is not None and tensor.shape[0] != rows:
                raise CheckpointMismatchError(name, (rows, self.d), tensor.shape)

    def copy(self) -> "ModelParams":
        return ModelParams.from_tensors({k: v.copy() for k, v in self.named_tensors().items()})


def init_params(
    n_users: int,
    n_bundles: int,
    n_items: int,
    d: int,
    n_layers: int,
    seed: int,
    switches: Optional[AblationSwitches] = None,
) -> ModelParams:
    """
    Inicialização Glorot uniforme, vieses zerados, determinística por seed.

    A sequência de sorteios não depende de `switches`: um nível desligado
    só descarta seus tensores, e os do nível ligado saem idênticos aos do
    modelo completo com a mesma seed.
    """
    if min(n_users, n_bundles, n_items, d) <= 0 or n_layers < 0:
        raise ValueError("contagens precisam ser > 0")
    switches = switches or AblationSwitches()
    rng = np.random.default_rng(seed)
    users = glorot_uniform(n_users, d, rng)
    items = glorot_uniform(n_items, d, rng)
    bundles = glorot_uniform(n_bundles, d, rng)
    w1 = [glorot_uniform(d, d, rng) for _ in range(n_layers)]
    w2 = [glorot_uniform(d, d, rng) for _ in range(n_layers)]
    item_level, bundle_level = switches.item_level, switches.bundle_level
    return ModelParams(
        users=users,
        items=items if item_level else None,
        bundles=bundles if bundle_level else None,
        w1=w1 if item_level else [],
        b1=[np.zeros(d) for _ in range(n_layers)] if item_level else [],
        w2=w2 if bundle_level else [],
        b2=[np.zeros(d) for _ in range(n_layers)] if bundle_level else [],
    )
