"""
Modelos de configuração do BGCN.

Define os parâmetros de treino, split, geração sintética e as chaves de
ablação usadas pela CLI e pelos jobs.
"""

from enum import Enum
from typing import Any, Dict, List, Set, Tuple

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator


def _split_commas(value: Any) -> Any:
    """Aceita '20,40,80' vindo do arquivo key=value."""
    if isinstance(value, str):
        return [part.strip() for part in value.split(",") if part.strip()]
    return value


class ModelKind(str, Enum):
    """Modelo treinado."""
    BGCN = "bgcn"
    MFBPR = "mfbpr"


class B2BMode(str, Enum):
    """Propagação bundle-item-bundle no nível de bundle."""
    NONE = "none"
    UNWEIGHTED = "unweighted"
    WEIGHTED = "weighted"


class OverlapMeasure(str, Enum):
    """Intensidade de sobreposição antes da normalização por linha."""
    COUNT = "count"
    JACCARD = "jaccard"


class HardFamily(str, Enum):
    """Famílias de candidatos a negativo difícil."""
    ITEM = "item"
    BUNDLE = "bundle"


class AblationSwitches(BaseModel):
    """Chaves de ablação da propagação em dois níveis."""

    model_config = ConfigDict(frozen=True)

    item_level: bool = Field(True, description="Propagação no nível de item")
    bundle_level: bool = Field(True, description="Propagação no nível de bundle")
    b2b_mode: B2BMode = Field(B2BMode.WEIGHTED, description="Modo da propagação B2B")

    @model_validator(mode="after")
    def check_one_level(self) -> "AblationSwitches":
        if not (self.item_level or self.bundle_level):
            raise ValueError("pelo menos um nível (item ou bundle) precisa estar ativo")
        return self

    @classmethod
    def all_combinations(cls) -> List["AblationSwitches"]:
        """As 9 combinações válidas (3 níveis x 3 modos B2B)."""
        levels = [(True, True), (True, False), (False, True)]
        return [
            cls(item_level=item, bundle_level=bundle, b2b_mode=mode)
            for item, bundle in levels
            for mode in B2BMode
        ]

    def label(self) -> str:
        levels = "+".join(
            name for name, on in (("item", self.item_level), ("bundle", self.bundle_level)) if on
        )
        return f"{levels}/{self.b2b_mode.value}"

    @classmethod
    def from_label(cls, label: str) -> "AblationSwitches":
        """Inverso de `label`, ex: 'item+bundle/weighted'."""
        levels, _, mode = label.strip().partition("/")
        names = {part for part in levels.split("+") if part}
        if not names or names - {"item", "bundle"}:
            raise ValueError(f"níveis inválidos em {label!r}")
        return cls(
            item_level="item" in names,
            bundle_level="bundle" in names,
            b2b_mode=B2BMode(mode or B2BMode.WEIGHTED.value),
        )


class TrainConfig(BaseModel):
    """
    Configuração completa de uma execução de treino.

    Os padrões seguem a grade de hiperparâmetros usada para os datasets
    Netease/Youshu (batch 2048, embedding 64, Adam).
    """

    model_config = ConfigDict(extra="forbid", use_enum_values=False)

    model: ModelKind = Field(ModelKind.BGCN, description="Modelo: bgcn ou mfbpr")

    lr: float = Field(1e-3, gt=0, description="Taxa de aprendizado do Adam", examples=[3e-4])
    reg_lambda: float = Field(1e-4, ge=0, description="Peso da regularização L2 sobre todo Θ")
    batch_size: int = Field(2048, ge=1, description="Tamanho do mini-batch")
    embedding_size: int = Field(64, ge=1, description="Dimensão d dos embeddings")
    n_layers: int = Field(2, ge=0, description="Número de camadas L de propagação")

    message_dropout: float = Field(0.0, ge=0, lt=1, description="Dropout de mensagem")
    node_dropout: float = Field(0.0, ge=0, lt=1, description="Dropout de nó (por época)")
    leaky_slope: float = Field(0.01, ge=0, le=1, description="Inclinação da LeakyReLU")

    p_hard: float = Field(0.8, ge=0, le=1, description="Probabilidade de negativo difícil na fase 2")
    tau: float = Field(0.5, gt=0, le=1, description="Cobertura mínima de itens para candidato")
    min_overlap: int = Field(1, ge=1, description="Itens compartilhados mínimos para candidato")
    hard_families: Set[HardFamily] = Field(
        default_factory=lambda: {HardFamily.ITEM, HardFamily.BUNDLE},
        description="Famílias de candidatos difíceis",
    )

    patience: int = Field(5, ge=1, description="Avaliações sem melhora até a convergência")
    min_epochs: int = Field(0, ge=0, description="Épocas antes de a paciência começar a contar")
    max_epochs: int = Field(100, ge=0, description="Limite de épocas")
    eval_every: int = Field(1, ge=1, description="Avaliar a cada N épocas")
    early_stop_k: int = Field(20, ge=1, description="K do Recall@K usado na convergência")
    ks: List[int] = Field(default_factory=lambda: [20, 40, 80], description="Ks reportados")

    seed: int = Field(2020, description="Semente do treino")

    item_level: bool = Field(True, description="Propagação no nível de item")
    bundle_level: bool = Field(True, description="Propagação no nível de bundle")
    b2b_mode: B2BMode = Field(B2BMode.WEIGHTED, description="Modo da propagação B2B")
    overlap_measure: OverlapMeasure = Field(OverlapMeasure.COUNT, description="Medida de sobreposição")

    split_ratios: Tuple[float, float, float] = Field(
        (0.7, 0.1, 0.2), description="Proporções treino/validação/teste"
    )
    split_seed: int = Field(2020, description="Semente do split por usuário")
    group_boundaries: List[int] = Field(
        default_factory=lambda: [4, 16], description="Fronteiras dos grupos de esparsidade"
    )

    split_comma_lists = field_validator(
        "ks", "group_boundaries", "hard_families", "split_ratios", mode="before"
    )(_split_commas)

    @field_validator("ks")
    @classmethod
    def check_ks(cls, value: List[int]) -> List[int]:
        if not value or any(k < 1 for k in value):
            raise ValueError("ks precisa de valores >= 1")
        return sorted(set(value))

    @field_validator("group_boundaries")
    @classmethod
    def check_boundaries(cls, value: List[int]) -> List[int]:
        if any(b <= a for a, b in zip(value, value[1:])):
            raise ValueError("fronteiras precisam ser estritamente crescentes")
        return value

    @field_validator("split_ratios")
    @classmethod
    def check_ratios(cls, value: Tuple[float, float, float]) -> Tuple[float, float, float]:
        if any(r < 0 for r in value) or abs(sum(value) - 1.0) > 1e-9:
            raise ValueError("proporções precisam ser >= 0 e somar 1")
        return value

    @model_validator(mode="after")
    def check_one_level(self) -> "TrainConfig":
        if not (self.item_level or self.bundle_level):
            raise ValueError("pelo menos um nível (item ou bundle) precisa estar ativo")
        return self

    @property
    def switches(self) -> AblationSwitches:
        return AblationSwitches(
            item_level=self.item_level, bundle_level=self.bundle_level, b2b_mode=self.b2b_mode
        )

    @property
    def split_spec(self) -> "SplitSpec":
        return SplitSpec(ratios=self.split_ratios, seed=self.split_seed)

    @property
    def hard_enabled(self) -> bool:
        return self.model == ModelKind.BGCN and self.p_hard > 0 and bool(self.hard_families)

    def echo(self) -> Dict[str, Any]:
        """Config resolvida em forma canônica (chaves ordenadas, valores JSON)."""
        data = self.model_dump(mode="json")
        data["hard_families"] = sorted(data["hard_families"])
        return dict(sorted(data.items()))


# Nomes das linhas da tabela de ablação, aceitos literalmente em --ablation
ABLATION_PRESETS: Dict[str, Dict[str, Any]] = {
    "ib-levels": {"item_level": True, "bundle_level": True},
    "item-level": {"item_level": True, "bundle_level": False},
    "bundle-level": {"item_level": False, "bundle_level": True},
    "no-b2b": {"b2b_mode": B2BMode.NONE},
    "unweighted-b2b": {"b2b_mode": B2BMode.UNWEIGHTED},
    "weighted-b2b": {"b2b_mode": B2BMode.WEIGHTED},
    "no-hard": {"p_hard": 0.0},
    "hard-item": {"hard_families": {HardFamily.ITEM}},
    "hard-bundle": {"hard_families": {HardFamily.BUNDLE}},
    "hard-both": {"hard_families": {HardFamily.ITEM, HardFamily.BUNDLE}},
    "mfbpr": {"model": ModelKind.MFBPR},
}


class SplitSpec(BaseModel):
    """Split por usuário dos pares usuário-bundle."""

    model_config = ConfigDict(frozen=True)

    ratios: Tuple[float, float, float] = Field((0.7, 0.1, 0.2), description="treino/val/teste")
    seed: int = Field(2020, description="Semente do embaralhamento por usuário")
    min_interactions: int = Field(3, ge=1, description="Abaixo disso tudo vai para treino")

    @field_validator("ratios")
    @classmethod
    def check_ratios(cls, value: Tuple[float, float, float]) -> Tuple[float, float, float]:
        if any(r < 0 for r in value) or abs(sum(value) - 1.0) > 1e-9:
            raise ValueError("proporções precisam ser >= 0 e somar 1")
        return value


class SynthSpec(BaseModel):
    """
    Especificação do gerador sintético com estrutura plantada.

    noise mistura a afinidade verdadeira (padronizada) com ruído Gumbel:
    0 reproduz exatamente o top por afinidade, perto de 1 é quase aleatório.
    """

    model_config = ConfigDict(extra="forbid")

    n_users: int = Field(200, ge=1, description="M")
    n_bundles: int = Field(100, ge=1, description="N")
    n_items: int = Field(500, ge=1, description="O")
    latent_dim: int = Field(8, ge=1, description="Dimensão k dos fatores latentes")
    items_per_bundle: Tuple[int, int] = Field((5, 15), description="Faixa de itens por bundle")
    items_per_user: Tuple[int, int] = Field((10, 30), description="Faixa de interações usuário-item")
    bundles_per_user: Tuple[int, int] = Field((5, 15), description="Faixa de interações usuário-bundle")
    theme_temperature: float = Field(1.0, gt=0, description="Temperatura da escolha temática de itens")
    bundle_signal: float = Field(
        0.5, ge=0, le=1, description="Peso da preferência pelo bundle como um todo na afinidade"
    )
    noise: float = Field(0.1, ge=0, lt=1, description="Taxa de ruído")
    seed: int = Field(7, description="Semente")

    split_comma_ranges = field_validator(
        "items_per_bundle", "items_per_user", "bundles_per_user", mode="before"
    )(_split_commas)

    @field_validator("items_per_bundle", "items_per_user", "bundles_per_user")
    @classmethod
    def check_range(cls, value: Tuple[int, int]) -> Tuple[int, int]:
        low, high = value
        if low < 1 or high < low:
            raise ValueError("faixa inválida: precisa de 1 <= min <= max")
        return value

    @model_validator(mode="after")
    def check_fits(self) -> "SynthSpec":
        if self.items_per_bundle[1] > self.n_items:
            raise ValueError("items_per_bundle excede n_items")
        if self.items_per_user[1] > self.n_items:
            raise ValueError("items_per_user excede n_items")
        if self.bundles_per_user[1] > self.n_bundles:
            raise ValueError("bundles_per_user excede n_bundles")
        return self
