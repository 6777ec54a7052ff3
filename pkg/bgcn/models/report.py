"""
Modelos de relatório: métricas de avaliação e registros do log de treino.
"""

from typing import Any, Dict, List, Optional

from pydantic import BaseModel, Field


class MetricSet(BaseModel):
    """Médias de Recall@K e NDCG@K sobre um conjunto de usuários."""

    n_users: int = Field(..., ge=0, description="Usuários avaliados (com verdade não vazia)")
    recall: Dict[int, float] = Field(default_factory=dict, description="Recall@K por K")
    ndcg: Dict[int, float] = Field(default_factory=dict, description="NDCG@K por K")


class GroupReport(MetricSet):
    """Sub-relatório de um grupo de esparsidade."""

    group: int = Field(..., ge=0, description="Índice do grupo (0 = mais esparso)")
    label: str = Field(..., description="Faixa de interações de treino", examples=["0-3"])


class EvalReport(MetricSet):
    """
    Relatório de avaliação com ranking completo.

    Usuários sem verdade no split avaliado ficam fora das médias.
    """

    ks: List[int] = Field(..., description="Ks avaliados", examples=[[20, 40, 80]])
    split: str = Field("test", description="Split avaliado")
    groups: List[GroupReport] = Field(default_factory=list, description="Quebra por esparsidade")
    config: Optional[Dict[str, Any]] = Field(None, description="Config resolvida (proveniência)")


class TrainingLogRecord(BaseModel):
    """Uma linha do log de treino."""

    kind: str = Field(..., description="config | epoch | eval | switch | summary", examples=["epoch"])
    epoch: Optional[int] = Field(None, description="Época (1-based)")
    phase: Optional[str] = Field(None, description="uniform | hard")
    loss: Optional[float] = Field(None, description="Perda média por tripla na época")
    hard_fraction: Optional[float] = Field(None, description="Fração de negativos difíceis na época")
    recall: Optional[Dict[str, float]] = Field(None, description="Recall@K de validação")
    ndcg: Optional[Dict[str, float]] = Field(None, description="NDCG@K de validação")
    best_epoch: Optional[int] = Field(None, description="Melhor época até aqui")
    switch_epoch: Optional[int] = Field(None, description="Época da troca para negativos difíceis")
    config: Optional[Dict[str, Any]] = Field(None, description="Config resolvida")

    def compact(self) -> Dict[str, Any]:
        """Dict sem campos vazios, pronto para o JsonFormatter."""
        return self.model_dump(exclude_none=True)


class AblationRun(BaseModel):
    """Resultado de teste de uma variante numa semente."""

    variant: str = Field(..., description="Nome da linha de ablação", examples=["no-b2b"])
    seed: int = Field(..., description="Semente do treino")
    recall: float = Field(..., ge=0, le=1, description="Recall@k de teste")
    ndcg: float = Field(..., ge=0, le=1, description="NDCG@k de teste")
    best_epoch: int = Field(0, ge=0, description="Época do melhor snapshot")


class AblationReport(BaseModel):
    """Estudo de ablação: execuções individuais e medianas por variante."""

    k: int = Field(..., ge=1, description="K das métricas")
    runs: List[AblationRun] = Field(default_factory=list)
    median_recall: Dict[str, float] = Field(default_factory=dict, description="Mediana de Recall@k por variante")
    median_ndcg: Dict[str, float] = Field(default_factory=dict, description="Mediana de NDCG@k por variante")
