"""
Configuração do processo e resolução da config de treino.

Settings vem de variáveis BGCN_* (e de um .env opcional); a config de
treino é resolvida em camadas: padrões < arquivo key=value < flags <
presets de --ablation.
"""

import logging
from functools import lru_cache
from pathlib import Path
from typing import Any, Dict, Iterable, Mapping, Optional, Type, TypeVar

from pydantic import BaseModel, ValidationError
from pydantic_settings import BaseSettings, SettingsConfigDict

from .errors import ConfigError
from .models.config import ABLATION_PRESETS, TrainConfig

logger = logging.getLogger(__name__)

ModelT = TypeVar("ModelT", bound=BaseModel)


class Settings(BaseSettings):
    """Configuração de ambiente (não afeta resultados numéricos)."""

    model_config = SettingsConfigDict(env_prefix="BGCN_", env_file=".env", extra="ignore")

    log_level: str = "INFO"
    log_json: bool = False
    checked: bool = False
    threads: int = 1
    progress: bool = True


@lru_cache()
def get_settings() -> Settings:
    """Retorna instância única de Settings."""
    return Settings()


def parse_kv_file(path: Path) -> Dict[str, str]:
    """
    Lê um arquivo plano key=value.

    Linhas vazias e comentários (#) são ignorados; qualquer outra linha
    sem '=' é erro com arquivo:linha.
    """
    path = Path(path)
    if not path.exists():
        raise ConfigError(f"Arquivo de config não encontrado: {path}")

    values: Dict[str, str] = {}
    with open(path, "r", encoding="utf-8") as f:
        for lineno, raw in enumerate(f, 1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            if "=" not in line:
                raise ConfigError(f"{path}:{lineno}: linha sem '=': {line!r}")
            key, value = line.split("=", 1)
            key = key.strip()
            if not key:
                raise ConfigError(f"{path}:{lineno}: chave vazia")
            values[key] = value.strip()
    return values


def validation_message(exc: ValidationError) -> str:
    """Resumo de uma ValidationError com o nome de cada campo."""
    parts = []
    for error in exc.errors():
        field = ".".join(str(loc) for loc in error.get("loc", ())) or "<config>"
        parts.append(f"{field}: {error.get('msg')}")
    return "; ".join(parts)


def validate_schema(model: Type[ModelT], values: Mapping[str, Any]) -> ModelT:
    """Valida `values` contra `model`, convertendo erros em ConfigError."""
    unknown = set(values) - set(model.model_fields)
    if unknown:
        raise ConfigError(f"Chaves desconhecidas: {', '.join(sorted(unknown))}")
    try:
        return model.model_validate(dict(values))
    except ValidationError as e:
        raise ConfigError(validation_message(e)) from e


def resolve_train_config(
    config_file: Optional[Path] = None,
    overrides: Optional[Mapping[str, Any]] = None,
    ablations: Iterable[str] = (),
) -> TrainConfig:
    """
    Resolve a config de treino.

    Args:
        config_file: arquivo key=value opcional
        overrides: valores vindos de flags (None é ignorado)
        ablations: nomes das linhas de ablação (ex: 'no-b2b', 'hard-item')

    Returns:
        TrainConfig validada.
    """
    values: Dict[str, Any] = {}
    if config_file is not None:
        values.update(parse_kv_file(config_file))
    if overrides:
        values.update({k: v for k, v in overrides.items() if v is not None})

    for name in ablations:
        preset = ABLATION_PRESETS.get(name)
        if preset is None:
            raise ConfigError(
                f"Ablação desconhecida: {name!r} (válidas: {', '.join(sorted(ABLATION_PRESETS))})"
            )
        values.update(preset)

    return validate_schema(TrainConfig, values)
