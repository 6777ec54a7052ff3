"""
Configuração de logging do BGCN.

Console em texto (mesmo formato da API original) ou JSON via
python-json-logger; o log de treino em arquivo é sempre JSON por linha.
"""

import logging
import sys
from typing import Any, Dict, Iterable, List

from pythonjsonlogger import jsonlogger

TEXT_FORMAT = "%(asctime)s - %(name)s - %(levelname)s - %(message)s"

# Sem asctime: duas execuções idênticas precisam gerar bytes idênticos
RECORD_FORMAT = "%(message)s"


def setup_logging(level: str = "INFO", json: bool = False) -> None:
    """
    Configura o logger raiz uma única vez.

    Args:
        level: nível do logging (DEBUG, INFO, ...)
        json: se True, usa JsonFormatter no console
    """
    root = logging.getLogger()
    for handler in list(root.handlers):
        root.removeHandler(handler)

    handler = logging.StreamHandler(sys.stderr)
    if json:
        handler.setFormatter(jsonlogger.JsonFormatter(TEXT_FORMAT))
    else:
        handler.setFormatter(logging.Formatter(TEXT_FORMAT))

    root.addHandler(handler)
    root.setLevel(level.upper())


def render_records(records: Iterable[Dict[str, Any]], name: str = "bgcn.training") -> List[str]:
    """
    Renderiza registros estruturados como linhas JSON.

    Cada registro vira um LogRecord cujo `message` é o campo `kind`;
    os demais campos entram como extras.
    """
    formatter = jsonlogger.JsonFormatter(RECORD_FORMAT)
    lines = []
    for record in records:
        fields = dict(record)
        message = str(fields.pop("kind", "record"))
        log_record = logging.makeLogRecord(
            {"name": name, "levelno": logging.INFO, "levelname": "INFO", "msg": message, **fields}
        )
        lines.append(formatter.format(log_record))
    return lines
