"""
Checkpoint binário do BGCN.

Formato (little-endian):
    "BGCN" | uint32 versão | uint32 nº de tensores
    por tensor: uint16 tam. nome | nome utf-8 | uint8 ndim | uint32 x ndim | float32 x n
    uint32 tam. config | config JSON (chaves ordenadas)

A serialização é canônica: salvar o que foi carregado gera os mesmos bytes.
"""

import json
import logging
import struct
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Dict, Optional, Union

import numpy as np

from ..errors import CheckpointError
from .files import atomic_write_bytes

logger = logging.getLogger(__name__)

MAGIC = b"BGCN"
FORMAT_VERSION = 1

_HEADER = struct.Struct("<4sII")
_U8 = struct.Struct("<B")
_U16 = struct.Struct("<H")
_U32 = struct.Struct("<I")


@dataclass
class Checkpoint:
    """Tensores (float64 em memória) e o eco da config que os gerou."""

    tensors: Dict[str, np.ndarray]
    config: Dict[str, Any]


def encode_checkpoint(tensors: Dict[str, np.ndarray], config: Dict[str, Any]) -> bytes:
    parts = [_HEADER.pack(MAGIC, FORMAT_VERSION, len(tensors))]
    for name, tensor in tensors.items():
        raw_name = name.encode("utf-8")
        arr = np.ascontiguousarray(tensor, dtype="<f4")
        parts.append(_U16.pack(len(raw_name)))
        parts.append(raw_name)
        parts.append(_U8.pack(arr.ndim))
        parts.append(struct.pack(f"<{arr.ndim}I", *arr.shape))
        parts.append(arr.tobytes())
    raw_config = json.dumps(config, sort_keys=True, separators=(",", ":")).encode("utf-8")
    parts.append(_U32.pack(len(raw_config)))
    parts.append(raw_config)
    return b"".join(parts)


class _Reader:
    def __init__(self, data: bytes, source: str):
        self.data = data
        self.pos = 0
        self.source = source

    def take(self, n: int) -> bytes:
        if self.pos + n > len(self.data):
            raise CheckpointError(f"{self.source}: arquivo truncado no byte {self.pos}")
        chunk = self.data[self.pos:self.pos + n]
        self.pos += n
        return chunk

    def unpack(self, fmt: struct.Struct):
        return fmt.unpack(self.take(fmt.size))


def decode_checkpoint(data: bytes, source: str = "<bytes>") -> Checkpoint:
    reader = _Reader(data, source)
    magic, version, count = reader.unpack(_HEADER)
    if magic != MAGIC:
        raise CheckpointError(f"{source}: magic inválido {magic!r}")
    if version != FORMAT_VERSION:
        raise CheckpointError(f"{source}: versão {version} não suportada (esperado {FORMAT_VERSION})")

    tensors: Dict[str, np.ndarray] = {}
    for _ in range(count):
        (name_len,) = reader.unpack(_U16)
        try:
            name = reader.take(name_len).decode("utf-8")
        except UnicodeDecodeError as e:
            raise CheckpointError(f"{source}: nome de tensor inválido") from e
        (ndim,) = reader.unpack(_U8)
        shape = struct.unpack(f"<{ndim}I", reader.take(4 * ndim))
        size = int(np.prod(shape, dtype=np.int64))
        values = np.frombuffer(reader.take(4 * size), dtype="<f4")
        if name in tensors:
            raise CheckpointError(f"{source}: tensor '{name}' repetido")
        tensors[name] = values.astype(np.float64).reshape(shape)

    (config_len,) = reader.unpack(_U32)
    try:
        config = json.loads(reader.take(config_len).decode("utf-8"))
    except ValueError as e:
        raise CheckpointError(f"{source}: eco de config ilegível") from e
    if reader.pos != len(data):
        raise CheckpointError(f"{source}: {len(data) - reader.pos} bytes sobrando após o checkpoint")
    return Checkpoint(tensors=tensors, config=config)


def save_checkpoint(tensors: Dict[str, np.ndarray], config: Dict[str, Any], path: Union[str, Path]) -> Path:
    """Grava o checkpoint atomicamente."""
    data = encode_checkpoint(tensors, config)
    path = atomic_write_bytes(path, data)
    logger.info(f"Checkpoint salvo em {path} ({len(tensors)} tensores, {len(data)} bytes)")
    return path


def load_checkpoint(path: Union[str, Path]) -> Checkpoint:
    path = Path(path)
    try:
        data = path.read_bytes()
    except OSError as e:
        raise CheckpointError(f"Não foi possível ler {path}: {e}") from e
    checkpoint = decode_checkpoint(data, str(path))
    logger.info(f"Checkpoint carregado de {path} ({len(checkpoint.tensors)} tensores)")
    return checkpoint


class CheckpointManager:
    """
    Diretório de checkpoints nomeados (ex: um por variante/semente no
    estudo de ablação).
    """

    def __init__(self, root: Union[str, Path]):
        self.root = Path(root)
        self.root.mkdir(parents=True, exist_ok=True)

    def path_for(self, name: str) -> Path:
        return self.root / f"{name}.ckpt"

    def exists(self, name: str) -> bool:
        return self.path_for(name).exists()

    def save(self, name: str, tensors: Dict[str, np.ndarray], config: Dict[str, Any]) -> Path:
        return save_checkpoint(tensors, config, self.path_for(name))

    def load(self, name: str) -> Optional[Checkpoint]:
        """Carrega o checkpoint `name`; None se não existir."""
        path = self.path_for(name)
        if not path.exists():
            logger.info(f"Checkpoint '{name}' não encontrado em {self.root}")
            return None
        return load_checkpoint(path)
