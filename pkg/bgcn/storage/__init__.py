"""Persistência: checkpoints binários e escrita atômica."""

from .checkpoint_manager import (
    Checkpoint,
    CheckpointManager,
    decode_checkpoint,
    encode_checkpoint,
    load_checkpoint,
    save_checkpoint,
)
from .files import atomic_save_npy, atomic_write_bytes, atomic_write_text

__all__ = [
    "Checkpoint",
    "CheckpointManager",
    "decode_checkpoint",
    "encode_checkpoint",
    "load_checkpoint",
    "save_checkpoint",
    "atomic_save_npy",
    "atomic_write_bytes",
    "atomic_write_text",
]
