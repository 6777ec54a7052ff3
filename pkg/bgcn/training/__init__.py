"""Treino BPR: amostragem uniforme e de negativos difíceis, loop em duas fases."""

from ..core.loss import bpr_loss
from .sampling import (
    HardCandidateIndex,
    TrainTriple,
    TripleBatch,
    UniformSampler,
    build_hard_index,
    sample_hard,
    sample_hard_batch,
    sample_uniform_batch,
)
from .trainer import TrainResult, train

__all__ = [
    "bpr_loss",
    "HardCandidateIndex",
    "TrainTriple",
    "TripleBatch",
    "UniformSampler",
    "build_hard_index",
    "sample_hard",
    "sample_hard_batch",
    "sample_uniform_batch",
    "TrainResult",
    "train",
]
