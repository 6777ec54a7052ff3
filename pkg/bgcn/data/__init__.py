"""Ingestão de datasets, split e geração sintética."""

from .loader import Dataset, load_dataset, save_dataset
from .split import DatasetSplit, split
from .synth import SyntheticDataset, load_affinity, save_synthetic, synth_generate

__all__ = [
    "Dataset",
    "load_dataset",
    "save_dataset",
    "DatasetSplit",
    "split",
    "SyntheticDataset",
    "load_affinity",
    "save_synthetic",
    "synth_generate",
]
