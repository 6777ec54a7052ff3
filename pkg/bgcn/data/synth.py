"""
Gerador sintético com estrutura plantada.

Usuários e itens recebem fatores latentes normais; cada bundle escolhe
itens de um "tema" (softmax da afinidade item-tema). A afinidade
usuário-bundle mistura dois termos padronizados: o produto interno com a
média dos fatores dos itens do bundle e, com peso `bundle_signal`, uma
preferência pelo bundle como um todo (fatores próprios de usuário e bundle,
invisíveis nas interações usuário-item). Positivos são o top por afinidade padronizada misturada com ruído
Gumbel: noise=0 reproduz exatamente o top verdadeiro.
"""

import logging
from dataclasses import dataclass
from pathlib import Path
from typing import Tuple, Union

import numpy as np
from scipy.special import softmax

from ..models.config import SynthSpec
from ..storage.files import atomic_save_npy
from .loader import Dataset, save_dataset

logger = logging.getLogger(__name__)

AFFINITY_FILE = "affinity.npy"


@dataclass(frozen=True)
class SyntheticDataset:
    """Dataset gerado e a tabela M x N de afinidades verdadeiras (oráculo)."""

    dataset: Dataset
    affinity: np.ndarray


def _standardize(x: np.ndarray) -> np.ndarray:
    std = x.std()
    return (x - x.mean()) / std if std > 0 else x - x.mean()


def _noisy_top(affinity: np.ndarray, count: int, noise: float, rng: np.random.Generator) -> np.ndarray:
    gumbel = rng.gumbel(size=affinity.shape)
    mixed = (1.0 - noise) * _standardize(affinity) + noise * gumbel
    order = np.argsort(-mixed, kind="stable")
    return np.sort(order[:count])


def _draw(rng: np.random.Generator, bounds: Tuple[int, int]) -> int:
    low, high = bounds
    return int(rng.integers(low, high + 1))


def synth_generate(spec: SynthSpec) -> SyntheticDataset:
    """Gera um dataset determinístico por `spec.seed`."""
    rng = np.random.default_rng(spec.seed)
    user_factors = rng.normal(size=(spec.n_users, spec.latent_dim))
    item_factors = rng.normal(size=(spec.n_items, spec.latent_dim))
    themes = rng.normal(size=(spec.n_bundles, spec.latent_dim))

    bi_pairs = []
    bundle_factors = np.zeros((spec.n_bundles, spec.latent_dim))
    for bundle in range(spec.n_bundles):
        size = _draw(rng, spec.items_per_bundle)
        probs = softmax(item_factors @ themes[bundle] / spec.theme_temperature)
        # sem zeros exatos, senão choice sem reposição pode falhar
        probs = probs + 1e-12
        probs /= probs.sum()
        items = np.sort(rng.choice(spec.n_items, size=size, replace=False, p=probs))
        bi_pairs.extend((bundle, int(i)) for i in items)
        bundle_factors[bundle] = item_factors[items].mean(axis=0)

    # fatores próprios num gerador separado: bundle_signal=0 reproduz o dataset só de itens
    own_rng = np.random.default_rng([spec.seed, 1])
    user_own = own_rng.normal(size=(spec.n_users, spec.latent_dim))
    bundle_own = own_rng.normal(size=(spec.n_bundles, spec.latent_dim))

    ui_affinity = user_factors @ item_factors.T
    affinity = (1.0 - spec.bundle_signal) * _standardize(user_factors @ bundle_factors.T)
    if spec.bundle_signal > 0:
        affinity = affinity + spec.bundle_signal * _standardize(user_own @ bundle_own.T)

    ui_pairs, ub_pairs = [], []
    for user in range(spec.n_users):
        items = _noisy_top(ui_affinity[user], _draw(rng, spec.items_per_user), spec.noise, rng)
        ui_pairs.extend((user, int(i)) for i in items)
        bundles = _noisy_top(affinity[user], _draw(rng, spec.bundles_per_user), spec.noise, rng)
        ub_pairs.extend((user, int(b)) for b in bundles)

    dataset = Dataset(
        n_users=spec.n_users,
        n_bundles=spec.n_bundles,
        n_items=spec.n_items,
        ub=np.asarray(ub_pairs, dtype=np.int64).reshape(-1, 2),
        ui=np.asarray(ui_pairs, dtype=np.int64).reshape(-1, 2),
        bi=np.asarray(bi_pairs, dtype=np.int64).reshape(-1, 2),
        provenance={"synth_seed": str(spec.seed)},
    )
    logger.info(f"Dataset sintético (seed={spec.seed}, noise={spec.noise}): {dataset.stats_line()}")
    return SyntheticDataset(dataset=dataset, affinity=affinity)


def save_synthetic(synthetic: SyntheticDataset, directory: Union[str, Path]) -> Path:
    """Grava o dataset no formato padrão e a afinidade em `affinity.npy`."""
    directory = save_dataset(synthetic.dataset, directory)
    atomic_save_npy(Path(directory) / AFFINITY_FILE, synthetic.affinity)
    return directory


def load_affinity(directory: Union[str, Path]) -> np.ndarray:
    return np.load(Path(directory) / AFFINITY_FILE, allow_pickle=False)
