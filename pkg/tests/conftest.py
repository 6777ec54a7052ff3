"""Fixtures compartilhadas da suíte."""

import sys
from pathlib import Path

import numpy as np
import pytest

# Adicionar diretório raiz ao path
sys.path.insert(0, str(Path(__file__).parent.parent))

from bgcn.data.loader import Dataset
from bgcn.data.synth import synth_generate
from bgcn.graph.tripartite import build_graph
from bgcn.jobs.gradcheck import toy_graph as _toy_graph
from bgcn.models.config import SynthSpec


def random_pairs(rng, n_rows, n_cols, density):
    mask = rng.random((n_rows, n_cols)) < density
    rows, cols = np.nonzero(mask)
    return np.column_stack([rows, cols]).astype(np.int64)


def random_instance(seed, max_size=20):
    """Grafo aleatório pequeno; todo bundle tem ao menos um item."""
    rng = np.random.default_rng(seed)
    m, n, o = (int(x) for x in rng.integers(2, max_size + 1, size=3))
    ub = random_pairs(rng, m, n, 0.25)
    ui = random_pairs(rng, m, o, 0.25)
    bi = random_pairs(rng, n, o, 0.2)
    forced = np.column_stack([np.arange(n), rng.integers(0, o, size=n)])
    bi = np.unique(np.concatenate([bi, forced]), axis=0)
    return build_graph(ub, ui, bi, m, n, o)


@pytest.fixture
def toy_graph():
    """5 usuários, 8 itens, 4 bundles."""
    return _toy_graph()


@pytest.fixture
def hand_graph():
    """
    2 usuários, 2 bundles, 3 itens.

    u0: itens {0, 1}, bundle {0}; u1: item {2}, bundles {0, 1}
    b0 = {0, 1, 2}; b1 = {2}
    """
    return build_graph(
        ub_pairs=[(0, 0), (1, 0), (1, 1)],
        ui_pairs=[(0, 0), (0, 1), (1, 2)],
        bi_pairs=[(0, 0), (0, 1), (0, 2), (1, 2)],
        n_users=2,
        n_bundles=2,
        n_items=3,
    )


@pytest.fixture
def small_spec():
    return SynthSpec(
        n_users=60,
        n_bundles=30,
        n_items=120,
        items_per_bundle=(3, 6),
        items_per_user=(5, 10),
        bundles_per_user=(3, 8),
        seed=3,
    )


@pytest.fixture
def small_dataset(small_spec) -> Dataset:
    return synth_generate(small_spec).dataset


@pytest.fixture
def rng():
    return np.random.default_rng(0)
