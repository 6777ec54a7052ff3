"""
Verificações de eficácia no dataset sintético plantado (lentas).

Rodar com: pytest -m slow
"""

import numpy as np
import pytest

from bgcn.data import split, synth_generate
from bgcn.evaluation import evaluate
from bgcn.jobs.ablation import run_ablation_study
from bgcn.models.config import SplitSpec, SynthSpec, TrainConfig

pytestmark = pytest.mark.slow

BASE = TrainConfig(
    embedding_size=32,
    n_layers=2,
    batch_size=128,
    lr=5e-3,
    reg_lambda=1e-4,
    max_epochs=150,
    min_epochs=30,
    patience=10,
    early_stop_k=5,
    ks=[5],
)


class AffinityScorer:
    def __init__(self, affinity):
        self.affinity = affinity

    def score_users(self, users):
        return self.affinity[np.asarray(users)]


@pytest.fixture(scope="module")
def planted():
    return synth_generate(SynthSpec(seed=7))


@pytest.fixture(scope="module")
def study(planted):
    variants = ["ib-levels", "item-level", "bundle-level", "no-b2b", "no-hard", "mfbpr"]
    return run_ablation_study(planted.dataset, BASE, variants, seeds=[1, 2, 3], k=5)


def test_oracle_ranker_recall(planted):
    data_split = split(planted.dataset, SplitSpec(seed=2020))
    report = evaluate(AffinityScorer(planted.affinity), data_split, "test", ks=[10])
    assert report.recall[10] >= 0.9


def test_bgcn_beats_mfbpr(study):
    assert study.median_recall["ib-levels"] >= 1.10 * study.median_recall["mfbpr"]


def test_full_model_beats_weakest_variant(study):
    weakest = min(study.median_recall, key=study.median_recall.get)
    assert weakest != "ib-levels"
    assert study.median_recall["ib-levels"] > study.median_recall[weakest]


def test_levels_ordering(study):
    medians = study.median_recall
    assert medians["ib-levels"] >= medians["bundle-level"] * 0.98
    assert medians["bundle-level"] >= medians["item-level"] * 0.98
    assert medians["ib-levels"] > medians["item-level"]


def test_weighted_b2b_and_hard_negatives_help(study):
    medians = study.median_recall
    assert medians["ib-levels"] >= medians["no-b2b"] * 0.98
    assert medians["ib-levels"] >= medians["no-hard"] * 0.98
