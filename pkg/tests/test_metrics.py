import math

import numpy as np
import pytest

from bgcn.data import DatasetSplit, split
from bgcn.engine import init_mf_params
from bgcn.evaluation import evaluate, ndcg_at_k, rank_bundles, rank_scores, recall_at_k
from bgcn.models.config import SplitSpec


class FixedScorer:
    """Scores fixos por usuário."""

    def __init__(self, scores):
        self.scores = np.asarray(scores, dtype=np.float64)

    def score_users(self, users):
        return self.scores[np.asarray(users)]


def _pairs(items):
    return np.asarray(items, dtype=np.int64).reshape(-1, 2)


def _slow_ndcg(ranked, truth, k):
    dcg = sum(1.0 / math.log2(pos + 2) for pos, b in enumerate(ranked[:k]) if b in truth)
    idcg = sum(1.0 / math.log2(pos + 2) for pos in range(min(len(truth), k)))
    return dcg / idcg


class TestMetrics:
    def test_hand_values(self):
        ranked = [3, 1, 4, 0, 2]
        assert recall_at_k(ranked, {1, 2}, 2) == 0.5
        assert recall_at_k(ranked, {1, 2}, 5) == 1.0
        assert ndcg_at_k(ranked, {1, 2}, 2) == pytest.approx((1 / math.log2(3)) / (1 + 1 / math.log2(3)))
        assert ndcg_at_k([1, 2, 0], {1, 2}, 3) == pytest.approx(1.0)

    def test_empty_truth(self):
        with pytest.raises(ValueError):
            recall_at_k([0, 1], set(), 1)
        with pytest.raises(ValueError):
            ndcg_at_k([0, 1], set(), 1)

    def test_k_larger_than_ranking(self):
        assert recall_at_k([0, 1], {1, 5}, 10) == 0.5
        assert ndcg_at_k([1], {1}, 10) == pytest.approx(1.0)

    def test_truth_as_csr_row_slice(self):
        ranked = np.array([1, 4, 0, 2, 3])
        assert recall_at_k(ranked, np.array([1, 4]), 2) == 1.0
        assert recall_at_k(ranked, np.array([0]), 3) == 1.0
        assert ndcg_at_k(np.array([0, 1]), np.array([0]), 1) == pytest.approx(1.0)
        assert ndcg_at_k(ranked, np.array([4, 0, 3]), 5) == pytest.approx(
            _slow_ndcg(ranked.tolist(), {4, 0, 3}, 5)
        )
        with pytest.raises(ValueError):
            recall_at_k(ranked, np.array([], dtype=np.int64), 2)

    @pytest.mark.parametrize("seed", range(5))
    def test_recall_nondecreasing_in_k(self, seed):
        rng = np.random.default_rng(seed)
        ranked = rng.permutation(30)
        truth = rng.choice(30, size=6, replace=False)
        recalls = [recall_at_k(ranked, truth, k) for k in range(1, 31)]
        assert all(a <= b for a, b in zip(recalls, recalls[1:]))
        assert recalls[-1] == 1.0

    @pytest.mark.parametrize("seed", range(20))
    def test_matches_direct_computation(self, seed):
        rng = np.random.default_rng(seed)
        n = int(rng.integers(5, 40))
        ranked = rng.permutation(n).tolist()
        truth = set(rng.choice(n, size=int(rng.integers(1, n)), replace=False).tolist())
        for k in (1, 3, 10, 50):
            hits = sum(1 for b in ranked[:k] if b in truth)
            assert recall_at_k(ranked, truth, k) == pytest.approx(hits / len(truth), abs=1e-12)
            assert ndcg_at_k(ranked, truth, k) == pytest.approx(_slow_ndcg(ranked, truth, k), abs=1e-12)


class TestRanking:
    def test_ties_by_ascending_id(self):
        assert rank_scores([1.0, 2.0, 2.0, 0.0]).tolist() == [1, 2, 0, 3]

    def test_exclusion(self):
        assert rank_scores([1.0, 2.0, 2.0, 0.0], exclude=[1]).tolist() == [2, 0, 3]
        assert rank_scores([1.0, 2.0], exclude=[0, 1]).tolist() == []

    @pytest.mark.parametrize("seed", range(5))
    def test_invariant_under_monotone_transform(self, seed):
        rng = np.random.default_rng(seed)
        scores = rng.normal(size=40)
        exclude = rng.choice(40, size=5, replace=False)
        ranked = rank_scores(scores, exclude)
        assert rank_scores(3.0 * scores + 7.0, exclude).tolist() == ranked.tolist()
        assert rank_scores(np.exp(scores), exclude).tolist() == ranked.tolist()

    def test_rank_bundles(self):
        scorer = FixedScorer([[0.1, 0.9, 0.5]])
        assert rank_bundles(scorer, 0).tolist() == [1, 2, 0]
        assert rank_bundles(scorer, 0, exclude=[1]).tolist() == [2, 0]


@pytest.fixture
def hand_split():
    # u0: treino {0}, teste {1, 4}; u1: treino {2}, teste {0}; u2: treino {4}, val {3}, teste {2}
    return DatasetSplit(
        n_users=3,
        n_bundles=5,
        train=_pairs([(0, 0), (1, 2), (2, 4)]),
        val=_pairs([(2, 3)]),
        test=_pairs([(0, 1), (0, 4), (1, 0), (2, 2)]),
    )


HAND_SCORES = [
    [5.0, 4.0, 3.0, 2.0, 1.0],
    [0.0, 0.0, 0.0, 0.0, 0.0],
    [1.0, 2.0, 3.0, 4.0, 5.0],
]


class TestEvaluate:
    def test_three_user_average(self, hand_split):
        report = evaluate(FixedScorer(HAND_SCORES), hand_split, "test", ks=[2])
        a = 1 / (1 + 1 / math.log2(3))
        assert report.n_users == 3
        assert report.recall[2] == pytest.approx((0.5 + 1 + 1) / 3)
        assert report.ndcg[2] == pytest.approx((a + 1 + 1) / 3)

    def test_validation_excludes_only_train(self, hand_split):
        report = evaluate(FixedScorer(HAND_SCORES), hand_split, "val", ks=[1])
        # só u2 tem verdade de validação; bundle 3 é o primeiro depois do 4 (treino)
        assert report.n_users == 1
        assert report.recall[1] == 1.0

    def test_perfect_scorer(self, hand_split):
        scores = np.zeros((3, 5))
        for u, b in hand_split.test:
            scores[u, b] = 10.0
        report = evaluate(FixedScorer(scores), hand_split, "test", ks=[2, 3])
        assert report.recall == {2: 1.0, 3: 1.0}
        assert report.ndcg == {2: 1.0, 3: 1.0}

    def test_ks_are_sorted_and_unique(self, hand_split):
        report = evaluate(FixedScorer(HAND_SCORES), hand_split, "test", ks=[3, 1, 3])
        assert report.ks == [1, 3]

    def test_groups_are_a_weighted_partition(self, small_dataset):
        data_split = split(small_dataset, SplitSpec(seed=4))
        graph = small_dataset.graph(ub=data_split.train)
        scorer = init_mf_params(graph.n_users, graph.n_bundles, 8, seed=0)
        report = evaluate(scorer, data_split, "test", ks=[5, 10], graph=graph, group_boundaries=[4, 6])
        assert [g.label for g in report.groups] == ["0-3", "4-5", "6+"]
        assert sum(g.n_users for g in report.groups) == report.n_users
        for k in (5, 10):
            weighted = sum(g.n_users * g.recall[k] for g in report.groups) / report.n_users
            assert weighted == pytest.approx(report.recall[k], abs=1e-12)

    def test_threads_do_not_change_result(self, small_dataset, monkeypatch):
        import bgcn.evaluation.evaluator as evaluator

        monkeypatch.setattr(evaluator, "CHUNK_SIZE", 7)
        data_split = split(small_dataset, SplitSpec(seed=4))
        scorer = init_mf_params(small_dataset.n_users, small_dataset.n_bundles, 8, seed=0)
        single = evaluate(scorer, data_split, "test", ks=[5])
        pooled = evaluate(scorer, data_split, "test", ks=[5], threads=4)
        assert single.recall == pooled.recall
        assert single.ndcg == pooled.ndcg

    def test_groups_need_graph(self, hand_split):
        with pytest.raises(ValueError):
            evaluate(FixedScorer(HAND_SCORES), hand_split, "test", ks=[2], group_boundaries=[1])
