import numpy as np
import pytest

from bgcn.engine import DropoutMasks, ModelParams, forward, init_params
from bgcn.graph import build_overlap
from bgcn.models.config import AblationSwitches, B2BMode
from conftest import random_instance
from dense_oracle import dense_bundle_level, dense_item_level, dense_score


def _params_with_bias(graph, d, n_layers, seed):
    params = init_params(graph.n_users, graph.n_bundles, graph.n_items, d, n_layers, seed)
    rng = np.random.default_rng(seed + 1)
    for bias in params.b1 + params.b2:
        bias[:] = rng.normal(0, 0.1, size=bias.shape)
    return params


class TestAgainstDenseOracle:
    @pytest.mark.parametrize("seed", range(50))
    def test_random_instances(self, seed):
        graph = random_instance(seed)
        n_layers = seed % 4
        params = _params_with_bias(graph, d=4, n_layers=n_layers, seed=seed)
        overlap = build_overlap(graph)
        mode = list(B2BMode)[seed % 3]
        switches = AblationSwitches(b2b_mode=mode)
        emb = forward(graph, overlap, params, switches)

        users, items, bundles = dense_item_level(graph, params)
        for layer in range(n_layers + 1):
            np.testing.assert_allclose(emb.item_level.users[layer], users[layer], atol=1e-10)
            np.testing.assert_allclose(emb.item_level.items[layer], items[layer], atol=1e-10)
            np.testing.assert_allclose(emb.item_level.bundles[layer], bundles[layer], atol=1e-10)

        users2, bundles2 = dense_bundle_level(graph, params, mode.value)
        for layer in range(n_layers + 1):
            np.testing.assert_allclose(emb.bundle_level.users[layer], users2[layer], atol=1e-10)
            np.testing.assert_allclose(emb.bundle_level.bundles[layer], bundles2[layer], atol=1e-10)

        u, b = seed % graph.n_users, seed % graph.n_bundles
        expected = dense_score(graph, params, u, b, b2b=mode.value)
        assert emb.predict(u, b) == pytest.approx(expected, abs=1e-10)

    @pytest.mark.parametrize("switches", AblationSwitches.all_combinations(), ids=lambda s: s.label())
    def test_every_switch_combination(self, toy_graph, switches):
        params = _params_with_bias(toy_graph, d=3, n_layers=2, seed=5)
        emb = forward(toy_graph, build_overlap(toy_graph), params, switches)
        expected = dense_score(
            toy_graph,
            params,
            2,
            3,
            item_level=switches.item_level,
            bundle_level=switches.bundle_level,
            b2b=switches.b2b_mode.value,
        )
        assert emb.predict(2, 3) == pytest.approx(expected, abs=1e-10)


class TestForward:
    def test_zero_layers_closed_form(self, toy_graph):
        params = init_params(toy_graph.n_users, toy_graph.n_bundles, toy_graph.n_items, 6, 0, seed=1)
        emb = forward(toy_graph, build_overlap(toy_graph), params, AblationSwitches())
        pooled = toy_graph.norm_bi_pool @ params.items
        expected = params.users @ pooled.T + params.users @ params.bundles.T
        np.testing.assert_allclose(emb.score_users(np.arange(toy_graph.n_users)), expected, atol=1e-12)

    def test_no_b2b_does_not_need_overlap(self, toy_graph):
        params = init_params(toy_graph.n_users, toy_graph.n_bundles, toy_graph.n_items, 4, 1, seed=1)
        emb = forward(toy_graph, None, params, AblationSwitches(b2b_mode=B2BMode.NONE))
        assert emb.bundle_level.adj_bb is None

    def test_b2b_without_overlap_fails(self, toy_graph):
        params = init_params(toy_graph.n_users, toy_graph.n_bundles, toy_graph.n_items, 4, 1, seed=1)
        with pytest.raises(ValueError):
            forward(toy_graph, None, params, AblationSwitches())

    def test_item_level_only(self, toy_graph):
        params = init_params(toy_graph.n_users, toy_graph.n_bundles, toy_graph.n_items, 4, 1, seed=1)
        emb = forward(toy_graph, None, params, AblationSwitches(bundle_level=False, b2b_mode="none"))
        assert emb.bundle_level is None
        assert emb.users_bundle is None
        assert emb.n_bundles == toy_graph.n_bundles

    def test_score_users_matches_predict(self, toy_graph):
        params = _params_with_bias(toy_graph, d=4, n_layers=2, seed=3)
        emb = forward(toy_graph, build_overlap(toy_graph), params, AblationSwitches())
        scores = emb.score_users(np.array([0, 3]))
        for row, user in enumerate([0, 3]):
            for bundle in range(toy_graph.n_bundles):
                assert scores[row, bundle] == pytest.approx(emb.predict(user, bundle), abs=1e-12)
        pairs = emb.score_pairs(np.array([0, 3]), np.array([1, 2]))
        np.testing.assert_allclose(pairs, [scores[0, 1], scores[1, 2]], atol=1e-12)

    def test_dropout_masks_change_output(self, toy_graph, rng):
        params = init_params(toy_graph.n_users, toy_graph.n_bundles, toy_graph.n_items, 4, 1, seed=1)
        switches = AblationSwitches()
        masks = DropoutMasks.sample(toy_graph, switches, 1, 4, 0.5, rng)
        assert ("bb", 0) in masks.message
        clean = forward(toy_graph, build_overlap(toy_graph), params, switches)
        noisy = forward(toy_graph, build_overlap(toy_graph), params, switches, masks)
        assert not np.allclose(clean.users_item, noisy.users_item)


class TestInitParams:
    def test_deterministic(self):
        a = init_params(5, 4, 8, 3, 2, seed=9)
        b = init_params(5, 4, 8, 3, 2, seed=9)
        for name, tensor in a.named_tensors().items():
            np.testing.assert_array_equal(tensor, b.named_tensors()[name])

    def test_glorot_bounds_and_zero_bias(self):
        params = init_params(50, 40, 80, 16, 2, seed=0)
        assert np.abs(params.users).max() <= np.sqrt(6.0 / (50 + 16))
        assert np.abs(params.w1[0]).max() <= np.sqrt(6.0 / 32)
        assert not any(b.any() for b in params.b1 + params.b2)

    def test_tensor_names(self):
        params = init_params(2, 2, 2, 2, 2, seed=0)
        assert list(params.named_tensors()) == [
            "P", "Q", "R", "W1.1", "b1.1", "W1.2", "b1.2", "W2.1", "b2.1", "W2.2", "b2.2",
        ]

    def test_invalid_counts(self):
        with pytest.raises(ValueError):
            init_params(0, 2, 2, 2, 1, seed=0)

    def test_from_tensors_rejects_missing(self):
        tensors = init_params(2, 2, 2, 2, 1, seed=0).named_tensors()
        del tensors["b2.1"]
        with pytest.raises(ValueError):
            ModelParams.from_tensors(tensors)

    def test_single_level_keeps_only_its_tensors(self):
        item_only = init_params(5, 4, 8, 3, 2, seed=9, switches=AblationSwitches(bundle_level=False))
        bundle_only = init_params(5, 4, 8, 3, 2, seed=9, switches=AblationSwitches(item_level=False))
        assert list(item_only.named_tensors()) == ["P", "Q", "W1.1", "b1.1", "W1.2", "b1.2"]
        assert list(bundle_only.named_tensors()) == ["P", "R", "W2.1", "b2.1", "W2.2", "b2.2"]
        assert item_only.n_layers == bundle_only.n_layers == 2

        full = init_params(5, 4, 8, 3, 2, seed=9).named_tensors()
        for name, tensor in item_only.named_tensors().items():
            np.testing.assert_array_equal(tensor, full[name])

    def test_reduced_set_round_trips(self):
        tensors = init_params(2, 2, 2, 2, 1, seed=0, switches=AblationSwitches(item_level=False)).named_tensors()
        params = ModelParams.from_tensors(tensors)
        assert not params.has_item_level
        assert list(params.named_tensors()) == list(tensors)

    def test_orphan_layer_tensors_are_rejected(self):
        tensors = init_params(2, 2, 2, 2, 1, seed=0).named_tensors()
        del tensors["Q"]
        with pytest.raises(ValueError, match="W1.1"):
            ModelParams.from_tensors(tensors)

    def test_forward_needs_active_level_tensors(self, toy_graph):
        params = init_params(
            toy_graph.n_users, toy_graph.n_bundles, toy_graph.n_items, 4, 1, seed=1,
            switches=AblationSwitches(bundle_level=False),
        )
        forward(toy_graph, None, params, AblationSwitches(bundle_level=False, b2b_mode=B2BMode.NONE))
        with pytest.raises(ValueError, match="R"):
            forward(toy_graph, build_overlap(toy_graph), params, AblationSwitches())
