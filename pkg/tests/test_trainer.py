import json
import math
from types import SimpleNamespace

import numpy as np
import pytest

from bgcn.core.optim import Adam
from bgcn.data import split
from bgcn.engine import BGCNModel, MFParams, build_model, init_params
from bgcn.errors import TrainingDivergedError
from bgcn.graph import build_overlap
from bgcn.models.config import ModelKind, SplitSpec, TrainConfig
from bgcn.training import UniformSampler, train
from bgcn.training import trainer as trainer_module


@pytest.fixture
def setup(small_dataset):
    data_split = split(small_dataset, SplitSpec(seed=1))
    graph = small_dataset.graph(ub=data_split.train)
    return data_split, graph, build_overlap(graph)


def _config(**overrides):
    values = dict(
        embedding_size=8,
        n_layers=1,
        batch_size=64,
        max_epochs=3,
        patience=1,
        early_stop_k=5,
        ks=[5],
        lr=5e-3,
        seed=7,
    )
    values.update(overrides)
    return TrainConfig(**values)


def _tensors_equal(a, b):
    return a.keys() == b.keys() and all(np.array_equal(a[k], b[k]) for k in a)


def _plateau(scorer, data_split, which, ks, threads=1):
    """Validação constante: a paciência estoura na primeira chance."""
    return SimpleNamespace(recall={k: 0.25 for k in ks}, ndcg={k: 0.25 for k in ks})


class TestTrain:
    def test_zero_epochs_returns_initial_params(self, setup):
        data_split, graph, overlap = setup
        config = _config(max_epochs=0)
        result = train(config, data_split, graph, overlap)
        expected = init_params(graph.n_users, graph.n_bundles, graph.n_items, 8, 1, seed=7)
        assert _tensors_equal(result.model.tensors(), expected.named_tensors())
        assert [r.kind for r in result.log] == ["config", "summary"]
        assert result.epochs_run == 0
        assert result.best_recall is None

    def test_deterministic(self, setup):
        data_split, graph, overlap = setup
        config = _config(message_dropout=0.1, node_dropout=0.1)
        first = train(config, data_split, graph, overlap)
        second = train(config, data_split, graph, overlap)
        assert first.log_lines() == second.log_lines()
        assert _tensors_equal(first.model.tensors(), second.model.tensors())

    def test_best_snapshot_and_log(self, setup):
        data_split, graph, overlap = setup
        result = train(_config(max_epochs=4, patience=10), data_split, graph, overlap)
        evals = [r for r in result.log if r.kind == "eval"]
        assert len(evals) == 4
        recalls = [r.recall["5"] for r in evals]
        assert result.best_recall == pytest.approx(max(recalls))
        assert result.best_epoch == evals[int(np.argmax(recalls))].epoch
        epochs = [r for r in result.log if r.kind == "epoch"]
        assert all(math.isfinite(r.loss) for r in epochs)

    def test_switch_happens_at_most_once(self, setup):
        data_split, graph, overlap = setup
        result = train(_config(max_epochs=10, patience=1, p_hard=0.8, tau=0.3), data_split, graph, overlap)
        switches = [r for r in result.log if r.kind == "switch"]
        assert len(switches) <= 1
        if result.switch_epoch is not None:
            assert switches[0].epoch == result.switch_epoch
            later = [r for r in result.log if r.kind == "epoch" and r.epoch > result.switch_epoch]
            assert all(r.phase == "hard" for r in later)
        summary = result.log[-1]
        assert summary.kind == "summary"
        assert summary.switch_epoch == result.switch_epoch

    def test_plateau_forces_switch_to_hard_triples(self, setup, monkeypatch):
        data_split, graph, overlap = setup
        monkeypatch.setattr(trainer_module, "evaluate", _plateau)
        hard_batches, losses = [], []
        sample_hard_batch = trainer_module.sample_hard_batch
        loss_and_grads = BGCNModel.loss_and_grads

        def spy_hard(*args, **kwargs):
            batch = sample_hard_batch(*args, **kwargs)
            hard_batches.append(batch)
            return batch

        def spy_loss(model, users, pos, neg, reg_lambda, rng):
            losses.append((model.params.users.copy(), np.array(neg)))
            return loss_and_grads(model, users, pos, neg, reg_lambda, rng)

        monkeypatch.setattr(trainer_module, "sample_hard_batch", spy_hard)
        monkeypatch.setattr(BGCNModel, "loss_and_grads", spy_loss)
        config = _config(max_epochs=6, patience=1, p_hard=1.0, tau=0.3)
        result = train(config, data_split, graph, overlap)

        assert result.switch_epoch == 2
        assert result.epochs_run == 3
        later = [r for r in result.log if r.kind == "epoch" and r.epoch > 2]
        assert later and all(r.phase == "hard" and r.hard_fraction > 0 for r in later)

        # os negativos difíceis são exatamente os que chegam à perda
        assert hard_batches
        for batch, (_, neg) in zip(hard_batches, losses[-len(hard_batches):]):
            np.testing.assert_array_equal(batch.neg, neg)
        assert sum(int(b.hard.sum()) for b in hard_batches) > 0

        # a fase 2 recomeça do melhor snapshot (época 1)
        n_batches = len(losses) // 3
        first_epoch = train(config.model_copy(update={"max_epochs": 1}), data_split, graph, overlap)
        np.testing.assert_array_equal(losses[2 * n_batches][0], first_epoch.model.tensors()["P"])

    def test_min_epochs_delays_patience(self, setup, monkeypatch):
        data_split, graph, overlap = setup
        monkeypatch.setattr(trainer_module, "evaluate", _plateau)
        result = train(_config(max_epochs=8, patience=1, min_epochs=4), data_split, graph, overlap)
        assert result.switch_epoch == 4
        assert result.epochs_run == 5

    def test_hard_phase_never_loses_to_uniform_only(self, setup):
        data_split, graph, overlap = setup
        hard = train(_config(max_epochs=8, patience=1, p_hard=0.8, tau=0.3), data_split, graph, overlap)
        uniform = train(_config(max_epochs=8, patience=1, p_hard=0.0), data_split, graph, overlap)
        assert hard.best_recall >= uniform.best_recall

    def test_hard_disabled_never_switches(self, setup):
        data_split, graph, overlap = setup
        result = train(_config(max_epochs=6, p_hard=0.0), data_split, graph, overlap)
        assert result.switch_epoch is None
        assert all(r.phase == "uniform" for r in result.log if r.kind == "epoch")

    def test_mfbpr(self, setup):
        data_split, graph, _ = setup
        result = train(_config(model=ModelKind.MFBPR), data_split, graph)
        assert isinstance(result.model.scorer(), MFParams)
        assert set(result.model.tensors()) == {"P", "R"}
        assert result.switch_epoch is None

    def test_log_lines_are_json(self, setup):
        data_split, graph, overlap = setup
        result = train(_config(max_epochs=1), data_split, graph, overlap)
        records = [json.loads(line) for line in result.log_lines()]
        assert records[0]["message"] == "config"
        assert records[0]["config"]["embedding_size"] == 8
        assert records[1]["message"] == "epoch"
        assert records[1]["phase"] == "uniform"

    def test_divergence_keeps_last_good(self, setup, monkeypatch):
        data_split, graph, overlap = setup
        config = _config(max_epochs=3)
        per_epoch = math.ceil(len(data_split.train) / config.batch_size)
        original = BGCNModel.loss_and_grads
        calls = {"n": 0}

        def flaky(self, users, pos, neg, reg_lambda, rng):
            calls["n"] += 1
            loss, grads = original(self, users, pos, neg, reg_lambda, rng)
            if calls["n"] > per_epoch:
                loss = float("nan")
            return loss, grads

        monkeypatch.setattr(BGCNModel, "loss_and_grads", flaky)
        with pytest.raises(TrainingDivergedError) as excinfo:
            train(config, data_split, graph, overlap)

        error = excinfo.value
        assert "época 2" in str(error)
        assert set(error.last_good) >= {"P", "Q", "R", "W1.1"}
        assert [r.kind for r in error.log] == ["config", "epoch", "eval"]
        initial = init_params(graph.n_users, graph.n_bundles, graph.n_items, 8, 1, seed=7)
        assert not np.array_equal(error.last_good["P"], initial.users)


class TestOptimizerStep:
    def test_one_step_decreases_loss(self, setup, rng):
        data_split, graph, overlap = setup
        config = _config(lr=1e-3)
        model = build_model(config, graph, overlap)
        batch = UniformSampler(data_split.train_matrix()).sample(128, rng)
        before, grads = model.loss_and_grads(batch.users, batch.pos, batch.neg, config.reg_lambda, rng)
        Adam(model.tensors(), lr=config.lr).step(grads)
        after, _ = model.loss_and_grads(batch.users, batch.pos, batch.neg, config.reg_lambda, rng)
        assert after < before
