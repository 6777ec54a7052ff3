import json

import numpy as np
import pytest

from bgcn.engine import build_model, init_mf_params, init_params
from bgcn.errors import CheckpointError, CheckpointMismatchError
from bgcn.graph import build_overlap
from bgcn.models.config import ModelKind, TrainConfig
from bgcn.storage import (
    CheckpointManager,
    decode_checkpoint,
    encode_checkpoint,
    load_checkpoint,
    save_checkpoint,
)

CONFIG = {"seed": 7, "model": "bgcn", "embedding_size": 4}


@pytest.fixture
def tensors():
    return init_params(5, 4, 8, 4, 2, seed=3).named_tensors()


class TestFormat:
    def test_round_trip(self, tmp_path, tensors):
        path = save_checkpoint(tensors, CONFIG, tmp_path / "m.ckpt")
        checkpoint = load_checkpoint(path)
        assert list(checkpoint.tensors) == list(tensors)
        for name, tensor in tensors.items():
            assert checkpoint.tensors[name].dtype == np.float64
            np.testing.assert_allclose(checkpoint.tensors[name], tensor, atol=1e-6)
        assert checkpoint.config == CONFIG

    def test_resave_is_byte_identical(self, tmp_path, tensors):
        first = save_checkpoint(tensors, CONFIG, tmp_path / "a.ckpt").read_bytes()
        loaded = decode_checkpoint(first)
        second = save_checkpoint(loaded.tensors, loaded.config, tmp_path / "b.ckpt").read_bytes()
        assert first == second

    def test_exact_size(self, tensors):
        data = encode_checkpoint(tensors, CONFIG)
        expected = 12
        for name, tensor in tensors.items():
            expected += 2 + len(name) + 1 + 4 * tensor.ndim + 4 * tensor.size
        expected += 4 + len(json.dumps(CONFIG, sort_keys=True, separators=(",", ":")))
        assert len(data) == expected
        assert data[:4] == b"BGCN"
        assert data[4:8] == (1).to_bytes(4, "little")

    @pytest.mark.parametrize("cut", [3, 12, 40, -1])
    def test_truncated(self, tensors, cut):
        data = encode_checkpoint(tensors, CONFIG)
        with pytest.raises(CheckpointError):
            decode_checkpoint(data[:cut])

    def test_trailing_bytes(self, tensors):
        with pytest.raises(CheckpointError, match="sobrando"):
            decode_checkpoint(encode_checkpoint(tensors, CONFIG) + b"\x00")

    def test_bad_magic(self, tensors):
        data = bytearray(encode_checkpoint(tensors, CONFIG))
        data[:4] = b"XXXX"
        with pytest.raises(CheckpointError, match="magic"):
            decode_checkpoint(bytes(data))

    def test_unknown_version(self, tensors):
        data = bytearray(encode_checkpoint(tensors, CONFIG))
        data[4:8] = (2).to_bytes(4, "little")
        with pytest.raises(CheckpointError, match="versão 2"):
            decode_checkpoint(bytes(data))

    def test_missing_file(self, tmp_path):
        with pytest.raises(CheckpointError):
            load_checkpoint(tmp_path / "nada.ckpt")


class TestManager:
    def test_named_checkpoints(self, tmp_path, tensors):
        manager = CheckpointManager(tmp_path / "ckpts")
        assert manager.load("no-b2b-seed1") is None
        manager.save("no-b2b-seed1", tensors, CONFIG)
        assert manager.exists("no-b2b-seed1")
        assert manager.path_for("no-b2b-seed1").name == "no-b2b-seed1.ckpt"
        assert set(manager.load("no-b2b-seed1").tensors) == set(tensors)


class TestLoadIntoModel:
    def test_dimension_mismatch(self, toy_graph):
        tensors = init_params(6, 4, 8, 4, 1, seed=0).named_tensors()
        config = TrainConfig(embedding_size=4, n_layers=1)
        with pytest.raises(CheckpointMismatchError) as excinfo:
            build_model(config, toy_graph, tensors=tensors)
        assert excinfo.value.tensor == "P"
        assert excinfo.value.exit_code == 2

    def test_mfbpr_mismatch(self, toy_graph):
        tensors = init_mf_params(5, 3, 4, seed=0).named_tensors()
        with pytest.raises(CheckpointMismatchError):
            build_model(TrainConfig(model=ModelKind.MFBPR), toy_graph, tensors=tensors)

    def test_loaded_model_scores_like_saved(self, tmp_path, toy_graph):
        config = TrainConfig(embedding_size=4, n_layers=2)
        overlap = build_overlap(toy_graph)
        model = build_model(config, toy_graph, overlap)
        path = save_checkpoint(model.tensors(), config.echo(), tmp_path / "m.ckpt")
        restored = build_model(config, toy_graph, overlap, tensors=load_checkpoint(path).tensors)
        users = np.arange(toy_graph.n_users)
        np.testing.assert_allclose(
            restored.scorer().score_users(users), model.scorer().score_users(users), atol=1e-6
        )
