import pytest

from bgcn.errors import ConfigError
from bgcn.jobs.ablation import run_ablation_study, variant_config
from bgcn.models.config import B2BMode, ModelKind, TrainConfig

BASE = TrainConfig(
    embedding_size=8,
    n_layers=1,
    batch_size=64,
    max_epochs=2,
    ks=[5],
    early_stop_k=5,
)


class TestVariantConfig:
    def test_presets_and_seed(self):
        config = variant_config(BASE, "no-b2b", 9)
        assert config.b2b_mode == B2BMode.NONE
        assert config.seed == 9
        assert config.embedding_size == 8

    def test_baseline(self):
        assert variant_config(BASE, "mfbpr", 1).model == ModelKind.MFBPR

    def test_unknown(self):
        with pytest.raises(ConfigError):
            variant_config(BASE, "sem-nada", 1)


class TestAblationStudy:
    def test_runs_and_medians(self, small_dataset, tmp_path):
        report = run_ablation_study(
            small_dataset, BASE, ["ib-levels", "no-b2b", "mfbpr"], seeds=[1, 2, 3], k=5, out_dir=tmp_path
        )
        assert len(report.runs) == 9
        for variant in ("ib-levels", "no-b2b", "mfbpr"):
            recalls = sorted(r.recall for r in report.runs if r.variant == variant)
            assert report.median_recall[variant] == recalls[1]
        assert (tmp_path / "checkpoints" / "no-b2b-seed2.ckpt").exists()

        lines = (tmp_path / "ablation.tsv").read_text().splitlines()
        assert lines[0].startswith("# config=")
        assert lines[1] == "variant\tseed\tmetric\tk\tvalue"
        assert sum(1 for line in lines if "\tmedian\t" in line) == 6

    def test_unknown_variant_fails_before_training(self, small_dataset):
        with pytest.raises(ConfigError):
            run_ablation_study(small_dataset, BASE, ["ib-levels", "sem-nada"], seeds=[1])
