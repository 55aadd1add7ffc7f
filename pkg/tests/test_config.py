"""
流水线配置加载与校验
"""
import json

import pytest

from outpaintai import config_helper
from outpaintai.exceptions import ConfigError
from outpaintai.logger.logger import cleanup_old_logs
from outpaintai.pipeline_config import (
    AttemptPolicy,
    BackendConfig,
    DetectorConfig,
    IqaConfig,
    PipelineConfig,
    QualityThresholds,
    SplitConfig,
    TrainerPassThrough,
)

from conftest import make_config


class TestValidate:
    def test_defaults_are_valid(self):
        assert PipelineConfig().validate(check_paths=False) == []

    @pytest.mark.parametrize("field, value", [
        ("canvas_size", 32),
        ("global_seed", -1),
        ("buffer_factor", 1.0),
        ("background_fraction", 1.0),
        ("workers", 0),
        ("images_per_seed", 0),
        ("fill_value", 300),
    ])
    def test_top_level_ranges(self, field, value):
        cfg = PipelineConfig()
        setattr(cfg, field, value)
        errors = cfg.validate(check_paths=False)
        assert len(errors) == 1
        assert field in errors[0]

    def test_sections(self):
        assert AttemptPolicy(0, "retry").validate() == [
            "attempts.max_attempts 必须 >= 1: 0",
            "attempts.on_exhaustion 必须是 skip/keep-best: retry",
        ]
        assert SplitConfig(0.5, 0.25, 0.5).validate()
        assert BackendConfig(name="mock", mock_mode="sometimes").validate()
        assert BackendConfig(name="remote", endpoint="").validate()
        assert IqaConfig(providers=["musiq"]).validate()
        assert DetectorConfig(ensemble=["fcos", "fcos"]).validate()
        assert QualityThresholds(tv_resolution=1).validate()

    def test_infinite_thresholds_allowed(self):
        assert QualityThresholds(float("inf"), float("-inf")).validate() == []

    def test_ensure_valid_raises(self):
        cfg = PipelineConfig()
        cfg.workers = 0
        with pytest.raises(ConfigError):
            cfg.ensure_valid(check_paths=False)

    def test_missing_prompt_file(self, tmp_path):
        cfg = PipelineConfig()
        cfg.prompt_config = str(tmp_path / "prompts.json")
        assert cfg.validate(check_paths=False) == []
        assert cfg.validate(check_paths=True)


class TestFromDict:
    def test_nested_sections(self):
        cfg = PipelineConfig.from_dict({
            "global_seed": 11,
            "backend": {"name": "mock", "mock_mode": "always-noisy"},
            "split": {"train": 0.5, "val": 0.2, "test": 0.3},
            "iqa": {"providers": ["none"]},
        })
        assert cfg.global_seed == 11
        assert cfg.backend.mock_mode == "always-noisy"
        assert cfg.split.fractions == {"train": 0.5, "val": 0.2, "test": 0.3}
        assert cfg.iqa.providers == ["none"]
        assert cfg.canvas_size == PipelineConfig().canvas_size

    @pytest.mark.parametrize("data, key", [
        ({"canvas": 512}, "canvas"),
        ({"backend": {"url": "x"}}, "backend.url"),
    ])
    def test_unknown_keys(self, data, key):
        with pytest.raises(ConfigError, match=key):
            PipelineConfig.from_dict(data)

    @pytest.mark.parametrize("data", [
        {"canvas_size": "512"},
        {"canvas_size": True},
        {"mask_invert": 1},
        {"buffer_factor": "wide"},
        {"iqa": {"providers": "auto"}},
        {"attempts": 3},
    ])
    def test_wrong_types(self, data):
        with pytest.raises(ConfigError):
            PipelineConfig.from_dict(data)

    def test_int_accepted_for_float(self):
        assert PipelineConfig.from_dict({"buffer_factor": 2}).buffer_factor == 2.0

    def test_json_round_trip(self, tmp_path):
        cfg = make_config(tmp_path)
        assert PipelineConfig.from_dict(json.loads(cfg.to_json())) == cfg


class TestLoad:
    def test_file(self, tmp_path):
        path = tmp_path / "cfg.json"
        path.write_text(json.dumps({"global_seed": 3, "workers": 2}))
        cfg = PipelineConfig.load(str(path), check_paths=False)
        assert (cfg.global_seed, cfg.workers) == (3, 2)

    def test_no_path_uses_defaults(self):
        assert PipelineConfig.load(None, check_paths=False) == PipelineConfig()

    @pytest.mark.parametrize("content", ["{not json", "[1, 2]"])
    def test_bad_content(self, tmp_path, content):
        path = tmp_path / "cfg.json"
        path.write_text(content)
        with pytest.raises(ConfigError):
            PipelineConfig.load(str(path))

    def test_missing_file(self, tmp_path):
        with pytest.raises(ConfigError):
            PipelineConfig.load(str(tmp_path / "absent.json"))

    def test_invalid_values(self, tmp_path):
        path = tmp_path / "cfg.json"
        path.write_text(json.dumps({"canvas_size": 16}))
        with pytest.raises(ConfigError, match="canvas_size"):
            PipelineConfig.load(str(path), check_paths=False)


class TestTrainerPassThrough:
    def test_augmented_doubles_batch_and_lr(self):
        doubled = TrainerPassThrough().augmented()
        assert (doubled.batch, doubled.lr0) == (64, 0.02)
        assert doubled.epochs == 1000
        assert not doubled.mosaic and not doubled.mixup


class TestEnvHelpers:
    def test_inline_comment_and_blank(self, monkeypatch):
        monkeypatch.setenv("OUTPAINT_TEST_KEY", "remote  # 远程推理")
        assert config_helper.get_config("OUTPAINT_TEST_KEY") == "remote"
        monkeypatch.setenv("OUTPAINT_TEST_KEY", "   ")
        assert config_helper.get_config("OUTPAINT_TEST_KEY", "mock") == "mock"
        with pytest.raises(ConfigError):
            config_helper.get_config("OUTPAINT_TEST_KEY", required=True)

    def test_malformed_number_warns(self, monkeypatch):
        monkeypatch.setenv("OUTPAINT_TEST_KEY", "twelve")
        with pytest.warns(UserWarning, match="OUTPAINT_TEST_KEY"):
            assert config_helper.get_int_config("OUTPAINT_TEST_KEY", 12) == 12

    @pytest.mark.parametrize("raw,expected", [("yes", True), ("OFF", False), ("1", True)])
    def test_bool(self, monkeypatch, raw, expected):
        monkeypatch.setenv("OUTPAINT_TEST_KEY", raw)
        assert config_helper.get_bool_config("OUTPAINT_TEST_KEY", not expected) is expected

    def test_choice(self, monkeypatch):
        monkeypatch.setenv("OUTPAINT_TEST_KEY", "KEEP-BEST")
        assert config_helper.get_choice_config("OUTPAINT_TEST_KEY", "skip", ("skip", "keep-best")) == "keep-best"
        monkeypatch.setenv("OUTPAINT_TEST_KEY", "drop")
        with pytest.warns(UserWarning):
            assert config_helper.get_choice_config("OUTPAINT_TEST_KEY", "skip", ("skip", "keep-best")) == "skip"

    def test_list(self, monkeypatch):
        monkeypatch.setenv("OUTPAINT_TEST_KEY", "ssd, fcos,,")
        assert config_helper.get_list_config("OUTPAINT_TEST_KEY") == ["ssd", "fcos"]
        monkeypatch.setenv("OUTPAINT_TEST_KEY", " , ")
        assert config_helper.get_list_config("OUTPAINT_TEST_KEY", ["auto"]) == ["auto"]


class TestLogCleanup:
    def test_removes_only_expired_daily_files(self, tmp_path):
        (tmp_path / "outpaint_20000101.log").write_text("old")
        (tmp_path / "outpaint_99991231.log").write_text("future")
        (tmp_path / "outpaint_notes.log").write_text("kept")
        assert cleanup_old_logs(tmp_path, max_hours=72) == 1
        assert sorted(p.name for p in tmp_path.iterdir()) == ["outpaint_99991231.log", "outpaint_notes.log"]

    def test_missing_dir(self, tmp_path):
        assert cleanup_old_logs(tmp_path / "absent") == 0
