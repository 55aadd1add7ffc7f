"""
命令行入口与退出码
"""
import json

import pytest

import main as cli
from outpaintai.backends import MockBackend
from outpaintai.exceptions import BackendError

from conftest import make_config


class DeadBackend(MockBackend):
    async def outpaint(self, *args, **kwargs):
        raise BackendError("connection refused")


@pytest.fixture
def config_file(tmp_path, sources):
    path = tmp_path / "cfg.json"
    path.write_text(make_config(tmp_path, sources).to_json(), encoding="utf-8")
    return path


def run(config_file, *argv) -> int:
    command, *rest = argv
    return cli.main([command, "--config", str(config_file), *rest])


class TestExitCodes:
    def test_missing_config_file(self, tmp_path):
        assert cli.main(["compose", "--config", str(tmp_path / "absent.json")]) == 4

    def test_invalid_config(self, tmp_path):
        path = tmp_path / "cfg.json"
        path.write_text(json.dumps({"canvas_size": 10}))
        assert cli.main(["compose", "--config", str(path)]) == 4

    def test_override_is_validated(self, config_file):
        assert run(config_file, "compose", "--workers", "0") == 4

    def test_unknown_flag(self, config_file):
        with pytest.raises(SystemExit) as exc:
            run(config_file, "compose", "--frobnicate")
        assert exc.value.code == 2

    def test_missing_upstream_manifest(self, config_file):
        assert run(config_file, "compose") == 3

    def test_cli_error_classes_are_distinct(self, config_file, tmp_path):
        with pytest.raises(SystemExit) as exc:
            run(config_file, "outpaint", "--no-such-flag")
        unknown_flag = exc.value.code

        bad = tmp_path / "bad.json"
        bad.write_text(json.dumps({"bogus_key": 1}))
        schema_invalid = cli.main(["outpaint", "--config", str(bad)])

        missing_manifest = run(config_file, "outpaint", "--backend", "mock")

        assert (unknown_flag, schema_invalid, missing_manifest) == (2, 4, 3)

    def test_backend_down(self, config_file, monkeypatch):
        monkeypatch.setattr(
            "outpaintai.orchestrator.pipeline.BackendFactory.create_from_config",
            lambda cfg: DeadBackend(),
        )
        assert run(config_file, "extract-seeds") == 0
        assert run(config_file, "compose") == 0
        assert run(config_file, "outpaint", "--max-attempts", "2") == 5

    def test_bad_predictions(self, config_file, tmp_path):
        labels = tmp_path / "labels"
        preds = tmp_path / "preds"
        labels.mkdir()
        preds.mkdir()
        (labels / "a.txt").write_text("1 0.5 0.5 0.2 0.2\n")
        (preds / "a.txt").write_text("1 0.5 0.5 0.2 0.2 1.5\n")
        assert run(config_file, "evaluate", "--labels", str(labels), "--preds", str(preds)) == 6


class TestStages:
    def test_full_run(self, config_file, tmp_path):
        work = tmp_path / "work"
        dataset = tmp_path / "dataset"

        assert run(config_file, "extract-seeds") == 0
        assert run(config_file, "run") == 0
        assert run(config_file, "assemble") == 0

        report = json.loads((work / "reports" / "run_report.json").read_text())
        assert report["outpaint"]["accepted"] == 20
        data = (dataset / "data.yaml").read_text()
        assert "nc: 9" in data

        # 把测试集真值原样当作预测
        preds = tmp_path / "preds"
        preds.mkdir()
        for label in (dataset / "labels" / "test").glob("*.txt"):
            lines = [f"{line} 0.900000" for line in label.read_text().splitlines()]
            (preds / label.name).write_text("".join(f"{line}\n" for line in lines))
        assert run(config_file, "evaluate", "--preds", str(preds)) == 0
        metrics = json.loads((work / "reports" / "metrics.json").read_text())
        assert metrics["mAP50"] == pytest.approx(1.0)
        assert metrics["precision"] == pytest.approx(1.0)

        assert run(config_file, "report", "--limit", "5") == 0
        assert (work / "reports" / "gallery" / "index.html").exists()
        assert len(list((work / "reports" / "gallery" / "thumbs").glob("seed_*.png"))) == 5

    def test_overrides(self, config_file, tmp_path):
        assert run(config_file, "extract-seeds") == 0
        assert run(config_file, "compose", "--seed", "99", "--invert-mask") == 0
        row = json.loads((tmp_path / "work" / "compose" / "manifest.jsonl").read_text().splitlines()[0])
        assert row["mask_inverted"] is True

    def test_resume_run(self, config_file, tmp_path):
        assert run(config_file, "extract-seeds") == 0
        assert run(config_file, "run") == 0
        first = (tmp_path / "work" / "outpaint" / "manifest.jsonl").read_bytes()
        assert run(config_file, "run", "--resume") == 0
        assert (tmp_path / "work" / "outpaint" / "manifest.jsonl").read_bytes() == first
