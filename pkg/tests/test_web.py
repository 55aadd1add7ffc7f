"""
运行统计、静态画廊与预览服务器
"""
import json

import pytest
from PIL import Image

from outpaintai.orchestrator import run_pipeline
from outpaintai.web import GalleryBuilder, RunStats, draw_thumbnail
from outpaintai.utils import save_png
from outpaintai.web.server import GalleryServer

from conftest import gradient_raster


@pytest.fixture
def finished(pipeline_cfg):
    from outpaintai.seeds import SeedExtractor

    SeedExtractor(pipeline_cfg).run()
    run_pipeline(pipeline_cfg)
    return pipeline_cfg


class TestRunStats:
    def test_empty_workdir(self, tmp_path):
        summary = RunStats(tmp_path).summary()
        assert summary["outpaint"]["total"] == 0
        assert summary["outpaint"]["acceptance_rate"] is None
        assert summary["outpaint"]["attempts"] == {"backend_calls": 0}
        assert summary["outpaint"]["scores"]["tv"] == {"count": 0}

    def test_summary(self, finished):
        summary = RunStats(finished.workdir).summary()
        assert summary["seeds"]["accepted"] == 20
        outpaint = summary["outpaint"]
        assert outpaint["acceptance_rate"] == 1.0
        assert outpaint["attempts"]["backend_calls"] == 20
        assert outpaint["attempts"]["verdicts"] == {"pass": 20}
        assert outpaint["scores"]["brisque"]["max"] == 8.0
        assert outpaint["scores"]["clip_iqa"]["min"] == 0.95
        assert outpaint["per_class"]["COUPE"] == 3
        assert summary["backgrounds"]["accepted"] == 2

    def test_rejection_reasons(self, tmp_path):
        rows = [
            {"item_key": "a", "status": "accepted"},
            {"item_key": "b", "status": "rejected", "reason": "exhausted"},
            {"item_key": "c", "status": "rejected", "reason": "exhausted"},
            {"item_key": "d", "status": "rejected", "reason": "backend-dead"},
        ]
        (tmp_path / "outpaint").mkdir()
        (tmp_path / "outpaint" / "manifest.jsonl").write_text("".join(json.dumps(r) + "\n" for r in rows))
        counts = RunStats(tmp_path).summary()["outpaint"]
        assert counts["reasons"] == {"backend-dead": 1, "exhausted": 2}
        assert counts["acceptance_rate"] == 0.25


class TestGallery:
    def test_thumbnail_with_box(self, tmp_path):
        image = tmp_path / "a.png"
        save_png(gradient_raster(192, 192), image)
        out = tmp_path / "thumbs" / "a.png"
        draw_thumbnail(image, "5 0.5 0.5 0.5 0.5\n", out)
        with Image.open(out) as thumb:
            assert thumb.size == (192, 192)
            assert thumb.getpixel((48, 96)) == (255, 64, 64)

    def test_build(self, finished):
        index = GalleryBuilder(finished.workdir).build(limit=4)
        html = index.read_text(encoding="utf-8")
        thumbs = sorted(p.name for p in (index.parent / "thumbs").iterdir())
        assert thumbs == ["bg_0000.png", "bg_0001.png"] + [f"seed_{i:03d}_00.png" for i in range(4)]
        assert "seed_003_00" in html
        assert "seed_004_00" not in html
        assert "bg_0001" in html

    def test_build_without_runs(self, tmp_path):
        index = GalleryBuilder(tmp_path).build()
        assert index.exists()


class TestServer:
    @pytest.fixture
    def client(self, finished):
        GalleryBuilder(finished.workdir).build(limit=2)
        server = GalleryServer(workdir=str(finished.workdir))
        return server.app.test_client()

    def test_index_and_thumbs(self, client):
        assert client.get("/").status_code == 200
        assert client.get("/thumbs/seed_000_00.png").status_code == 200
        assert client.get("/thumbs/missing.png").status_code == 404

    def test_run_api(self, client):
        data = client.get("/api/run").get_json()
        assert data["outpaint"]["accepted"] == 20

    def test_metrics_missing(self, client):
        assert client.get("/api/metrics").status_code == 404

    def test_health(self, client):
        assert client.get("/health").get_json() == {"status": "ok", "gallery": True}
