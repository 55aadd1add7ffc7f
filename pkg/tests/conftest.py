"""
测试公共夹具

源图是平滑渐变（mock 后端 smooth 模式下 TV 远低于门限），
检测结果写在 <stem>.detections.json 旁注文件里，由 FixtureDetector 读取
"""
import json
from pathlib import Path
from typing import List, Tuple

import numpy as np
import pytest

from outpaintai.backends import MockBackend
from outpaintai.geometry import BufferSpec, PixelBox
from outpaintai.pipeline_config import (
    AttemptPolicy,
    BackendConfig,
    DetectorConfig,
    IqaConfig,
    PathsConfig,
    PipelineConfig,
)
from outpaintai.prompts import PromptManager
from outpaintai.quality import IqaProviderFactory, QualityGate, QualityThresholds
from outpaintai.seeds import SeedRecord
from outpaintai.utils import save_png

CANVAS = 128


def gradient_raster(height: int, width: int, offset: int = 0) -> np.ndarray:
    """中间调的平滑渐变"""
    ys, xs = np.mgrid[0:height, 0:width].astype(np.float64)
    r = 110 + 30 * xs / max(width - 1, 1)
    g = 120 + 20 * ys / max(height - 1, 1)
    b = np.full_like(xs, 130.0 + offset % 20)
    return np.stack([r, g, b], axis=-1).round().astype(np.uint8)


def make_seed(
    seed_id: str = "s0000",
    class_id: int = 1,
    inner: Tuple[float, float] = (100.0, 100.0),
    buffer_factor: float = 1.15,
) -> SeedRecord:
    """构造对称缓冲、未截断的种子"""
    spec = BufferSpec.symmetric(buffer_factor)
    crop_w = inner[0] * buffer_factor
    crop_h = inner[1] * buffer_factor
    pad_x, pad_y = spec.left * inner[0], spec.top * inner[1]
    raster = gradient_raster(int(round(crop_h)), int(round(crop_w)))
    return SeedRecord(
        seed_id=seed_id,
        class_id=class_id,
        crop_image=raster,
        buffer=spec,
        source_path=f"{seed_id}.png",
        crop_box=PixelBox(0.0, 0.0, crop_w, crop_h),
        detected_box=PixelBox(pad_x, pad_y, pad_x + inner[0], pad_y + inner[1]),
        detector="fcos",
    )


def write_sources(root: Path, count: int, classes: List[int] = None) -> Path:
    """
    写出源图、旁注和源图清单

    每张源图 160×120，车辆框 (30, 20)-(120, 90)，所有模型给出相同的框
    """
    root.mkdir(parents=True, exist_ok=True)
    classes = classes or [i % 9 for i in range(count)]
    lines = ["source_path,class,seed_id"]
    for i in range(count):
        stem = f"src_{i:03d}"
        save_png(gradient_raster(120, 160, offset=i), root / f"{stem}.png")
        detections = {"*": [[30, 20, 120, 90, 0.9, "car"], [0, 0, 10, 10, 0.8, "person"]]}
        (root / f"{stem}.detections.json").write_text(json.dumps(detections), encoding="utf-8")
        lines.append(f"{stem}.png,{classes[i]},seed_{i:03d}")
    manifest = root / "manifest.csv"
    manifest.write_text("\n".join(lines) + "\n", encoding="utf-8")
    return manifest


def make_config(tmp_path: Path, manifest: Path = None, **overrides) -> PipelineConfig:
    cfg = PipelineConfig(
        paths=PathsConfig(
            sources_manifest=str(manifest or tmp_path / "sources" / "manifest.csv"),
            workdir=str(tmp_path / "work"),
            dataset_root=str(tmp_path / "dataset"),
        ),
        global_seed=7,
        canvas_size=CANVAS,
        attempts=AttemptPolicy(max_attempts=5, on_exhaustion="skip"),
        backend=BackendConfig(name="mock", mock_mode="always-smooth", mock_noisy_k=3),
        iqa=IqaConfig(providers=["auto"], device="cpu", require_all=True),
        detectors=DetectorConfig(name="fixture"),
        background_fraction=0.1,
        images_per_seed=1,
        workers=3,
        prompt_config="",
    )
    for key, value in overrides.items():
        setattr(cfg, key, value)
    return cfg.ensure_valid(check_paths=False)


def mock_gate(backend: MockBackend, thresholds: QualityThresholds = None) -> QualityGate:
    providers = IqaProviderFactory.create_from_config(IqaConfig(providers=["auto"]), backend=backend)
    return QualityGate(providers, thresholds or QualityThresholds())


@pytest.fixture
def seed():
    return make_seed()


@pytest.fixture
def prompt_cfg():
    return PromptManager().get_config()


@pytest.fixture
def sources(tmp_path):
    return write_sources(tmp_path / "sources", 20)


@pytest.fixture
def pipeline_cfg(tmp_path, sources):
    return make_config(tmp_path, sources)
