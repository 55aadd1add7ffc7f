"""
种子提取

源图清单（人工整理，提供类别）→ 检测器给出最大车辆框 → 带缓冲裁剪 → SeedRecord
"""
import json
import math
import shutil
from dataclasses import dataclass
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple, Union

import numpy as np
import pandas as pd
from PIL import Image

from .consensus import ConsensusConfig, largest_box, rank_by_totals, tally_calibration
from .detectors import BaseDetector, DetectorFactory
from ..exceptions import ConfigError, PipelineIOError, ValidationError
from ..geometry import (
    BufferSpec,
    ClassRegistry,
    DEFAULT_REGISTRY,
    NormAnnotation,
    PixelBox,
    buffered_crop,
    remove_buffer,
    serialize_labels,
)
from ..logger import get_logger
from ..utils import load_image, read_jsonl, save_png, write_jsonl

logger = get_logger("seeds.extractor")

REASON_UNDETECTED = "undetected"
REASON_BELOW_MIN_DIM = "below min_dim"
REASON_UNREADABLE = "unreadable"


def _round_half_up(value: float) -> int:
    return int(math.floor(value + 0.5))


@dataclass
class SeedRecord:
    """带缓冲的种子裁剪"""

    seed_id: str
    class_id: int
    crop_image: np.ndarray
    buffer: BufferSpec
    source_path: str
    crop_box: PixelBox
    detected_box: PixelBox
    detector: str = ""

    @property
    def crop_width(self) -> float:
        return self.crop_box.width

    @property
    def crop_height(self) -> float:
        return self.crop_box.height

    def inner_box(self) -> PixelBox:
        """去掉缓冲后的目标框（相对裁剪框）"""
        return remove_buffer(self.crop_width, self.crop_height, self.buffer)

    def to_row(self, image_rel: str) -> dict:
        return {
            "seed_id": self.seed_id,
            "source_path": self.source_path,
            "class_id": self.class_id,
            "status": "accepted",
            "reason": None,
            "crop_box": list(self.crop_box.as_tuple()),
            "detected_box": list(self.detected_box.as_tuple()),
            "buffer": self.buffer.to_dict(),
            "crop_width": self.crop_width,
            "crop_height": self.crop_height,
            "detector": self.detector,
            "image": image_rel,
        }

    @classmethod
    def from_row(cls, row: dict, base_dir: Path) -> "SeedRecord":
        """从清单行恢复（读取裁剪图）"""
        return cls(
            seed_id=row["seed_id"],
            class_id=int(row["class_id"]),
            crop_image=load_image(base_dir / row["image"]),
            buffer=BufferSpec.from_dict(row["buffer"]),
            source_path=row["source_path"],
            crop_box=PixelBox.from_sequence(row["crop_box"]),
            detected_box=PixelBox.from_sequence(row["detected_box"]),
            detector=row.get("detector", ""),
        )


@dataclass
class SeedRejection:
    """被拒绝的源图"""

    seed_id: str
    source_path: str
    class_id: int
    reason: str
    detail: str = ""

    def to_row(self) -> dict:
        return {
            "seed_id": self.seed_id,
            "source_path": self.source_path,
            "class_id": self.class_id,
            "status": "rejected",
            "reason": self.reason,
            "detail": self.detail,
        }


@dataclass
class SourceItem:
    """源图清单中的一行"""

    seed_id: str
    source_path: str
    class_id: int


def crop_raster(image: np.ndarray, crop: PixelBox) -> np.ndarray:
    """
    按连续坐标裁剪

    整数坐标直接切片；非整数坐标用双线性重采样到四舍五入后的尺寸
    """
    coords = crop.as_tuple()
    if all(float(c).is_integer() for c in coords):
        x0, y0, x1, y1 = (int(c) for c in coords)
        return image[y0:y1, x0:x1].copy()

    width = max(1, _round_half_up(crop.width))
    height = max(1, _round_half_up(crop.height))
    resized = Image.fromarray(image).resize((width, height), Image.BILINEAR, box=coords)
    return np.asarray(resized, dtype=np.uint8).copy()


def extract_seed(
    image: np.ndarray,
    class_id: int,
    ranked: Sequence[BaseDetector],
    min_dim: int = 32,
    buffer_factor: float = 1.15,
    seed_id: str = "",
    source_path: str = "",
    vehicle_labels: Optional[Sequence[str]] = None,
    registry: ClassRegistry = DEFAULT_REGISTRY,
) -> Union[SeedRecord, SeedRejection]:
    """
    从一张源图提取种子

    Args:
        image: (H, W, 3) 源图
        class_id: 人工清单给出的类别
        ranked: 排序后的检测器（主检测器在前）
        min_dim: 目标最小边长
        buffer_factor: 缓冲系数
        seed_id: 种子标识
        source_path: 源图路径（同时作为 fixture 检测器的查找键）
        vehicle_labels: 视为车辆的粗粒度类别

    Returns:
        SeedRecord 或 SeedRejection
    """
    if class_id not in registry:
        raise ValidationError(f"{seed_id}: class_id {class_id} 不在类别表中")

    detected, detector_name = None, ""
    for detector in ranked:
        try:
            detected = largest_box(detector.detect(image, source_path), vehicle_labels)
        except Exception as e:
            logger.warning(f"⚠️  {detector.name} 检测 {seed_id} 失败，尝试下一个: {e}")
            continue
        if detected is not None:
            detector_name = detector.name
            break

    if detected is None:
        return SeedRejection(seed_id, source_path, class_id, REASON_UNDETECTED, "所有检测器均未检测到车辆")

    if detected.width < min_dim or detected.height < min_dim:
        return SeedRejection(
            seed_id, source_path, class_id, REASON_BELOW_MIN_DIM,
            f"{detected.width:g}x{detected.height:g} < {min_dim}",
        )

    height, width = image.shape[:2]
    crop, spec = buffered_crop(detected, width, height, buffer_factor)
    return SeedRecord(
        seed_id=seed_id,
        class_id=class_id,
        crop_image=crop_raster(image, crop),
        buffer=spec,
        source_path=source_path,
        crop_box=crop,
        detected_box=detected,
        detector=detector_name,
    )


def read_sources(manifest_path: str, registry: ClassRegistry = DEFAULT_REGISTRY) -> List[SourceItem]:
    """
    读取人工整理的源图清单（CSV）

    列：source_path, class（类别名或 ID），seed_id（可选，默认取文件名）；
    相对路径相对于清单所在目录
    """
    path = Path(manifest_path)
    if not path.exists():
        raise PipelineIOError(f"源图清单不存在: {path}")

    df = pd.read_csv(path, dtype=str, keep_default_na=False)
    missing = {"source_path", "class"} - set(df.columns)
    if missing:
        raise ConfigError(f"源图清单缺少列: {', '.join(sorted(missing))}")

    items = []
    for i, row in enumerate(df.itertuples(index=False), 2):
        raw_class = str(row[df.columns.get_loc("class")]).strip()
        try:
            class_id = int(raw_class) if raw_class.isdigit() else registry.id_of(raw_class)
        except KeyError:
            raise ValidationError(f"源图清单第 {i} 行: 未知类别 {raw_class}")
        if class_id not in registry:
            raise ValidationError(f"源图清单第 {i} 行: class_id {class_id} 不在类别表中")

        source = Path(str(row[df.columns.get_loc("source_path")]).strip())
        if not source.is_absolute():
            source = path.parent / source
        seed_id = ""
        if "seed_id" in df.columns:
            seed_id = str(row[df.columns.get_loc("seed_id")]).strip()
        items.append(SourceItem(seed_id or source.stem, str(source), class_id))

    ids = [item.seed_id for item in items]
    duplicates = sorted({s for s in ids if ids.count(s) > 1})
    if duplicates:
        raise ValidationError(f"源图清单中 seed_id 重复: {', '.join(duplicates)}")
    return items


class SeedExtractor:
    """种子提取阶段：写出 seeds/images/*.png 与 seeds/manifest.jsonl"""

    def __init__(self, cfg, detectors: Optional[List[BaseDetector]] = None):
        """
        Args:
            cfg: PipelineConfig
            detectors: 预先构造的检测器（按集成顺序）；为空时按配置创建
        """
        self.cfg = cfg
        self.detectors = detectors or DetectorFactory.create_ensemble(cfg.detectors)
        self.consensus = ConsensusConfig(
            vote_iou_threshold=cfg.detectors.vote_iou_threshold,
            ensemble=[d.name for d in self.detectors],
            vehicle_labels=list(cfg.detectors.vehicle_labels),
        )
        self.out_dir = cfg.stage_dir("seeds")

    def _load_calibration(self, items: List[SourceItem]) -> List[Tuple[str, np.ndarray]]:
        limit = self.cfg.detectors.calibration_limit or len(items)
        calibration = []
        for item in items:
            if len(calibration) >= limit:
                break
            try:
                calibration.append((item.source_path, load_image(item.source_path)))
            except PipelineIOError as e:
                logger.warning(f"⚠️  校准图无法读取，跳过: {e}")
        self.consensus.calibration_set = [key for key, _ in calibration]
        return calibration

    def run(self, keep_uncropped: bool = False) -> Dict[str, int]:
        """
        执行提取

        Args:
            keep_uncropped: 是否保留未裁剪原图及其标签（消融基线）

        Returns:
            统计 {"total", "accepted", "rejected", ...按原因}
        """
        items = read_sources(self.cfg.paths.sources_manifest)
        logger.info(f"📥 源图清单: {len(items)} 张")

        calibration = self._load_calibration(items)
        totals = tally_calibration(calibration, self.detectors, self.consensus)
        ranked = rank_by_totals(self.detectors, totals)

        images_dir = self.out_dir / "images"
        rows, stats = [], {"total": len(items), "accepted": 0, "rejected": 0}

        for item in items:
            try:
                image = load_image(item.source_path)
            except PipelineIOError as e:
                logger.error(f"❌ {item.seed_id}: {e}")
                rejection = SeedRejection(item.seed_id, item.source_path, item.class_id, REASON_UNREADABLE, str(e))
                rows.append(rejection.to_row())
                stats["rejected"] += 1
                stats[REASON_UNREADABLE] = stats.get(REASON_UNREADABLE, 0) + 1
                continue

            result = extract_seed(
                image,
                item.class_id,
                ranked,
                min_dim=self.cfg.min_dim,
                buffer_factor=self.cfg.buffer_factor,
                seed_id=item.seed_id,
                source_path=item.source_path,
                vehicle_labels=self.cfg.detectors.vehicle_labels,
            )

            if isinstance(result, SeedRejection):
                logger.info(f"⏭️  {item.seed_id}: 拒绝 ({result.reason}) {result.detail}")
                rows.append(result.to_row())
                stats["rejected"] += 1
                stats[result.reason] = stats.get(result.reason, 0) + 1
                continue

            image_rel = f"images/{result.seed_id}.png"
            save_png(result.crop_image, self.out_dir / image_rel)
            rows.append(result.to_row(image_rel))
            stats["accepted"] += 1

            if keep_uncropped:
                self._write_uncropped(item, image, result)

        write_jsonl(self.out_dir / "manifest.jsonl", rows, sort_key=lambda r: r["seed_id"])
        ranking = {
            "order": [d.name for d in ranked],
            "votes": totals,
            "vote_iou_threshold": self.consensus.vote_iou_threshold,
            "calibration_size": len(calibration),
        }
        (self.out_dir / "ranking.json").write_text(
            json.dumps(ranking, indent=2, sort_keys=True, ensure_ascii=False) + "\n", encoding="utf-8"
        )

        logger.info(
            f"✅ 种子提取完成: 接受 {stats['accepted']} / 拒绝 {stats['rejected']} / 共 {stats['total']}"
        )
        return stats

    def _write_uncropped(self, item: SourceItem, image: np.ndarray, seed: SeedRecord):
        """保留原图与其单目标标签，作为只用真实图训练的基线"""
        base = self.out_dir / "uncropped"
        height, width = image.shape[:2]
        source = Path(item.source_path)
        if source.suffix.lower() == ".png":
            (base / "images").mkdir(parents=True, exist_ok=True)
            shutil.copyfile(source, base / "images" / f"{seed.seed_id}.png")
        else:
            save_png(image, base / "images" / f"{seed.seed_id}.png")

        annotation = NormAnnotation.from_pixel_box(seed.class_id, seed.detected_box, width, height)
        label_path = base / "labels" / f"{seed.seed_id}.txt"
        label_path.parent.mkdir(parents=True, exist_ok=True)
        label_path.write_text(serialize_labels([annotation]), encoding="utf-8")


def load_seeds(workdir) -> List[SeedRecord]:
    """读取种子清单中所有已接受的种子（按 seed_id 排序）"""
    seeds_dir = Path(workdir) / "seeds"
    rows = read_jsonl(seeds_dir / "manifest.jsonl")
    seeds = [SeedRecord.from_row(row, seeds_dir) for row in rows if row.get("status") == "accepted"]
    seeds.sort(key=lambda s: s.seed_id)
    return seeds
