"""
检测器共识投票

每个模型给出一张图中最大的车辆框，两两比较 IoU，达到阈值的每一对
双方各得一票；票数在整个校准集上累加，得票最高的模型作为主检测器，
其余按票数作为备用（同票按预定义集成顺序）
"""
from dataclasses import dataclass, field
from itertools import combinations
from typing import Dict, Iterable, List, Mapping, Optional, Sequence, Tuple

import numpy as np

from .detectors.base import BaseDetector, Detection
from .. import config
from ..exceptions import ConfigError, ValidationError
from ..geometry import PixelBox, iou
from ..logger import get_logger

logger = get_logger("seeds.consensus")


@dataclass
class ConsensusConfig:
    """共识投票配置"""

    vote_iou_threshold: float = 0.95
    ensemble: List[str] = field(default_factory=lambda: list(config.DETECTOR_ENSEMBLE))
    vehicle_labels: List[str] = field(default_factory=lambda: list(config.VEHICLE_LABELS))
    calibration_set: List[str] = field(default_factory=list)

    def __post_init__(self):
        if not (0 < self.vote_iou_threshold <= 1):
            raise ConfigError(f"vote_iou_threshold 必须在 (0, 1]: {self.vote_iou_threshold}")


def largest_box(
    detections: Iterable[Detection],
    vehicle_labels: Optional[Sequence[str]] = None,
) -> Optional[PixelBox]:
    """
    取面积最大的车辆框

    Args:
        detections: 检测结果
        vehicle_labels: 视为车辆的粗粒度类别（None 表示不过滤）

    Returns:
        最大框；面积相同时取 y_min 更小、再取 x_min 更小者；没有车辆时返回 None
    """
    labels = {l.lower() for l in vehicle_labels} if vehicle_labels is not None else None
    candidates = [
        d.box for d in detections
        if labels is None or d.label.lower() in labels
    ]
    if not candidates:
        return None
    return min(candidates, key=lambda b: (-b.area, b.y_min, b.x_min))


def consensus_vote(
    per_model_boxes: Mapping[str, Optional[PixelBox]],
    cfg: ConsensusConfig,
) -> Dict[str, int]:
    """
    单张图的两两投票

    Args:
        per_model_boxes: 模型 -> 该模型的最大框（None 表示未检测到或失败）
        cfg: 共识配置

    Returns:
        模型 -> 票数（包含未参与投票的模型，票数为 0）
    """
    tally = {model: 0 for model in per_model_boxes}
    participants = [(m, b) for m, b in per_model_boxes.items() if b is not None]

    for (model_a, box_a), (model_b, box_b) in combinations(participants, 2):
        if iou(box_a, box_b) >= cfg.vote_iou_threshold:
            tally[model_a] += 1
            tally[model_b] += 1
    return tally


def tally_calibration(
    calibration_images: Sequence[Tuple[str, np.ndarray]],
    ensemble: Sequence[BaseDetector],
    cfg: ConsensusConfig,
) -> Dict[str, int]:
    """
    在校准集上累加票数

    Args:
        calibration_images: (image_key, image) 列表
        ensemble: 按预定义顺序排列的检测器
        cfg: 共识配置

    Returns:
        模型 -> 总票数
    """
    if not calibration_images:
        raise ValidationError("校准集为空，无法对检测器排序")

    totals = {d.name: 0 for d in ensemble}
    for image_key, image in calibration_images:
        boxes: Dict[str, Optional[PixelBox]] = {}
        for detector in ensemble:
            try:
                boxes[detector.name] = largest_box(detector.detect(image, image_key), cfg.vehicle_labels)
            except Exception as e:
                # 失败的模型在这张图上不得票
                logger.warning(f"⚠️  {detector.name} 在 {image_key} 上检测失败: {e}")
                boxes[detector.name] = None
        for model, votes in consensus_vote(boxes, cfg).items():
            totals[model] += votes
    return totals


def rank_by_totals(ensemble: Sequence[BaseDetector], totals: Mapping[str, int]) -> List[BaseDetector]:
    """按总票数降序排列，同票保持预定义集成顺序"""
    order = {d.name: i for i, d in enumerate(ensemble)}
    ranked = sorted(ensemble, key=lambda d: (-totals.get(d.name, 0), order[d.name]))

    summary = ", ".join(f"{d.name}={totals.get(d.name, 0)}" for d in ranked)
    logger.info(f"🗳️  检测器投票: {summary}")
    logger.info(f"✅ 主检测器: {ranked[0].name}")
    return ranked


def rank_detectors(
    calibration_images: Sequence[Tuple[str, np.ndarray]],
    ensemble: Sequence[BaseDetector],
    cfg: ConsensusConfig,
) -> List[BaseDetector]:
    """
    按校准集总票数对检测器排序

    Returns:
        排序后的检测器列表：第一个为主检测器，其余为备用
    """
    totals = tally_calibration(calibration_images, ensemble, cfg)
    return rank_by_totals(ensemble, totals)
