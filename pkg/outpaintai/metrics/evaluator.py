"""
检测评估

mAP50、mAP50-95（IoU 0.50:0.05:0.95）、fitness、F1 最大处的 P/R、混淆矩阵；
输出 reports/metrics.json 与 reports/confusion.csv
"""
import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
import pandas as pd

from .ap import average_precision
from .matching import DetectionSample, match_detections
from ..exceptions import PipelineIOError, ValidationError
from ..geometry import ClassRegistry, DEFAULT_REGISTRY, iou, parse_labels, parse_predictions
from ..logger import get_logger

logger = get_logger("metrics.evaluator")

IOU_THRESHOLDS = tuple(round(0.5 + 0.05 * i, 2) for i in range(10))
# F1 曲线的置信度网格
CONFIDENCE_GRID = np.linspace(0.0, 1.0, 1001)


def fitness(map50: float, map50_95: float) -> float:
    """0.1 · mAP50 + 0.9 · mAP50-95"""
    return 0.1 * map50 + 0.9 * map50_95


def f1(precision: float, recall: float) -> float:
    """调和平均，两者都为 0 时返回 0"""
    total = precision + recall
    return 2 * precision * recall / total if total > 0 else 0.0


@dataclass
class MapResult:
    map50: float
    map50_95: float
    # class_id → 每个 IoU 阈值的 AP
    per_class: Dict[int, List[float]] = field(default_factory=dict)
    thresholds: Tuple[float, ...] = IOU_THRESHOLDS


def compute_map(samples: Sequence[DetectionSample], thresholds: Sequence[float] = IOU_THRESHOLDS) -> MapResult:
    """
    计算 mAP

    Args:
        samples: 图像列表
        thresholds: IoU 阈值（必须包含 0.5）

    Returns:
        MapResult；没有真值的类别不参与平均

    Raises:
        ValidationError: 输入为空或没有可评估的类别
    """
    if not samples:
        raise ValidationError("评估样本为空")
    thresholds = tuple(float(t) for t in thresholds)

    classes = sorted({cid for s in samples for cid, _ in s.ground_truth})
    if not classes:
        raise ValidationError("没有任何真值框，无法计算 mAP")

    per_class: Dict[int, List[float]] = {}
    for class_id in classes:
        aps = []
        for threshold in thresholds:
            flags, confs, total_gt = [], [], 0
            for sample in samples:
                f, c, fn = match_detections(sample, class_id, threshold)
                flags += f
                confs += c
                total_gt += sum(f) + fn
            aps.append(average_precision(flags, confs, total_gt))
        per_class[class_id] = aps

    index50 = min(range(len(thresholds)), key=lambda i: abs(thresholds[i] - 0.5))
    matrix = np.array([per_class[c] for c in classes], dtype=np.float64)
    return MapResult(
        map50=float(matrix[:, index50].mean()),
        map50_95=float(matrix.mean()),
        per_class=per_class,
        thresholds=thresholds,
    )


def precision_recall_at_best_f1(samples: Sequence[DetectionSample], iou_threshold: float = 0.5) -> Dict[str, float]:
    """
    在使类别平均 F1 最大的置信度处给出平均 P/R

    Returns:
        {"precision", "recall", "f1", "confidence"}
    """
    classes = sorted({cid for s in samples for cid, _ in s.ground_truth})
    if not classes:
        return {"precision": 0.0, "recall": 0.0, "f1": 0.0, "confidence": 0.0}

    precisions, recalls = [], []
    for class_id in classes:
        flags, confs, total_gt = [], [], 0
        for sample in samples:
            f, c, fn = match_detections(sample, class_id, iou_threshold)
            flags += f
            confs += c
            total_gt += sum(f) + fn
        flags = np.asarray(flags, dtype=np.float64)
        confs = np.asarray(confs, dtype=np.float64)

        # 对每个网格点统计置信度 >= c 的 TP / 预测数
        above = confs[None, :] >= CONFIDENCE_GRID[:, None]
        tp = (above * flags[None, :]).sum(axis=1)
        kept = above.sum(axis=1)
        precisions.append(np.where(kept > 0, tp / np.maximum(kept, 1), 0.0))
        recalls.append(tp / max(total_gt, 1))

    p = np.mean(precisions, axis=0)
    r = np.mean(recalls, axis=0)
    f1_curve = np.mean([2 * pc * rc / np.maximum(pc + rc, 1e-12) for pc, rc in zip(precisions, recalls)], axis=0)
    best = int(np.argmax(f1_curve))
    return {
        "precision": float(p[best]),
        "recall": float(r[best]),
        "f1": f1(float(p[best]), float(r[best])),
        "confidence": float(CONFIDENCE_GRID[best]),
    }


def confusion_matrix(
    samples: Sequence[DetectionSample],
    num_classes: int,
    confidence_threshold: float = 0.25,
    iou_threshold: float = 0.50,
) -> np.ndarray:
    """
    混淆矩阵（行 = 预测类别，列 = 真实类别，最后一行/列为背景）

    同一图像内，IoU >= 阈值的 (预测, 真值) 对按 IoU 降序一对一匹配（不区分类别）；
    未匹配的预测记到 (预测类别, 背景)，未匹配的真值记到 (背景, 真实类别)

    Returns:
        (C+1, C+1) 计数矩阵
    """
    bg = num_classes
    matrix = np.zeros((num_classes + 1, num_classes + 1), dtype=np.int64)

    for sample in samples:
        preds = [p for p in sample.sorted_predictions() if p[2] >= confidence_threshold]
        truths = sample.ground_truth

        pairs = []
        for i, (_, pbox, _) in enumerate(preds):
            for j, (_, tbox) in enumerate(truths):
                overlap = iou(pbox, tbox)
                if overlap >= iou_threshold:
                    pairs.append((-overlap, i, j))
        pairs.sort()

        used_p, used_t = set(), set()
        for _, i, j in pairs:
            if i in used_p or j in used_t:
                continue
            used_p.add(i)
            used_t.add(j)
            matrix[preds[i][0], truths[j][0]] += 1

        for i, (cid, _, _) in enumerate(preds):
            if i not in used_p:
                matrix[cid, bg] += 1
        for j, (cid, _) in enumerate(truths):
            if j not in used_t:
                matrix[bg, cid] += 1
    return matrix


def normalize_columns(matrix: np.ndarray) -> np.ndarray:
    """每列除以列和（全零列保持为 0）"""
    sums = matrix.sum(axis=0, keepdims=True).astype(np.float64)
    return np.divide(matrix, sums, out=np.zeros(matrix.shape, dtype=np.float64), where=sums > 0)


@dataclass
class MetricsReport:
    """评估报告"""

    precision: float
    recall: float
    f1: float
    map50: float
    map50_95: float
    fitness: float
    confidence: float
    per_class: Dict[str, Dict[str, float]]
    confusion: np.ndarray
    num_images: int

    def to_dict(self) -> dict:
        return {
            "precision": round(self.precision, 6),
            "recall": round(self.recall, 6),
            "f1": round(self.f1, 6),
            "operating_point": {"criterion": "max mean F1", "confidence": round(self.confidence, 6)},
            "mAP50": round(self.map50, 6),
            "mAP50_95": round(self.map50_95, 6),
            "fitness": round(self.fitness, 6),
            "per_class": self.per_class,
            "num_images": self.num_images,
        }

    def confusion_frame(self, registry: ClassRegistry = DEFAULT_REGISTRY, normalized: bool = False) -> pd.DataFrame:
        labels = registry.names + ["background"]
        data = normalize_columns(self.confusion) if normalized else self.confusion
        frame = pd.DataFrame(data, index=labels, columns=labels)
        frame.index.name = "predicted\\true"
        return frame


def evaluate(samples: Sequence[DetectionSample], registry: ClassRegistry = DEFAULT_REGISTRY,
             confidence_threshold: float = 0.25, iou_threshold: float = 0.5) -> MetricsReport:
    """汇总全部指标"""
    result = compute_map(samples)
    pr = precision_recall_at_best_f1(samples)
    per_class = {
        registry.name_of(cid): {"AP50": round(aps[0], 6), "AP50_95": round(float(np.mean(aps)), 6)}
        for cid, aps in result.per_class.items()
    }
    return MetricsReport(
        precision=pr["precision"],
        recall=pr["recall"],
        f1=pr["f1"],
        map50=result.map50,
        map50_95=result.map50_95,
        fitness=fitness(result.map50, result.map50_95),
        confidence=pr["confidence"],
        per_class=per_class,
        confusion=confusion_matrix(samples, len(registry), confidence_threshold, iou_threshold),
        num_images=len(samples),
    )


def load_samples(labels_dir, preds_dir, registry: ClassRegistry = DEFAULT_REGISTRY) -> List[DetectionSample]:
    """
    读取真值标签目录与预测目录（同名 .txt）

    坐标在单位画布上比较，IoU 与图像尺寸无关；缺少预测文件视为没有预测

    Raises:
        PipelineIOError: 目录不存在
    """
    labels_dir, preds_dir = Path(labels_dir), Path(preds_dir)
    for path in (labels_dir, preds_dir):
        if not path.is_dir():
            raise PipelineIOError(f"目录不存在: {path}")

    samples = []
    for label_file in sorted(labels_dir.glob("*.txt")):
        truths = parse_labels(label_file.read_text(encoding="utf-8"), registry)
        pred_file = preds_dir / label_file.name
        preds = parse_predictions(pred_file.read_text(encoding="utf-8"), registry) if pred_file.exists() else []
        samples.append(DetectionSample(
            image_id=label_file.stem,
            ground_truth=[(a.class_id, a.to_pixel_box(1.0, 1.0)) for a in truths],
            predictions=[(a.class_id, a.to_pixel_box(1.0, 1.0), conf) for a, conf in preds],
        ))
    logger.info(f"📥 评估样本: {len(samples)} 张")
    return samples


def write_metrics(report: MetricsReport, out_dir, registry: ClassRegistry = DEFAULT_REGISTRY) -> Path:
    """写出 metrics.json 与 confusion.csv（计数）、confusion_normalized.csv"""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    path = out_dir / "metrics.json"
    path.write_text(json.dumps(report.to_dict(), indent=2, sort_keys=True) + "\n", encoding="utf-8")
    report.confusion_frame(registry).to_csv(out_dir / "confusion.csv", lineterminator="\n")
    report.confusion_frame(registry, normalized=True).round(6).to_csv(
        out_dir / "confusion_normalized.csv", lineterminator="\n"
    )
    logger.info(
        f"✅ mAP50 {report.map50:.3f} | mAP50-95 {report.map50_95:.3f} | "
        f"P {report.precision:.3f} R {report.recall:.3f} F1 {report.f1:.3f} | fitness {report.fitness:.3f}"
    )
    return path


def evaluate_dirs(labels_dir, preds_dir, out_dir, registry: ClassRegistry = DEFAULT_REGISTRY,
                  confidence_threshold: float = 0.25, iou_threshold: float = 0.5) -> MetricsReport:
    report = evaluate(load_samples(labels_dir, preds_dir, registry), registry, confidence_threshold, iou_threshold)
    write_metrics(report, out_dir, registry)
    return report
