"""
检测结果与真值的贪心匹配
"""
from dataclasses import dataclass, field
from typing import List, Tuple

from ..exceptions import ValidationError
from ..geometry import PixelBox, iou


@dataclass
class DetectionSample:
    """单张图像的真值与预测"""

    image_id: str
    ground_truth: List[Tuple[int, PixelBox]] = field(default_factory=list)
    predictions: List[Tuple[int, PixelBox, float]] = field(default_factory=list)

    def __post_init__(self):
        for _, _, confidence in self.predictions:
            if not (0.0 <= confidence <= 1.0):
                raise ValidationError(f"{self.image_id}: 置信度超出 [0, 1]: {confidence}")

    def sorted_predictions(self, class_id: int = None) -> List[Tuple[int, PixelBox, float]]:
        """按置信度降序（同分保持插入顺序）"""
        preds = [p for p in self.predictions if class_id is None or p[0] == class_id]
        return sorted(preds, key=lambda p: -p[2])


def match_detections(sample: DetectionSample, class_id: int, iou_threshold: float) -> Tuple[List[bool], List[float], int]:
    """
    单类别贪心一对一匹配

    预测按置信度从高到低依次认领 IoU 最高、尚未匹配、且 IoU >= 阈值的同类真值

    Args:
        sample: 单张图像
        class_id: 类别
        iou_threshold: IoU 阈值

    Returns:
        (每个预测是否 TP, 对应置信度, FN 数量)，预测顺序为置信度降序
    """
    truths = [box for cid, box in sample.ground_truth if cid == class_id]
    matched = [False] * len(truths)
    flags, confidences = [], []

    for _, box, confidence in sample.sorted_predictions(class_id):
        best, best_iou = -1, iou_threshold
        for j, truth in enumerate(truths):
            if matched[j]:
                continue
            overlap = iou(box, truth)
            if overlap >= best_iou and (best < 0 or overlap > best_iou):
                best, best_iou = j, overlap
        if best >= 0:
            matched[best] = True
        flags.append(best >= 0)
        confidences.append(confidence)

    return flags, confidences, matched.count(False)
