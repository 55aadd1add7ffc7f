"""
torchvision 预训练检测器

需要安装: pip install torch torchvision
首次使用会下载 COCO 预训练权重
"""
from typing import List, Optional

import numpy as np

from .base import BaseDetector, Detection
from ...exceptions import ConfigError
from ...geometry import PixelBox
from ...logger import get_logger

logger = get_logger("seeds.torchvision")

# 模型名 -> torchvision 构造函数名
MODEL_BUILDERS = {
    "fcos": "fcos_resnet50_fpn",
    "retinanet": "retinanet_resnet50_fpn",
    "ssd": "ssd300_vgg16",
    "maskrcnn": "maskrcnn_resnet50_fpn",
    "fasterrcnn": "fasterrcnn_resnet50_fpn",
}

# COCO 类别 ID
COCO_LABELS = {3: "car", 6: "bus", 8: "truck"}


class TorchvisionDetector(BaseDetector):
    """包装 torchvision.models.detection 中的预训练模型"""

    def __init__(
        self,
        name: str,
        rank: int = 0,
        device: str = "cpu",
        score_threshold: float = 0.5,
        **kwargs
    ):
        super().__init__(name, rank, **kwargs)

        if name not in MODEL_BUILDERS:
            raise ConfigError(
                f"不支持的检测模型: {name}。支持: {', '.join(MODEL_BUILDERS)}"
            )

        try:
            import torch
            from torchvision.models import detection
        except ImportError:
            raise ImportError(
                "需要安装 torch 和 torchvision 才能使用真实检测器: pip install torch torchvision"
            )

        self._torch = torch
        self.device = torch.device(device)
        self.score_threshold = score_threshold

        builder = getattr(detection, MODEL_BUILDERS[name])
        self.model = builder(weights="DEFAULT").to(self.device).eval()

        logger.info(f"初始化检测器 {name} ({MODEL_BUILDERS[name]}, device={device})")

    def detect(self, image: np.ndarray, image_key: Optional[str] = None) -> List[Detection]:
        torch = self._torch
        tensor = torch.from_numpy(image).permute(2, 0, 1).float().div(255.0).to(self.device)

        with torch.no_grad():
            output = self.model([tensor])[0]

        detections = []
        boxes = output["boxes"].cpu().numpy()
        scores = output["scores"].cpu().numpy()
        labels = output["labels"].cpu().numpy()
        height, width = image.shape[:2]

        for box, score, label in zip(boxes, scores, labels):
            if score < self.score_threshold or int(label) not in COCO_LABELS:
                continue
            x0, y0 = max(0.0, float(box[0])), max(0.0, float(box[1]))
            x1, y1 = min(float(width), float(box[2])), min(float(height), float(box[3]))
            if x1 <= x0 or y1 <= y0:
                continue
            detections.append(Detection(PixelBox(x0, y0, x1, y1), float(score), COCO_LABELS[int(label)]))

        return detections

    def close(self):
        self.model = None
