"""
Fixture 检测器 - 从旁注文件读取检测结果

用于测试和离线复现，不需要模型权重。旁注文件与源图同名：
`<stem>.detections.json`，内容为按模型名分组的框列表：

    {"fcos": [[x_min, y_min, x_max, y_max, confidence, "car"], ...],
     "ssd":  [...],
     "*":    [...]}

"*" 为所有模型共用的默认结果；某模型对应 null 时模拟该模型推理失败
"""
import json
from pathlib import Path
from typing import Dict, List, Optional

import numpy as np

from .base import BaseDetector, Detection
from ...exceptions import BackendError, PipelineIOError
from ...geometry import PixelBox
from ...logger import get_logger

logger = get_logger("seeds.fixture")

SIDECAR_SUFFIX = ".detections.json"


def sidecar_path(image_key: str, fixture_dir: Optional[str] = None) -> Path:
    source = Path(image_key)
    directory = Path(fixture_dir) if fixture_dir else source.parent
    return directory / f"{source.stem}{SIDECAR_SUFFIX}"


class FixtureDetector(BaseDetector):
    """读取旁注文件的确定性检测器"""

    def __init__(self, name: str, rank: int = 0, fixture_dir: str = "", **kwargs):
        super().__init__(name, rank, **kwargs)
        self.fixture_dir = fixture_dir
        self._cache: Dict[str, dict] = {}

    def _load(self, image_key: str) -> dict:
        if image_key in self._cache:
            return self._cache[image_key]
        path = sidecar_path(image_key, self.fixture_dir)
        if not path.exists():
            data = {}
        else:
            try:
                data = json.loads(path.read_text(encoding="utf-8"))
            except json.JSONDecodeError as e:
                raise PipelineIOError(f"旁注文件格式错误 {path}: {e}") from e
        self._cache[image_key] = data
        return data

    def detect(self, image: np.ndarray, image_key: Optional[str] = None) -> List[Detection]:
        if image_key is None:
            raise ValueError("FixtureDetector 需要 image_key")

        data = self._load(image_key)
        entries = data.get(self.name, data.get("*", []))
        if entries is None:
            raise BackendError(f"{self.name} 推理失败（fixture）: {image_key}")

        height, width = image.shape[:2]
        detections = []
        for entry in entries:
            x0, y0, x1, y1 = (float(v) for v in entry[:4])
            confidence = float(entry[4]) if len(entry) > 4 else 1.0
            label = str(entry[5]) if len(entry) > 5 else "car"
            # 裁剪到图像范围内
            x0, y0 = max(0.0, x0), max(0.0, y0)
            x1, y1 = min(float(width), x1), min(float(height), y1)
            if x1 <= x0 or y1 <= y0:
                continue
            detections.append(Detection(PixelBox(x0, y0, x1, y1), confidence, label))

        logger.debug(f"{self.name}: {Path(image_key).name} -> {len(detections)} 个框")
        return detections
