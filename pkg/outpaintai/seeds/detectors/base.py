"""
检测器适配器基类 - 只负责"图像 → 候选框"
"""
from abc import ABC, abstractmethod
from dataclasses import dataclass
from typing import List, Optional

import numpy as np

from ...geometry import PixelBox


@dataclass(frozen=True)
class Detection:
    """单个检测结果"""

    box: PixelBox
    confidence: float
    label: str


class BaseDetector(ABC):
    """
    检测器基类

    职责：只返回候选框（像素坐标、置信度、粗粒度类别），不做类别判定；
    同一图像多次调用结果必须一致
    """

    def __init__(self, name: str, rank: int = 0, **kwargs):
        """
        Args:
            name: 模型标识（fcos / retinanet / ...）
            rank: 在预定义集成顺序中的位置
            **kwargs: 其他配置
        """
        self.name = name
        self.rank = rank
        self.config = kwargs

    @abstractmethod
    def detect(self, image: np.ndarray, image_key: Optional[str] = None) -> List[Detection]:
        """
        检测图像中的目标

        Args:
            image: (H, W, 3) uint8 图像
            image_key: 图像标识（源文件路径），fixture 检测器按它查找旁注

        Returns:
            检测结果列表（可能为空）
        """
        pass

    def get_detector_name(self) -> str:
        return self.name

    def close(self):
        """释放模型（如果需要）"""
        pass

    def __repr__(self) -> str:
        return f"{type(self).__name__}(name={self.name!r}, rank={self.rank})"
