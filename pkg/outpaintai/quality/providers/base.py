"""
无参考质量评分器基类
"""
from abc import ABC, abstractmethod

import numpy as np

LOWER_BETTER = "lower"
HIGHER_BETTER = "higher"


class BaseIqaProvider(ABC):
    """
    评分器基类

    职责：只给单张图打分（同一图像分数必须一致），门限判断由 QualityGate 负责
    """

    # 是否允许多个 worker 同时调用
    concurrency_safe = False

    def __init__(self, metric: str, direction: str, **kwargs):
        """
        Args:
            metric: 指标名（brisque / clipiqa）
            direction: lower 或 higher（分数越低/越高越好）
            **kwargs: 其他配置
        """
        if direction not in (LOWER_BETTER, HIGHER_BETTER):
            raise ValueError(f"direction 必须是 lower/higher: {direction}")
        self.metric = metric
        self.direction = direction
        self.config = kwargs

    @abstractmethod
    def score(self, image: np.ndarray) -> float:
        """
        打分

        Args:
            image: (H, W, 3) uint8 图像

        Returns:
            分数
        """
        pass

    @abstractmethod
    def get_provider_name(self) -> str:
        pass

    def close(self):
        pass
