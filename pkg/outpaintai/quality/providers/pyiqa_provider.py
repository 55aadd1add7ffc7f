"""
pyiqa 评分器

需要安装: pip install pyiqa torch
"""
import numpy as np

from .base import BaseIqaProvider, HIGHER_BETTER, LOWER_BETTER
from ...exceptions import ConfigError
from ...logger import get_logger

logger = get_logger("quality.pyiqa")

METRIC_DIRECTIONS = {
    "brisque": LOWER_BETTER,
    "clipiqa": HIGHER_BETTER,
}


class PyiqaProvider(BaseIqaProvider):
    """包装 pyiqa.create_metric"""

    def __init__(self, metric: str, device: str = "cpu", **kwargs):
        if metric not in METRIC_DIRECTIONS:
            raise ConfigError(f"不支持的 pyiqa 指标: {metric}。支持: {', '.join(METRIC_DIRECTIONS)}")
        super().__init__(metric, METRIC_DIRECTIONS[metric], **kwargs)

        try:
            import torch
            import pyiqa
        except ImportError:
            raise ImportError("需要安装 pyiqa 才能计算 BRISQUE / CLIP-IQA: pip install pyiqa torch")

        self._torch = torch
        self.device = torch.device(device)
        self.model = pyiqa.create_metric(metric, device=self.device)
        logger.info(f"初始化 pyiqa 指标: {metric} (device={device})")

    def score(self, image: np.ndarray) -> float:
        torch = self._torch
        # (1, 3, H, W)，取值 [0, 1]
        x = torch.from_numpy(np.ascontiguousarray(image)).permute(2, 0, 1).float().div(255.0)
        x = x.unsqueeze(0).to(self.device)
        with torch.no_grad():
            return float(self.model(x).item())

    def get_provider_name(self) -> str:
        return f"pyiqa:{self.metric}"

    def close(self):
        self.model = None
