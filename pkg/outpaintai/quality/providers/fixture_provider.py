"""
Fixture 评分器 - 返回预先记录的分数

查找顺序：按图像摘要记录的分数 → 按生成模式标签（mock 后端登记）→ 默认值；
都没有时抛出 LookupError，门限判断记为 skipped
"""
from typing import Dict, Mapping, Optional

import numpy as np

from .base import BaseIqaProvider, HIGHER_BETTER, LOWER_BETTER
from ...utils import image_digest

# mock 后端两种输出对应的分数
MODE_SCORES = {
    "brisque": {"smooth": 8.0, "noisy": 45.0},
    "clipiqa": {"smooth": 0.95, "noisy": 0.35},
}
DIRECTIONS = {"brisque": LOWER_BETTER, "clipiqa": HIGHER_BETTER}


class FixtureIqaProvider(BaseIqaProvider):
    """确定性评分器（测试与离线复现用）"""

    concurrency_safe = True

    def __init__(
        self,
        metric: str,
        scores: Optional[Dict[str, float]] = None,
        tags: Optional[Mapping[str, str]] = None,
        default: Optional[float] = None,
        **kwargs
    ):
        """
        Args:
            metric: brisque 或 clipiqa
            scores: 图像摘要 -> 分数
            tags: 图像摘要 -> 生成模式（smooth / noisy），通常引用 mock 后端的登记表
            default: 找不到时的默认分数
        """
        super().__init__(metric, DIRECTIONS.get(metric, LOWER_BETTER), **kwargs)
        self.scores = dict(scores or {})
        self.tags = tags if tags is not None else {}
        self.default = default

    def record(self, image: np.ndarray, score: float):
        """记录一张图的分数"""
        self.scores[image_digest(image)] = float(score)

    def score(self, image: np.ndarray) -> float:
        digest = image_digest(image)
        if digest in self.scores:
            return self.scores[digest]
        tag = self.tags.get(digest)
        if tag is not None and tag in MODE_SCORES.get(self.metric, {}):
            return MODE_SCORES[self.metric][tag]
        if self.default is not None:
            return self.default
        raise LookupError(f"fixture 中没有该图像的 {self.metric} 分数")

    def get_provider_name(self) -> str:
        return f"fixture:{self.metric}"
