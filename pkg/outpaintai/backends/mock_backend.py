"""
Mock 生成后端 - 用于测试

不依赖任何模型：
- smooth：低频渐变（TV 很低）
- noisy：32×32 随机色块放大到画布（TV 很高）
保留区（掩码 = 0）与输入画布逐像素一致；每张输出按摘要登记生成模式，
供 FixtureIqaProvider 给出对应分数
"""
import asyncio
from collections import OrderedDict
from typing import Dict, Optional, Tuple

import numpy as np

from .base import BaseGenerativeBackend
from ..exceptions import ConfigError
from ..logger import get_logger
from ..utils import image_digest

logger = get_logger("backends.mock")

MODES = ("always-smooth", "always-noisy", "noisy-first-k")

# noisy 模式的色块网格边长
NOISE_GRID = 32
# smooth 模式渐变两端每个通道的最大色差
GRADIENT_SPAN = 60
# 摘要登记表上限；超出后淘汰最早登记的输出（评分紧跟在生成之后）
TAG_CAPACITY = 4096


def smooth_field(height: int, width: int, rng: np.random.Generator) -> np.ndarray:
    """随机方向的线性渐变"""
    start = rng.uniform(40, 215, size=3)
    end = np.clip(start + rng.uniform(-GRADIENT_SPAN, GRADIENT_SPAN, size=3), 0, 255)
    angle = rng.uniform(0, 2 * np.pi)

    ys, xs = np.mgrid[0:height, 0:width].astype(np.float64)
    t = xs * np.cos(angle) + ys * np.sin(angle)
    t = (t - t.min()) / max(t.max() - t.min(), 1e-9)
    return start[None, None, :] * (1 - t[..., None]) + end[None, None, :] * t[..., None]


def noisy_field(height: int, width: int, rng: np.random.Generator) -> np.ndarray:
    """随机色块（最近邻放大）"""
    cells = rng.integers(0, 256, size=(NOISE_GRID, NOISE_GRID, 3)).astype(np.float64)
    rows = (np.arange(height) * NOISE_GRID) // height
    cols = (np.arange(width) * NOISE_GRID) // width
    return cells[rows][:, cols]


class MockBackend(BaseGenerativeBackend):
    """Mock 生成后端（测试用）"""

    name = "mock"

    def __init__(
        self,
        api_key: Optional[str] = None,
        mode: str = "always-smooth",
        noisy_k: int = 3,
        tag_capacity: int = TAG_CAPACITY,
        **kwargs
    ):
        """
        Args:
            mode: always-smooth / always-noisy / noisy-first-k
            noisy_k: noisy-first-k 模式下每个请求键前 k 次输出噪声
            tag_capacity: 摘要登记表最多保留的条目数
        """
        super().__init__(api_key, **kwargs)
        if mode not in MODES:
            raise ConfigError(f"未知的 mock 模式: {mode}。支持: {', '.join(MODES)}")
        self.mode = mode
        self.noisy_k = int(noisy_k)
        # 图像摘要 -> smooth / noisy
        self.tags: "OrderedDict[str, str]" = OrderedDict()
        self.tag_capacity = max(1, int(tag_capacity))
        # 请求键 -> 已调用次数
        self.calls: Dict[str, int] = {}
        logger.info(f"初始化 Mock 生成后端（{mode}, k={noisy_k}）")

    def _next_style(self, key: str) -> str:
        n = self.calls.get(key, 0)
        self.calls[key] = n + 1
        if self.mode == "always-smooth":
            return "smooth"
        if self.mode == "always-noisy":
            return "noisy"
        return "noisy" if n < self.noisy_k else "smooth"

    def _field(self, style: str, height: int, width: int, noise_seed: int) -> np.ndarray:
        rng = np.random.default_rng(noise_seed)
        if style == "smooth":
            return smooth_field(height, width, rng)
        return noisy_field(height, width, rng)

    def _register(self, image: np.ndarray, style: str) -> np.ndarray:
        digest = image_digest(image)
        self.tags[digest] = style
        self.tags.move_to_end(digest)
        while len(self.tags) > self.tag_capacity:
            self.tags.popitem(last=False)
        return image

    async def outpaint(
        self,
        canvas: np.ndarray,
        mask: np.ndarray,
        positive: str,
        negative: str,
        noise_seed: int,
        **kwargs
    ) -> np.ndarray:
        key = kwargs.get("request_key") or image_digest(canvas) + image_digest(mask)
        style = self._next_style(f"outpaint:{key}")
        await asyncio.sleep(0)

        height, width = canvas.shape[:2]
        generated = self._field(style, height, width, noise_seed)
        alpha = (mask.astype(np.float64) / 255.0)[..., None]
        blended = canvas.astype(np.float64) * (1 - alpha) + generated * alpha
        out = np.clip(np.rint(blended), 0, 255).astype(np.uint8)
        out[mask == 0] = canvas[mask == 0]

        logger.debug(f"Mock outpaint: {style} (seed={noise_seed})")
        return self._register(out, style)

    async def text_to_image(
        self,
        positive: str,
        negative: str,
        noise_seed: int,
        size: Tuple[int, int] = (512, 512),
        **kwargs
    ) -> np.ndarray:
        key = kwargs.get("request_key") or "text_to_image"
        style = self._next_style(f"t2i:{key}")
        await asyncio.sleep(0)

        width, height = size
        out = np.clip(np.rint(self._field(style, height, width, noise_seed)), 0, 255).astype(np.uint8)
        logger.debug(f"Mock text_to_image: {style} (seed={noise_seed})")
        return self._register(out, style)

    def get_backend_name(self) -> str:
        return f"Mock Backend ({self.mode})"

    async def close(self):
        # 原地清空，评分器持有的是同一个登记表
        self.tags.clear()
        self.calls.clear()
