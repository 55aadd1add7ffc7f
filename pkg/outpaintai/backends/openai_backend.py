"""
OpenAI 图像后端

外扩使用 images.edit（透明像素 = 生成区域），背景使用 images.generate；
接口不支持负向提示词和噪声种子，负向词以 "Avoid: ..." 追加到提示词中
需要安装: pip install openai
"""
import base64
from typing import Optional, Tuple

import numpy as np
from PIL import Image

from .base import BaseGenerativeBackend
from ..exceptions import BackendError
from ..logger import get_logger
from ..utils import decode_image

logger = get_logger("backends.openai")

DEFAULT_MODEL = "gpt-image-1"


def rgba_png(canvas: np.ndarray, mask: np.ndarray) -> bytes:
    """画布 + 掩码合成 RGBA PNG：alpha = 255 - mask（透明处重绘）"""
    import io

    rgba = np.dstack([canvas, (255 - mask).astype(np.uint8)])
    buf = io.BytesIO()
    Image.fromarray(rgba, mode="RGBA").save(buf, format="PNG")
    return buf.getvalue()


class OpenAIBackend(BaseGenerativeBackend):
    """OpenAI Images API"""

    name = "openai"

    def __init__(self, api_key: Optional[str] = None, **kwargs):
        """
        Args:
            api_key: OpenAI API 密钥
            **kwargs:
                - model: 模型名称（默认 gpt-image-1）
                - endpoint: 兼容服务的 base_url（可选）
                - timeout: 请求超时（秒）
        """
        super().__init__(api_key, **kwargs)

        try:
            from openai import AsyncOpenAI
        except ImportError:
            raise ImportError("需要安装 OpenAI SDK 才能使用 openai 后端: pip install openai")

        self.model = kwargs.get("model") or DEFAULT_MODEL
        client_kwargs = {"api_key": api_key, "timeout": float(kwargs.get("timeout", 120.0))}
        if kwargs.get("endpoint"):
            client_kwargs["base_url"] = kwargs["endpoint"]
        self.client = AsyncOpenAI(**client_kwargs)
        logger.info(f"初始化 OpenAI 图像后端 (模型: {self.model})")

    @staticmethod
    def _prompt(positive: str, negative: str) -> str:
        return f"{positive} Avoid: {negative}." if negative else positive

    @staticmethod
    def _decode(response, size: Tuple[int, int]) -> np.ndarray:
        item = response.data[0]
        if not getattr(item, "b64_json", None):
            raise BackendError("OpenAI 响应中没有 b64_json 图像")
        return decode_image(base64.b64decode(item.b64_json), size)

    async def outpaint(self, canvas, mask, positive, negative, noise_seed, **kwargs) -> np.ndarray:
        height, width = canvas.shape[:2]
        try:
            response = await self.client.images.edit(
                model=self.model,
                image=("canvas.png", rgba_png(canvas, mask), "image/png"),
                prompt=self._prompt(positive, negative),
                size=f"{width}x{height}",
            )
        except Exception as e:
            raise BackendError(f"OpenAI images.edit 调用失败: {e}") from e
        return self._decode(response, (width, height))

    async def text_to_image(self, positive, negative, noise_seed, size: Tuple[int, int] = (512, 512), **kwargs) -> np.ndarray:
        width, height = size
        try:
            response = await self.client.images.generate(
                model=self.model,
                prompt=self._prompt(positive, negative),
                size=f"{width}x{height}",
            )
        except Exception as e:
            raise BackendError(f"OpenAI images.generate 调用失败: {e}") from e
        return self._decode(response, (width, height))

    def get_backend_name(self) -> str:
        return f"OpenAI ({self.model})"

    async def close(self):
        await self.client.close()
        logger.debug("OpenAI 客户端已关闭")
