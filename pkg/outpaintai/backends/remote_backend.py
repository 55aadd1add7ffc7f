"""
远程推理服务后端

请求（JSON）：
    POST {endpoint}/outpaint    {canvas, mask, positive, negative, noise_seed, size}
    POST {endpoint}/text2image  {positive, negative, noise_seed, size}
canvas / mask 为 base64 PNG；响应为图像字节，或 JSON {"image": base64}
"""
import asyncio
import base64
from typing import Optional, Tuple

import aiohttp
import numpy as np

from .base import BaseGenerativeBackend
from .. import config
from ..exceptions import BackendError
from ..logger import get_logger
from ..proxy import ProxyFactory
from ..utils import decode_image, encode_png

logger = get_logger("backends.remote")


class RemoteBackend(BaseGenerativeBackend):
    """HTTP 推理服务"""

    name = "remote"

    def __init__(self, api_key: Optional[str] = None, **kwargs):
        """
        Args:
            api_key: Bearer token（可选）
            **kwargs:
                - endpoint: 服务地址（必填）
                - timeout: 单次请求超时（秒）
                - retries: 失败重试次数
                - mask_inverted: 服务端是否使用 0 = 生成 的约定
        """
        super().__init__(api_key, **kwargs)
        self.endpoint = (kwargs.get("endpoint") or config.OUTPAINT_BACKEND_ENDPOINT).rstrip("/")
        if not self.endpoint:
            raise BackendError("remote 后端需要配置 OUTPAINT_BACKEND_ENDPOINT")
        self.timeout = float(kwargs.get("timeout", config.OUTPAINT_REQUEST_TIMEOUT))
        self.retries = int(kwargs.get("retries", config.OUTPAINT_REQUEST_RETRIES))
        self.mask_inverted = bool(kwargs.get("mask_inverted", False))
        self.proxy = ProxyFactory.for_endpoint(self.endpoint)
        self.session: Optional[aiohttp.ClientSession] = None
        logger.info(f"初始化远程后端: {self.endpoint} (timeout={self.timeout}s, retries={self.retries})")

    async def _ensure_session(self) -> aiohttp.ClientSession:
        if self.session is None or self.session.closed:
            headers = {"Authorization": f"Bearer {self.api_key}"} if self.api_key else {}
            self.session = aiohttp.ClientSession(headers=headers)
        return self.session

    async def _post(self, path: str, payload: dict, size: Tuple[int, int]) -> np.ndarray:
        session = await self._ensure_session()
        url = f"{self.endpoint}/{path}"
        last_error = None

        for attempt in range(self.retries + 1):
            try:
                async with session.post(
                    url,
                    json=payload,
                    proxy=self.proxy,
                    timeout=aiohttp.ClientTimeout(total=self.timeout),
                ) as resp:
                    if resp.status != 200:
                        text = await resp.text()
                        raise BackendError(f"HTTP {resp.status}: {text[:200]}")
                    if resp.content_type == "application/json":
                        data = await resp.json()
                        if "image" not in data:
                            raise BackendError(f"响应缺少 image 字段: {list(data)}")
                        raw = base64.b64decode(data["image"])
                    else:
                        raw = await resp.read()
                return decode_image(raw, size)

            except asyncio.TimeoutError:
                last_error = BackendError(f"请求超时 ({self.timeout}s): {url}")
            except aiohttp.ClientError as e:
                last_error = BackendError(f"网络错误: {e}")
            except BackendError as e:
                last_error = e

            if attempt < self.retries:
                delay = 2 ** attempt
                logger.warning(f"⚠️  {url} 第 {attempt + 1} 次请求失败，{delay}s 后重试: {last_error}")
                await asyncio.sleep(delay)

        raise last_error

    async def outpaint(self, canvas, mask, positive, negative, noise_seed, **kwargs) -> np.ndarray:
        height, width = canvas.shape[:2]
        wire_mask = 255 - mask if self.mask_inverted else mask
        payload = {
            "canvas": base64.b64encode(encode_png(canvas)).decode("ascii"),
            "mask": base64.b64encode(encode_png(wire_mask)).decode("ascii"),
            "positive": positive,
            "negative": negative,
            "noise_seed": int(noise_seed),
            "size": [width, height],
        }
        return await self._post("outpaint", payload, (width, height))

    async def text_to_image(self, positive, negative, noise_seed, size: Tuple[int, int] = (512, 512), **kwargs) -> np.ndarray:
        payload = {
            "positive": positive,
            "negative": negative,
            "noise_seed": int(noise_seed),
            "size": list(size),
        }
        return await self._post("text2image", payload, tuple(size))

    def get_backend_name(self) -> str:
        return f"Remote ({self.endpoint})"

    async def close(self):
        if self.session and not self.session.closed:
            await self.session.close()
        logger.debug("远程后端会话已关闭")
