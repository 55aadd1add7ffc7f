"""
本地 Stable Diffusion 后端

使用 diffusers 的 inpainting 流水线做外扩，text-to-image 流水线生成背景
需要安装: pip install torch diffusers transformers
"""
import asyncio
from typing import Optional, Tuple

import numpy as np
from PIL import Image

from .base import BaseGenerativeBackend
from ..exceptions import BackendError
from ..logger import get_logger
from ..utils import from_pil, to_pil

logger = get_logger("backends.diffusers")

DEFAULT_INPAINT_MODEL = "stabilityai/stable-diffusion-2-inpainting"
DEFAULT_TEXT_MODEL = "stabilityai/stable-diffusion-2-1-base"


class DiffusersBackend(BaseGenerativeBackend):
    """diffusers 本地推理"""

    name = "diffusers"

    def __init__(self, api_key: Optional[str] = None, **kwargs):
        """
        Args:
            **kwargs:
                - model: inpainting 模型（默认 stable-diffusion-2-inpainting）
                - text_model: 文生图模型
                - device: cuda / cpu（默认自动）
                - steps: 推理步数（默认 50）
                - guidance_scale: 默认 7.5
        """
        super().__init__(api_key, **kwargs)

        try:
            import torch
            from diffusers import AutoPipelineForText2Image, StableDiffusionInpaintPipeline
        except ImportError:
            raise ImportError(
                "需要安装 diffusers 才能使用本地后端: pip install torch diffusers transformers"
            )

        self._torch = torch
        self.device = kwargs.get("device") or ("cuda" if torch.cuda.is_available() else "cpu")
        dtype = torch.float16 if self.device == "cuda" else torch.float32
        self.model = kwargs.get("model") or DEFAULT_INPAINT_MODEL
        self.text_model = kwargs.get("text_model") or DEFAULT_TEXT_MODEL
        self.steps = int(kwargs.get("steps", 50))
        self.guidance_scale = float(kwargs.get("guidance_scale", 7.5))

        self.inpaint_pipe = StableDiffusionInpaintPipeline.from_pretrained(
            self.model, torch_dtype=dtype
        ).to(self.device)
        self._text_pipe_cls = AutoPipelineForText2Image
        self._dtype = dtype
        self.text_pipe = None

        # 单个流水线不能并发调用
        self._lock = asyncio.Lock()
        logger.info(f"初始化 diffusers 后端 (model={self.model}, device={self.device})")

    def _generator(self, noise_seed: int):
        return self._torch.Generator(device="cpu").manual_seed(int(noise_seed))

    def _run_inpaint(self, canvas, mask, positive, negative, noise_seed) -> np.ndarray:
        height, width = canvas.shape[:2]
        result = self.inpaint_pipe(
            prompt=positive,
            negative_prompt=negative,
            image=to_pil(canvas),
            mask_image=to_pil(mask),
            height=height,
            width=width,
            num_inference_steps=self.steps,
            guidance_scale=self.guidance_scale,
            generator=self._generator(noise_seed),
        ).images[0]
        if result.size != (width, height):
            result = result.resize((width, height), Image.BILINEAR)
        return from_pil(result)

    def _run_text(self, positive, negative, noise_seed, size) -> np.ndarray:
        if self.text_pipe is None:
            self.text_pipe = self._text_pipe_cls.from_pretrained(
                self.text_model, torch_dtype=self._dtype
            ).to(self.device)
        width, height = size
        result = self.text_pipe(
            prompt=positive,
            negative_prompt=negative,
            height=height,
            width=width,
            num_inference_steps=self.steps,
            guidance_scale=self.guidance_scale,
            generator=self._generator(noise_seed),
        ).images[0]
        if result.size != (width, height):
            result = result.resize((width, height), Image.BILINEAR)
        return from_pil(result)

    async def outpaint(self, canvas, mask, positive, negative, noise_seed, **kwargs) -> np.ndarray:
        async with self._lock:
            try:
                return await asyncio.to_thread(self._run_inpaint, canvas, mask, positive, negative, noise_seed)
            except Exception as e:
                raise BackendError(f"diffusers 外扩失败: {e}") from e

    async def text_to_image(self, positive, negative, noise_seed, size: Tuple[int, int] = (512, 512), **kwargs) -> np.ndarray:
        async with self._lock:
            try:
                return await asyncio.to_thread(self._run_text, positive, negative, noise_seed, size)
            except Exception as e:
                raise BackendError(f"diffusers 文生图失败: {e}") from e

    def get_backend_name(self) -> str:
        return f"Diffusers ({self.model})"

    async def close(self):
        self.inpaint_pipe = None
        self.text_pipe = None
        logger.debug("diffusers 流水线已释放")
