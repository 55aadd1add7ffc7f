"""
生成后端基类 - 只负责与生成模型通信
"""
from abc import ABC, abstractmethod
from typing import Optional, Tuple

import numpy as np


class BaseGenerativeBackend(ABC):
    """
    生成后端基类

    职责：只负责调用生成模型，不做质量判断和重试；
    掩码约定 255 = 生成，0 = 保留，需要相反约定的服务在适配器内部转换
    """

    name = "base"

    def __init__(self, api_key: Optional[str] = None, **kwargs):
        """
        初始化生成后端

        Args:
            api_key: API 密钥（远程服务使用）
            **kwargs: 其他配置参数（model, endpoint, timeout 等）
        """
        self.api_key = api_key
        self.config = kwargs

    @abstractmethod
    async def outpaint(
        self,
        canvas: np.ndarray,
        mask: np.ndarray,
        positive: str,
        negative: str,
        noise_seed: int,
        **kwargs
    ) -> np.ndarray:
        """
        外扩生成

        Args:
            canvas: (N, N, 3) uint8 画布
            mask: (N, N) uint8 掩码（255 = 生成）
            positive: 正向提示词
            negative: 负向提示词
            noise_seed: 噪声种子
            **kwargs: 其他参数（request_key 等）

        Returns:
            与画布同尺寸的 (N, N, 3) uint8 图像
        """
        pass

    @abstractmethod
    async def text_to_image(
        self,
        positive: str,
        negative: str,
        noise_seed: int,
        size: Tuple[int, int] = (512, 512),
        **kwargs
    ) -> np.ndarray:
        """
        文生图（背景图）

        Args:
            positive: 正向提示词
            negative: 负向提示词
            noise_seed: 噪声种子
            size: (width, height)

        Returns:
            (height, width, 3) uint8 图像
        """
        pass

    @abstractmethod
    def get_backend_name(self) -> str:
        """
        获取后端名称

        Returns:
            后端名称
        """
        pass

    async def close(self):
        """关闭连接（如果需要）"""
        pass
