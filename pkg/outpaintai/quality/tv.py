"""
TV（全变差）损失

先按面积平均缩放到 target × target，再取所有水平、垂直相邻像素对
绝对差的均值（0-255 尺度），多通道取平均
"""
import numpy as np

from ..exceptions import ValidationError
from ..logger import get_logger

logger = get_logger("quality.tv")


def _area_weights(src: int, dst: int) -> np.ndarray:
    """
    面积平均的权重矩阵 (dst, src)

    目标像素 i 覆盖源区间 [i·src/dst, (i+1)·src/dst)，权重为重叠长度占比
    """
    edges = np.arange(dst + 1, dtype=np.float64) * src / dst
    starts = np.arange(src, dtype=np.float64)
    lo = np.maximum(edges[:-1, None], starts[None, :])
    hi = np.minimum(edges[1:, None], starts[None, :] + 1)
    overlap = np.clip(hi - lo, 0.0, None)
    return overlap / (src / dst)


def area_downscale(image: np.ndarray, size: int) -> np.ndarray:
    """
    面积平均缩放到 size × size

    Args:
        image: (H, W) 或 (H, W, C)
        size: 目标边长

    Returns:
        float64 数组，通道维保持不变
    """
    data = np.asarray(image, dtype=np.float64)
    if data.ndim == 2:
        data = data[:, :, None]
    h, w = data.shape[:2]
    ry = _area_weights(h, size)
    rx = _area_weights(w, size)
    return np.einsum("ih,hwc,jw->ijc", ry, data, rx)


def tv_loss(image: np.ndarray, target_resolution: int = 32) -> float:
    """
    计算 TV 损失

    Args:
        image: (H, W) 或 (H, W, C) 图像，取值 [0, 255]
        target_resolution: 缩放目标边长

    Returns:
        相邻像素绝对差均值（常数图为 0）
    """
    if target_resolution < 2:
        raise ValidationError(f"target_resolution 必须 >= 2: {target_resolution}")
    data = np.asarray(image, dtype=np.float64)
    if data.size == 0 or data.ndim not in (2, 3):
        raise ValidationError(f"无法计算 TV: 图像形状 {data.shape}")
    if data.ndim == 2:
        data = data[:, :, None]

    h, w = data.shape[:2]
    if h < target_resolution or w < target_resolution:
        logger.debug(f"图像 {w}x{h} 小于 {target_resolution}，直接计算 TV")
        small = data
    else:
        small = area_downscale(data, target_resolution)

    dx = np.abs(np.diff(small, axis=1))
    dy = np.abs(np.diff(small, axis=0))
    pairs = dx.shape[0] * dx.shape[1] + dy.shape[0] * dy.shape[1]
    if pairs == 0:
        return 0.0

    per_channel = (dx.sum(axis=(0, 1)) + dy.sum(axis=(0, 1))) / pairs
    return float(per_channel.mean())
