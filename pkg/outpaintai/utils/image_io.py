"""
图像读写

内存中统一使用 numpy uint8 数组：RGB 为 (H, W, 3)，掩码为 (H, W)；
落盘统一用无损 PNG，不写入任何元数据，保证重跑字节一致
"""
import hashlib
import io
from pathlib import Path
from typing import Tuple, Union

import numpy as np
from PIL import Image

from ..exceptions import PipelineIOError, ValidationError

PathLike = Union[str, Path]


def load_image(path: PathLike) -> np.ndarray:
    """
    读取 RGB 图像

    Args:
        path: 图像路径

    Returns:
        (H, W, 3) uint8 数组

    Raises:
        PipelineIOError: 文件不存在或无法解码
    """
    try:
        with Image.open(path) as img:
            return np.asarray(img.convert("RGB"), dtype=np.uint8).copy()
    except (OSError, ValueError) as e:
        raise PipelineIOError(f"无法读取图像 {path}: {e}") from e


def load_mask(path: PathLike) -> np.ndarray:
    """读取单通道掩码"""
    try:
        with Image.open(path) as img:
            return np.asarray(img.convert("L"), dtype=np.uint8).copy()
    except (OSError, ValueError) as e:
        raise PipelineIOError(f"无法读取掩码 {path}: {e}") from e


def to_pil(array: np.ndarray) -> Image.Image:
    """numpy 数组转 PIL 图像"""
    if array.dtype != np.uint8:
        array = np.clip(np.rint(array), 0, 255).astype(np.uint8)
    if array.ndim == 2:
        return Image.fromarray(array, mode="L")
    if array.ndim == 3 and array.shape[2] == 3:
        return Image.fromarray(array, mode="RGB")
    raise ValidationError(f"不支持的图像形状: {array.shape}")


def from_pil(img: Image.Image) -> np.ndarray:
    mode = "L" if img.mode in ("L", "1", "I", "F") else "RGB"
    return np.asarray(img.convert(mode), dtype=np.uint8).copy()


def save_png(array: np.ndarray, path: PathLike) -> Path:
    """
    保存为无损 PNG（自动创建父目录）

    Returns:
        写入的路径
    """
    path = Path(path)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        to_pil(array).save(path, format="PNG", optimize=False)
    except OSError as e:
        raise PipelineIOError(f"无法写入图像 {path}: {e}") from e
    return path


def encode_png(array: np.ndarray) -> bytes:
    """编码为 PNG 字节（用于远程后端请求）"""
    buf = io.BytesIO()
    to_pil(array).save(buf, format="PNG", optimize=False)
    return buf.getvalue()


def decode_image(data: bytes, size: Tuple[int, int] = None) -> np.ndarray:
    """
    解码后端返回的图像字节

    Args:
        data: 图像字节
        size: 期望尺寸 (width, height)，不一致时双线性缩放
    """
    try:
        with Image.open(io.BytesIO(data)) as img:
            img = img.convert("RGB")
            if size is not None and img.size != tuple(size):
                img = img.resize(tuple(size), Image.BILINEAR)
            return np.asarray(img, dtype=np.uint8).copy()
    except (OSError, ValueError) as e:
        raise PipelineIOError(f"无法解码图像数据: {e}") from e


def resize_bilinear(array: np.ndarray, width: int, height: int) -> np.ndarray:
    """双线性缩放"""
    if array.shape[1] == width and array.shape[0] == height:
        return array.copy()
    return from_pil(to_pil(array).resize((int(width), int(height)), Image.BILINEAR))


def image_digest(array: np.ndarray) -> str:
    """图像内容摘要（形状 + 像素）"""
    h = hashlib.sha256()
    h.update(str(array.shape).encode("ascii"))
    h.update(np.ascontiguousarray(array, dtype=np.uint8).tobytes())
    return h.hexdigest()
