"""
画布合成、外扩掩码与自动标注

掩码约定：255 = 需要生成的区域，0 = 保留
"""
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy.ndimage import gaussian_filter

from .placement import PlacementSpec
from ..exceptions import ValidationError
from ..geometry import NormAnnotation
from ..utils import resize_bilinear

# 缓冲厚度全为 0 时使用的 sigma（像素）
FALLBACK_SIGMA = 2.0


@dataclass
class CanvasBundle:
    """合成结果"""

    canvas: np.ndarray
    mask: np.ndarray
    annotation: NormAnnotation
    placement: PlacementSpec
    seed_id: str
    image_index: int = 0

    @property
    def item_key(self) -> str:
        return f"{self.seed_id}_{self.image_index:02d}"

    def to_row(self, canvas_rel: str, mask_rel: str) -> dict:
        a = self.annotation
        return {
            "seed_id": self.seed_id,
            "image_index": self.image_index,
            "item_key": self.item_key,
            "class_id": a.class_id,
            "annotation": [a.cx, a.cy, a.w, a.h],
            "placement": self.placement.to_dict(),
            "canvas": canvas_rel,
            "mask": mask_rel,
        }


def permute_channels(image: np.ndarray, perm: Sequence[int]) -> np.ndarray:
    """
    通道排列：输出第 c 个通道 = 输入第 perm[c] 个通道

    Raises:
        ValidationError: 非三通道图像或非法排列
    """
    if image.ndim != 3 or image.shape[2] != 3:
        raise ValidationError(f"通道排列需要三通道图像: {image.shape}")
    if sorted(perm) != [0, 1, 2]:
        raise ValidationError(f"非法通道排列: {tuple(perm)}")
    return np.ascontiguousarray(image[..., list(perm)])


def mask_sigma(placement: PlacementSpec, blur_sigma_fraction: float) -> float:
    """高斯 sigma = 比例 × 缩放后最薄的非零缓冲厚度"""
    if blur_sigma_fraction <= 0:
        return 0.0
    outer, inner = placement.buffered_rect(), placement.inner_rect()
    thickness = [
        inner.x_min - outer.x_min,
        inner.y_min - outer.y_min,
        outer.x_max - inner.x_max,
        outer.y_max - inner.y_max,
    ]
    positive = [t for t in thickness if t > 1e-9]
    if not positive:
        return FALLBACK_SIGMA
    return blur_sigma_fraction * min(positive)


def render_mask(placement: PlacementSpec, blur_sigma_fraction: float = 0.5) -> np.ndarray:
    """
    绘制外扩掩码

    缓冲矩形内为 0、外为 255，高斯模糊后：目标框覆盖的像素强制为 0，
    缓冲矩形外扩 3σ 以外的像素强制为 255

    Args:
        placement: 放置参数
        blur_sigma_fraction: sigma 相对缓冲厚度的比例（0 表示不模糊）

    Returns:
        (N, N) uint8 掩码
    """
    n = placement.canvas_size
    outer = placement.buffered_rect()
    ox0, oy0, ox1, oy1 = (int(v) for v in outer.as_tuple())

    binary = np.full((n, n), 255.0)
    binary[oy0:oy1, ox0:ox1] = 0.0

    sigma = mask_sigma(placement, blur_sigma_fraction)
    if sigma > 0:
        # 画布外视为生成区
        blurred = gaussian_filter(binary, sigma=sigma, mode="constant", cval=255.0)
    else:
        blurred = binary

    mask = np.clip(np.rint(blurred), 0, 255).astype(np.uint8)

    if sigma > 0:
        reach = 3 * sigma
        dx0 = max(0, math.floor(ox0 - reach))
        dy0 = max(0, math.floor(oy0 - reach))
        dx1 = min(n, math.ceil(ox1 + reach))
        dy1 = min(n, math.ceil(oy1 + reach))
        keep = np.zeros((n, n), dtype=bool)
        keep[dy0:dy1, dx0:dx1] = True
        mask[~keep] = 255

    inner = placement.inner_rect()
    ix0, iy0 = math.floor(inner.x_min), math.floor(inner.y_min)
    ix1, iy1 = math.ceil(inner.x_max), math.ceil(inner.y_max)
    mask[iy0:iy1, ix0:ix1] = 0
    return mask


def derive_annotation(seed, placement: PlacementSpec) -> NormAnnotation:
    """
    由放置参数推出归一化标注

    目标框 = 去缓冲内框 × 缩放 + 左上角偏移，再除以画布边长
    """
    inner = placement.inner_rect()
    n = float(placement.canvas_size)
    return NormAnnotation.from_pixel_box(seed.class_id, inner, n, n)


def compose_canvas(
    seed,
    placement: PlacementSpec,
    fill_value: int = 128,
    blur_sigma_fraction: float = 0.5,
    image_index: int = 0,
) -> CanvasBundle:
    """
    合成画布

    Args:
        seed: SeedRecord
        placement: 放置参数
        fill_value: 空白区域填充值（中灰）
        blur_sigma_fraction: 掩码模糊比例
        image_index: 同一种子的第几张图

    Returns:
        CanvasBundle

    Raises:
        ValidationError: 放置与种子不一致或超出画布
    """
    placement.validate()
    if not (
        math.isclose(placement.crop_size[0], seed.crop_width, rel_tol=1e-9, abs_tol=1e-9)
        and math.isclose(placement.crop_size[1], seed.crop_height, rel_tol=1e-9, abs_tol=1e-9)
        and placement.buffer == seed.buffer
    ):
        raise ValidationError(f"{seed.seed_id}: 放置参数与种子不一致")

    n = placement.canvas_size
    w, h = placement.footprint
    x0, y0 = placement.top_left

    pasted = resize_bilinear(seed.crop_image, w, h)
    pasted = permute_channels(pasted, placement.channel_perm)

    canvas = np.full((n, n, 3), fill_value, dtype=np.uint8)
    canvas[y0:y0 + h, x0:x0 + w] = pasted

    return CanvasBundle(
        canvas=canvas,
        mask=render_mask(placement, blur_sigma_fraction),
        annotation=derive_annotation(seed, placement),
        placement=placement,
        seed_id=seed.seed_id,
        image_index=image_index,
    )
