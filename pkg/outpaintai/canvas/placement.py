"""
种子在画布上的放置

缩放、位置、通道排列都在合法集合上均匀采样；同一随机流总是得到同一个放置
"""
import math
from dataclasses import dataclass
from itertools import permutations
from typing import Optional, Tuple

import numpy as np

from ..exceptions import PlacementError, ValidationError
from ..geometry import BufferSpec, PixelBox, remove_buffer

# 6 种通道排列，顺序固定（下标由随机流选择）
CHANNEL_PERMUTATIONS = list(permutations(range(3)))
IDENTITY_PERM = (0, 1, 2)
_EPS = 1e-9


def round_half_up(value: float) -> int:
    return int(math.floor(value + 0.5))


@dataclass(frozen=True)
class PlacementSpec:
    """
    放置参数

    crop_size / buffer 从种子复制而来，使掩码和标注只依赖放置本身
    """

    canvas_size: int
    scale: float
    top_left: Tuple[int, int]
    channel_perm: Tuple[int, int, int]
    crop_size: Tuple[float, float]
    buffer: BufferSpec

    @property
    def footprint(self) -> Tuple[int, int]:
        """缩放后裁剪图在画布上的整数尺寸 (W', H')"""
        cw, ch = self.crop_size
        w = min(self.canvas_size, max(1, round_half_up(cw * self.scale)))
        h = min(self.canvas_size, max(1, round_half_up(ch * self.scale)))
        return w, h

    @property
    def effective_scale(self) -> Tuple[float, float]:
        """按整数尺寸折算的实际缩放（x, y）"""
        w, h = self.footprint
        return w / self.crop_size[0], h / self.crop_size[1]

    def buffered_rect(self) -> PixelBox:
        """画布上的缓冲矩形"""
        x0, y0 = self.top_left
        w, h = self.footprint
        return PixelBox(x0, y0, x0 + w, y0 + h)

    def inner_rect(self) -> PixelBox:
        """画布上的目标框（去缓冲）"""
        inner = remove_buffer(self.crop_size[0], self.crop_size[1], self.buffer)
        sx, sy = self.effective_scale
        x0, y0 = self.top_left
        return PixelBox(
            x0 + inner.x_min * sx,
            y0 + inner.y_min * sy,
            x0 + inner.x_max * sx,
            y0 + inner.y_max * sy,
        )

    def validate(self) -> None:
        if sorted(self.channel_perm) != [0, 1, 2]:
            raise ValidationError(f"非法通道排列: {self.channel_perm}")
        if not self.scale > 0:
            raise ValidationError(f"缩放必须为正: {self.scale}")
        x0, y0 = self.top_left
        w, h = self.footprint
        if x0 < 0 or y0 < 0 or x0 + w > self.canvas_size or y0 + h > self.canvas_size:
            raise ValidationError(
                f"放置超出画布: top_left={self.top_left}, footprint={w}x{h}, canvas={self.canvas_size}"
            )

    def to_dict(self) -> dict:
        return {
            "canvas_size": self.canvas_size,
            "scale": self.scale,
            "top_left": list(self.top_left),
            "channel_perm": list(self.channel_perm),
            "crop_size": list(self.crop_size),
            "buffer": self.buffer.to_dict(),
        }

    @classmethod
    def from_dict(cls, data: dict) -> "PlacementSpec":
        return cls(
            canvas_size=int(data["canvas_size"]),
            scale=float(data["scale"]),
            top_left=tuple(int(v) for v in data["top_left"]),
            channel_perm=tuple(int(v) for v in data["channel_perm"]),
            crop_size=tuple(float(v) for v in data["crop_size"]),
            buffer=BufferSpec.from_dict(data["buffer"]),
        )


def scale_bounds(seed, canvas_size: int, min_dim: int = 32) -> Tuple[float, float]:
    """
    合法缩放区间 [s_min, s_max]

    s_max 保证缓冲裁剪完整落在画布内；s_min 保证按整数尺寸取整之后，
    目标框两边仍不小于 min_dim
    """
    inner = seed.inner_box()
    s_max = min(canvas_size / seed.crop_width, canvas_size / seed.crop_height)
    s_min = min_dim / min(inner.width, inner.height)
    for crop, side in ((seed.crop_width, inner.width), (seed.crop_height, inner.height)):
        # 取整后至少需要的整数尺寸，以及 round_half_up 能取到它的最小缩放
        required = math.ceil(min_dim * crop / side - _EPS)
        s_min = max(s_min, (required - 0.5 + _EPS) / crop)
    return s_min, s_max


def sample_placement(
    seed,
    canvas_size: int,
    rng: np.random.Generator,
    min_dim: int = 32,
    scale: Optional[float] = None,
) -> PlacementSpec:
    """
    采样放置参数

    Args:
        seed: SeedRecord
        canvas_size: 画布边长
        rng: 命名随机流
        min_dim: 缩放后目标最小边长
        scale: 指定缩放（为空时在合法区间内均匀采样）

    Returns:
        PlacementSpec

    Raises:
        PlacementError: 最小合法缩放大于最大合法缩放
    """
    s_min, s_max = scale_bounds(seed, canvas_size, min_dim)
    if s_min > s_max:
        raise PlacementError(
            f"{seed.seed_id}: 无法放置 (s_min={s_min:.4f} > s_max={s_max:.4f})"
        )

    # 抽样顺序固定：缩放、x、y、通道排列
    drawn = float(rng.uniform(s_min, s_max)) if s_max > s_min else s_max
    if scale is None:
        scale = drawn
    elif not (s_min <= scale <= s_max):
        raise PlacementError(f"{seed.seed_id}: 指定缩放 {scale} 不在 [{s_min:.4f}, {s_max:.4f}]")

    spec = PlacementSpec(
        canvas_size=canvas_size,
        scale=scale,
        top_left=(0, 0),
        channel_perm=IDENTITY_PERM,
        crop_size=(seed.crop_width, seed.crop_height),
        buffer=seed.buffer,
    )
    w, h = spec.footprint
    x0 = int(rng.integers(0, canvas_size - w + 1))
    y0 = int(rng.integers(0, canvas_size - h + 1))
    perm = CHANNEL_PERMUTATIONS[int(rng.integers(len(CHANNEL_PERMUTATIONS)))]

    return PlacementSpec(
        canvas_size=canvas_size,
        scale=scale,
        top_left=(x0, y0),
        channel_perm=tuple(perm),
        crop_size=spec.crop_size,
        buffer=spec.buffer,
    )
