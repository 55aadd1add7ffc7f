"""
框几何运算

PixelBox 是所有模块共享的几何单位：绝对像素坐标，原点在左上角，坐标连续，
只有在图像读写时才取整
"""
import math
from dataclasses import dataclass
from typing import Tuple

from ..exceptions import GeometryError


@dataclass(frozen=True)
class PixelBox:
    """轴对齐像素框 (x_min, y_min, x_max, y_max)"""

    x_min: float
    y_min: float
    x_max: float
    y_max: float

    def __post_init__(self):
        values = (self.x_min, self.y_min, self.x_max, self.y_max)
        if not all(math.isfinite(v) for v in values):
            raise GeometryError(f"框坐标必须有限: {values}")
        if min(values) < 0:
            raise GeometryError(f"框坐标不能为负: {values}")
        if not (self.x_min < self.x_max and self.y_min < self.y_max):
            raise GeometryError(f"零面积或反向框: {values}")

    @property
    def width(self) -> float:
        return self.x_max - self.x_min

    @property
    def height(self) -> float:
        return self.y_max - self.y_min

    @property
    def area(self) -> float:
        return self.width * self.height

    @property
    def center(self) -> Tuple[float, float]:
        return (self.x_min + self.x_max) / 2, (self.y_min + self.y_max) / 2

    def as_tuple(self) -> Tuple[float, float, float, float]:
        return (self.x_min, self.y_min, self.x_max, self.y_max)

    def contains(self, other: "PixelBox", tol: float = 0.0) -> bool:
        """other 是否完全位于本框内"""
        return (
            other.x_min >= self.x_min - tol
            and other.y_min >= self.y_min - tol
            and other.x_max <= self.x_max + tol
            and other.y_max <= self.y_max + tol
        )

    @classmethod
    def from_sequence(cls, values) -> "PixelBox":
        x_min, y_min, x_max, y_max = (float(v) for v in values)
        return cls(x_min, y_min, x_max, y_max)


@dataclass(frozen=True)
class BufferSpec:
    """
    缓冲记录

    per_side_fractions 为裁剪后每侧实际保留的缓冲比例 (left, top, right, bottom)，
    相对于检测框的宽/高；贴边裁剪时对应侧为 0
    """

    buffer_factor: float = 1.15
    per_side_fractions: Tuple[float, float, float, float] = (0.075, 0.075, 0.075, 0.075)

    def __post_init__(self):
        if not self.buffer_factor > 1:
            raise GeometryError(f"buffer_factor 必须大于 1: {self.buffer_factor}")
        if any(f < 0 for f in self.per_side_fractions):
            raise GeometryError(f"缓冲比例不能为负: {self.per_side_fractions}")

    @classmethod
    def symmetric(cls, buffer_factor: float = 1.15) -> "BufferSpec":
        side = (buffer_factor - 1) / 2
        return cls(buffer_factor, (side, side, side, side))

    @property
    def left(self) -> float:
        return self.per_side_fractions[0]

    @property
    def top(self) -> float:
        return self.per_side_fractions[1]

    @property
    def right(self) -> float:
        return self.per_side_fractions[2]

    @property
    def bottom(self) -> float:
        return self.per_side_fractions[3]

    def to_dict(self) -> dict:
        return {"buffer_factor": self.buffer_factor, "per_side_fractions": list(self.per_side_fractions)}

    @classmethod
    def from_dict(cls, data: dict) -> "BufferSpec":
        return cls(float(data["buffer_factor"]), tuple(float(f) for f in data["per_side_fractions"]))


def iou(a: PixelBox, b: PixelBox) -> float:
    """
    计算两个框的交并比 (IoU)

    Args:
        a: 框 A
        b: 框 B

    Returns:
        [0, 1] 之间的 IoU，不相交时为 0
    """
    if a.area <= 0 or b.area <= 0:
        raise GeometryError("零面积框无法计算 IoU")

    inter_w = min(a.x_max, b.x_max) - max(a.x_min, b.x_min)
    inter_h = min(a.y_max, b.y_max) - max(a.y_min, b.y_min)
    if inter_w <= 0 or inter_h <= 0:
        return 0.0

    inter = inter_w * inter_h
    union = a.area + b.area - inter
    return min(1.0, max(0.0, inter / union))


def buffered_crop(
    detected: PixelBox,
    image_width: float,
    image_height: float,
    buffer_factor: float = 1.15,
) -> Tuple[PixelBox, BufferSpec]:
    """
    按缓冲系数扩展检测框并裁剪到图像边界

    每侧扩展检测框宽/高的 (buffer_factor - 1) / 2，越界部分被截断，
    BufferSpec 记录每侧实际保留的比例，保证内框可以精确恢复

    Args:
        detected: 检测框（必须位于图像内）
        image_width: 图像宽度
        image_height: 图像高度
        buffer_factor: 总缓冲系数（默认 1.15，即每侧 7.5%）

    Returns:
        (裁剪框, BufferSpec)
    """
    if buffer_factor <= 1:
        raise GeometryError(f"buffer_factor 必须大于 1: {buffer_factor}")
    if detected.x_max > image_width or detected.y_max > image_height:
        raise GeometryError(
            f"检测框 {detected.as_tuple()} 超出图像范围 {image_width}x{image_height}"
        )

    w, h = detected.width, detected.height
    side = (buffer_factor - 1) / 2
    pad_x, pad_y = side * w, side * h

    crop = PixelBox(
        max(0.0, detected.x_min - pad_x),
        max(0.0, detected.y_min - pad_y),
        min(float(image_width), detected.x_max + pad_x),
        min(float(image_height), detected.y_max + pad_y),
    )
    fractions = (
        (detected.x_min - crop.x_min) / w,
        (detected.y_min - crop.y_min) / h,
        (crop.x_max - detected.x_max) / w,
        (crop.y_max - detected.y_max) / h,
    )
    return crop, BufferSpec(buffer_factor, fractions)


def remove_buffer(buffered_width: float, buffered_height: float, spec: BufferSpec) -> PixelBox:
    """
    从缓冲裁剪尺寸还原内框（相对于裁剪框的坐标）

    无截断的对称情况下，内框尺寸 = 缓冲尺寸 / buffer_factor，居中

    Args:
        buffered_width: 缓冲裁剪宽度
        buffered_height: 缓冲裁剪高度
        spec: 缓冲记录

    Returns:
        内框 PixelBox
    """
    denom_x = 1 + spec.left + spec.right
    denom_y = 1 + spec.top + spec.bottom
    inner_w = buffered_width / denom_x
    inner_h = buffered_height / denom_y
    if inner_w <= 0 or inner_h <= 0:
        raise GeometryError(f"缓冲记录与裁剪尺寸矛盾: {buffered_width}x{buffered_height}, {spec}")

    x0 = spec.left * inner_w
    y0 = spec.top * inner_h
    return PixelBox(x0, y0, x0 + inner_w, y0 + inner_h)
