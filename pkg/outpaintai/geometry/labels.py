"""
标签文件格式

每个目标一行：`<class_id> <cx> <cy> <w> <h>`，空格分隔，6 位小数，
坐标为相对画布尺寸归一化的中心点与宽高；空列表对应空文件（背景图约定）
"""
import math
from dataclasses import dataclass
from typing import List, Optional, Tuple

from .boxes import PixelBox
from .registry import ClassRegistry, DEFAULT_REGISTRY
from ..exceptions import LabelParseError, ValidationError

# 归一化坐标允许的浮点误差
_EPS = 1e-6


@dataclass(frozen=True)
class NormAnnotation:
    """归一化标注"""

    class_id: int
    cx: float
    cy: float
    w: float
    h: float

    def validate(self, registry: ClassRegistry = DEFAULT_REGISTRY) -> List[str]:
        """返回错误列表，为空表示合法"""
        errors = []
        if self.class_id not in registry:
            errors.append(f"class_id {self.class_id} 不在类别表中")
        values = (self.cx, self.cy, self.w, self.h)
        if not all(math.isfinite(v) for v in values):
            errors.append("坐标必须有限")
            return errors
        if not (0 < self.w <= 1 + _EPS and 0 < self.h <= 1 + _EPS):
            errors.append(f"宽高超出 (0, 1]: w={self.w}, h={self.h}")
        for lo, hi in ((self.cx - self.w / 2, self.cx + self.w / 2), (self.cy - self.h / 2, self.cy + self.h / 2)):
            if lo < -_EPS or hi > 1 + _EPS:
                errors.append(f"框超出画布: [{lo:.6f}, {hi:.6f}]")
        return errors

    def to_pixel_box(self, width: float, height: float) -> PixelBox:
        """反归一化到像素框"""
        return PixelBox(
            max(0.0, (self.cx - self.w / 2) * width),
            max(0.0, (self.cy - self.h / 2) * height),
            (self.cx + self.w / 2) * width,
            (self.cy + self.h / 2) * height,
        )

    @classmethod
    def from_pixel_box(cls, class_id: int, box: PixelBox, width: float, height: float) -> "NormAnnotation":
        """像素框归一化"""
        cx, cy = box.center
        return cls(class_id, cx / width, cy / height, box.width / width, box.height / height)


def format_annotation(annotation: NormAnnotation, confidence: Optional[float] = None) -> str:
    """格式化单行（预测文件额外追加置信度）"""
    line = (
        f"{annotation.class_id} {annotation.cx:.6f} {annotation.cy:.6f} "
        f"{annotation.w:.6f} {annotation.h:.6f}"
    )
    if confidence is not None:
        line += f" {confidence:.6f}"
    return line


def serialize_labels(annotations: List[NormAnnotation], registry: ClassRegistry = DEFAULT_REGISTRY) -> str:
    """
    序列化标注列表

    Args:
        annotations: 标注列表
        registry: 类别表

    Returns:
        标签文本（每行以换行结尾；空列表返回空字符串）
    """
    lines = []
    for annotation in annotations:
        errors = annotation.validate(registry)
        if errors:
            raise ValidationError(f"非法标注 {annotation}: {'; '.join(errors)}")
        lines.append(format_annotation(annotation) + "\n")
    return "".join(lines)


def _parse_line(line: str, line_no: int, registry: ClassRegistry, with_confidence: bool) -> Tuple[NormAnnotation, Optional[float]]:
    parts = line.split()
    expected = 6 if with_confidence else 5
    if len(parts) != expected:
        raise LabelParseError(line_no, f"需要 {expected} 个字段，实际 {len(parts)} 个: {line!r}")
    try:
        class_id = int(parts[0])
        values = [float(p) for p in parts[1:]]
    except ValueError:
        raise LabelParseError(line_no, f"字段格式错误: {line!r}")

    if class_id not in registry:
        raise LabelParseError(line_no, f"class_id {class_id} 不在类别表中")
    if any(not (0 <= v <= 1) for v in values):
        raise LabelParseError(line_no, f"取值超出 [0, 1]: {line!r}")

    annotation = NormAnnotation(class_id, *values[:4])
    errors = annotation.validate(registry)
    if errors:
        raise LabelParseError(line_no, "; ".join(errors))
    return annotation, (values[4] if with_confidence else None)


def parse_labels(text: str, registry: ClassRegistry = DEFAULT_REGISTRY) -> List[NormAnnotation]:
    """
    解析标签文本

    Args:
        text: 标签文本
        registry: 类别表

    Returns:
        标注列表

    Raises:
        LabelParseError: 格式错误（带行号）
    """
    result = []
    for line_no, line in enumerate(text.splitlines(), 1):
        if not line.strip():
            continue
        annotation, _ = _parse_line(line, line_no, registry, with_confidence=False)
        result.append(annotation)
    return result


def parse_predictions(text: str, registry: ClassRegistry = DEFAULT_REGISTRY) -> List[Tuple[NormAnnotation, float]]:
    """解析预测文件（标签格式 + 末尾置信度）"""
    result = []
    for line_no, line in enumerate(text.splitlines(), 1):
        if not line.strip():
            continue
        result.append(_parse_line(line, line_no, registry, with_confidence=True))
    return result
