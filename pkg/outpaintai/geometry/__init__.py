"""
几何与标注模块
"""
from .boxes import PixelBox, BufferSpec, iou, buffered_crop, remove_buffer
from .labels import (
    NormAnnotation,
    serialize_labels,
    parse_labels,
    parse_predictions,
    format_annotation,
)
from .registry import ClassRegistry, VehicleClass, DEFAULT_REGISTRY

__all__ = [
    "PixelBox",
    "BufferSpec",
    "iou",
    "buffered_crop",
    "remove_buffer",
    "NormAnnotation",
    "serialize_labels",
    "parse_labels",
    "parse_predictions",
    "format_annotation",
    "ClassRegistry",
    "VehicleClass",
    "DEFAULT_REGISTRY",
]
