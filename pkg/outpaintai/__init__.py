"""
Outpaint AI - 自标注合成车辆检测数据集生成流水线
"""
__version__ = "1.0.0"

from . import config
from .logger import get_logger
from .exceptions import (
    OutpaintError,
    ConfigError,
    PipelineIOError,
    BackendError,
    ValidationError,
)
from .geometry import PixelBox, BufferSpec, NormAnnotation, ClassRegistry, DEFAULT_REGISTRY

__all__ = [
    'config',
    'get_logger',
    'OutpaintError',
    'ConfigError',
    'PipelineIOError',
    'BackendError',
    'ValidationError',
    'PixelBox',
    'BufferSpec',
    'NormAnnotation',
    'ClassRegistry',
    'DEFAULT_REGISTRY',
]
