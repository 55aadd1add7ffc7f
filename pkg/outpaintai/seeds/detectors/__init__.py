"""
检测器适配器
"""
from .base import BaseDetector, Detection
from .factory import DetectorFactory
from .fixture_detector import FixtureDetector, sidecar_path

__all__ = ['BaseDetector', 'Detection', 'DetectorFactory', 'FixtureDetector', 'sidecar_path']
