"""
检测器工厂
"""
from typing import List

from .base import BaseDetector
from ...exceptions import ConfigError
from ...logger import get_logger

logger = get_logger("seeds.factory")


class DetectorFactory:
    """检测器工厂"""

    # 支持的适配器
    DETECTORS = {
        "fixture": "outpaintai.seeds.detectors.fixture_detector.FixtureDetector",
        "torchvision": "outpaintai.seeds.detectors.torchvision_detector.TorchvisionDetector",
    }

    @classmethod
    def create(cls, kind: str, name: str, rank: int = 0, **kwargs) -> BaseDetector:
        """
        创建单个检测器

        Args:
            kind: 适配器类型（fixture / torchvision）
            name: 模型名（fcos / retinanet / ssd / maskrcnn / fasterrcnn）
            rank: 集成顺序位置
            **kwargs: 适配器参数

        Raises:
            ConfigError: 不支持的适配器，或缺少依赖
        """
        kind = kind.lower()
        if kind not in cls.DETECTORS:
            raise ConfigError(
                f"不支持的检测器类型: {kind}。支持的类型: {', '.join(cls.DETECTORS)}"
            )

        module_path, class_name = cls.DETECTORS[kind].rsplit(".", 1)
        try:
            module = __import__(module_path, fromlist=[class_name])
            detector_class = getattr(module, class_name)
            return detector_class(name=name, rank=rank, **kwargs)
        except ImportError as e:
            logger.error(f"导入检测器失败: {kind} - {e}")
            raise ConfigError(str(e)) from e

    @classmethod
    def create_ensemble(cls, detector_cfg) -> List[BaseDetector]:
        """
        按集成顺序创建全部检测器

        Args:
            detector_cfg: DetectorConfig

        Returns:
            检测器列表（顺序即预定义集成顺序）
        """
        kwargs = {}
        if detector_cfg.name == "fixture":
            kwargs["fixture_dir"] = detector_cfg.fixture_dir
        elif detector_cfg.name == "torchvision":
            kwargs["device"] = detector_cfg.device

        detectors = [
            cls.create(detector_cfg.name, model, rank=i, **kwargs)
            for i, model in enumerate(detector_cfg.ensemble)
        ]
        logger.info(f"✅ 创建检测器集成 ({detector_cfg.name}): {', '.join(d.name for d in detectors)}")
        return detectors

    @classmethod
    def list_detectors(cls) -> list:
        return list(cls.DETECTORS.keys())
