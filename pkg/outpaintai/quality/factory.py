"""
质量评分器工厂
"""
from typing import List, Optional

from .providers.base import BaseIqaProvider
from ..exceptions import ConfigError
from ..logger import get_logger

logger = get_logger("quality.factory")

METRICS = ("brisque", "clipiqa")


class IqaProviderFactory:
    """评分器工厂"""

    # 支持的评分器
    PROVIDERS = {
        "pyiqa": "outpaintai.quality.providers.pyiqa_provider.PyiqaProvider",
        "fixture": "outpaintai.quality.providers.fixture_provider.FixtureIqaProvider",
    }

    @classmethod
    def create(cls, kind: str, metric: str, **kwargs) -> BaseIqaProvider:
        """
        创建评分器

        Args:
            kind: pyiqa / fixture
            metric: brisque / clipiqa
            **kwargs: 评分器参数

        Raises:
            ConfigError: 不支持的评分器
        """
        kind = kind.lower()
        if kind not in cls.PROVIDERS:
            raise ConfigError(
                f"不支持的评分器: {kind}。支持的评分器: {', '.join(cls.PROVIDERS)}"
            )

        module_path, class_name = cls.PROVIDERS[kind].rsplit(".", 1)
        module = __import__(module_path, fromlist=[class_name])
        provider = getattr(module, class_name)(metric, **kwargs)
        logger.info(f"✅ 创建评分器: {provider.get_provider_name()}")
        return provider

    @classmethod
    def create_from_config(cls, iqa_cfg, backend=None) -> List[BaseIqaProvider]:
        """
        按配置创建 BRISQUE 与 CLIP-IQA 评分器

        auto：mock 后端使用 fixture（分数与生成模式对应），否则尝试 pyiqa，
        未安装时返回空列表（对应判定记为 skipped）

        Args:
            iqa_cfg: IqaConfig
            backend: 生成后端（用于取得 mock 的登记表）
        """
        kinds = list(iqa_cfg.providers)
        tags = getattr(backend, "tags", None)

        if "none" in kinds:
            logger.warning("⚠️  未启用 BRISQUE / CLIP-IQA 评分器")
            return []

        if kinds == ["auto"]:
            if tags is not None:
                kinds = ["fixture"]
            else:
                try:
                    return [cls.create("pyiqa", m, device=iqa_cfg.device) for m in METRICS]
                except ImportError as e:
                    logger.warning(f"⚠️  pyiqa 不可用，BRISQUE / CLIP-IQA 将记为 skipped: {e}")
                    return []

        providers = []
        for kind in kinds:
            for metric in METRICS:
                if kind == "fixture":
                    providers.append(cls.create("fixture", metric, tags=tags))
                elif kind == "pyiqa":
                    try:
                        providers.append(cls.create("pyiqa", metric, device=iqa_cfg.device))
                    except ImportError as e:
                        raise ConfigError(str(e)) from e
                else:
                    raise ConfigError(f"不支持的评分器: {kind}")
        return providers

    @classmethod
    def list_providers(cls) -> list:
        return list(cls.PROVIDERS.keys())
