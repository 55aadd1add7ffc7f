"""
生成后端工厂 - 按名称创建后端实例
"""
from .base import BaseGenerativeBackend
from .. import config
from ..exceptions import ConfigError
from ..logger import get_logger

logger = get_logger("backends.factory")


class BackendFactory:
    """生成后端工厂"""

    # 支持的后端
    BACKENDS = {
        "mock": "outpaintai.backends.mock_backend.MockBackend",
        "diffusers": "outpaintai.backends.diffusers_backend.DiffusersBackend",
        "remote": "outpaintai.backends.remote_backend.RemoteBackend",
        "openai": "outpaintai.backends.openai_backend.OpenAIBackend",
    }

    @classmethod
    def create(cls, name: str, api_key: str = None, **kwargs) -> BaseGenerativeBackend:
        """
        创建生成后端

        Args:
            name: 后端名称 (mock, diffusers, remote, openai)
            api_key: API 密钥
            **kwargs: 后端参数

        Returns:
            生成后端实例

        Raises:
            ConfigError: 不支持的后端，或缺少后端依赖
        """
        name = name.lower()
        if name not in cls.BACKENDS:
            raise ConfigError(
                f"不支持的生成后端: {name}。支持的后端: {', '.join(cls.BACKENDS)}"
            )

        module_path, class_name = cls.BACKENDS[name].rsplit(".", 1)
        module = __import__(module_path, fromlist=[class_name])
        try:
            backend = getattr(module, class_name)(api_key=api_key, **kwargs)
        except ImportError as e:
            raise ConfigError(str(e)) from e
        logger.info(f"✅ 创建生成后端: {backend.get_backend_name()}")
        return backend

    @classmethod
    def create_from_config(cls, backend_cfg) -> BaseGenerativeBackend:
        """
        从 BackendConfig 创建后端

        Args:
            backend_cfg: PipelineConfig.backend
        """
        name = backend_cfg.name.lower()
        kwargs = {}
        if name == "mock":
            kwargs = {"mode": backend_cfg.mock_mode, "noisy_k": backend_cfg.mock_noisy_k}
        else:
            if backend_cfg.model:
                kwargs["model"] = backend_cfg.model
            if backend_cfg.endpoint:
                kwargs["endpoint"] = backend_cfg.endpoint
            kwargs["timeout"] = backend_cfg.timeout
            if name == "remote":
                kwargs["retries"] = backend_cfg.retries

        return cls.create(name, api_key=config.OUTPAINT_API_KEY or None, **kwargs)

    @classmethod
    def list_backends(cls) -> list:
        return list(cls.BACKENDS.keys())
