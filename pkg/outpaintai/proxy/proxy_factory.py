"""
代理工厂 - 远程生成后端的出站代理
"""
from typing import Optional
from urllib.parse import urlparse

from .. import config
from ..logger import get_logger

logger = get_logger("proxy")

# 本机服务不走代理
LOCAL_HOSTS = ("localhost", "127.0.0.1", "::1", "0.0.0.0")


class ProxyFactory:
    """代理工厂"""

    @staticmethod
    def proxy_url() -> Optional[str]:
        """USE_PROXY 开启时返回 http://PROXY_HOST:PROXY_PORT"""
        if not config.USE_PROXY:
            return None
        return f"http://{config.PROXY_HOST}:{config.PROXY_PORT}"

    @classmethod
    def for_endpoint(cls, endpoint: str) -> Optional[str]:
        """
        按推理服务地址决定是否使用代理

        Args:
            endpoint: 服务地址，如 "http://gpu-box:7860"

        Returns:
            代理URL；本机地址或未启用代理时返回 None
        """
        proxy = cls.proxy_url()
        host = urlparse(endpoint).hostname or ""
        if proxy is None or host in LOCAL_HOSTS:
            logger.debug(f"{host or endpoint} 直连")
            return None
        logger.info(f"🔀 {host} 经代理 {config.PROXY_HOST}:{config.PROXY_PORT} 访问")
        return proxy
