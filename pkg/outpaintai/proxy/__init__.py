"""
代理模块
"""
from .proxy_factory import ProxyFactory

__all__ = ['ProxyFactory']
