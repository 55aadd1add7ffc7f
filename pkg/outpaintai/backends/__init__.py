"""
生成后端模块
"""
from .base import BaseGenerativeBackend
from .factory import BackendFactory
from .mock_backend import MockBackend

__all__ = ['BaseGenerativeBackend', 'BackendFactory', 'MockBackend']
