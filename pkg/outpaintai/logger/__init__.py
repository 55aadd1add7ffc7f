"""
日志模块
"""
from .logger import get_logger, setup_logger
from .handlers import AttemptLogger

__all__ = ['get_logger', 'setup_logger', 'AttemptLogger']
