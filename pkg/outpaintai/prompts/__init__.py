"""
提示词模块
"""
from .prompt_manager import PromptConfig, PromptManager, SafeDict
from .builder import (
    PromptSpec,
    build_positive,
    build_negative,
    build_prompt,
    build_background_prompt,
)

__all__ = [
    'PromptConfig',
    'PromptManager',
    'SafeDict',
    'PromptSpec',
    'build_positive',
    'build_negative',
    'build_prompt',
    'build_background_prompt',
]
