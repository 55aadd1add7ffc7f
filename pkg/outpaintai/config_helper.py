"""
环境变量解析工具

.env 中允许行内注释（KEY=value  # 说明）和留空；格式错误的值会打印警告并回退到默认值，
真正的取值校验由 PipelineConfig.validate() 负责
"""
import os
import warnings
from typing import Any, Callable, Optional, Sequence, TypeVar

T = TypeVar("T")

_TRUE = ("true", "1", "yes", "on")
_FALSE = ("false", "0", "no", "off")


def get_config(key: str, default: Any = None, required: bool = False) -> Optional[Any]:
    """
    读取字符串配置项（去掉行内注释与首尾空白）

    Args:
        key: 环境变量名
        default: 未设置或为空时的默认值
        required: 为 True 且未设置时抛出 ConfigError

    Returns:
        配置值或默认值
    """
    raw = os.getenv(key)
    value = raw.split("#", 1)[0].strip() if raw is not None else ""
    if value:
        return value
    if required:
        from .exceptions import ConfigError
        raise ConfigError(f"配置项 {key} 是必需的，但未设置")
    return default


def _parse(key: str, default: T, parser: Callable[[str], T], kind: str) -> T:
    value = get_config(key)
    if value is None:
        return default
    try:
        return parser(value)
    except ValueError:
        warnings.warn(f"{key}={value!r} 不是有效的{kind}，使用默认值 {default!r}", stacklevel=3)
        return default


def _parse_bool(value: str) -> bool:
    lowered = value.lower()
    if lowered in _TRUE:
        return True
    if lowered in _FALSE:
        return False
    raise ValueError(value)


def get_bool_config(key: str, default: bool = False) -> bool:
    """布尔配置：true/1/yes/on 与 false/0/no/off"""
    return _parse(key, default, _parse_bool, "布尔值")


def get_int_config(key: str, default: int = 0) -> int:
    return _parse(key, default, int, "整数")


def get_float_config(key: str, default: float = 0.0) -> float:
    return _parse(key, default, float, "数字")


def get_choice_config(key: str, default: str, choices: Sequence[str]) -> str:
    """
    枚举配置（大小写不敏感）

    Args:
        key: 环境变量名
        default: 默认值（必须在 choices 中）
        choices: 允许的取值

    Returns:
        规范化后的取值
    """
    def parse(value: str) -> str:
        for choice in choices:
            if value.lower() == choice.lower():
                return choice
        raise ValueError(value)

    return _parse(key, default, parse, f"取值（可选: {', '.join(choices)}）")


def get_list_config(key: str, default: Optional[list] = None, separator: str = ",") -> list:
    """逗号分隔的列表配置，空列表回退到默认值"""
    value = get_config(key)
    items = [item.strip() for item in value.split(separator)] if value else []
    items = [item for item in items if item]
    return items or list(default or [])
