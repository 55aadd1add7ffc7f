"""
格式化工具
"""
from typing import Optional, Union


def format_score(value: Optional[Union[float, int]], precision: int = 3) -> str:
    """
    格式化质量分数/指标

    Examples:
        >>> format_score(0.82345)
        '0.823'
        >>> format_score(None)
        '-'
    """
    if value is None:
        return "-"
    return f"{value:.{precision}f}"


def format_ratio(numerator: int, denominator: int) -> str:
    """
    格式化通过率

    Examples:
        >>> format_ratio(18, 20)
        '18/20 (90.0%)'
    """
    if denominator <= 0:
        return f"{numerator}/{denominator} (-)"
    return f"{numerator}/{denominator} ({numerator / denominator * 100:.1f}%)"


def format_dict(data: dict, indent: int = 0) -> str:
    """
    格式化字典（嵌套缩进，浮点数保留 3 位）
    """
    lines = []
    prefix = "  " * indent

    for key, value in data.items():
        if isinstance(value, dict):
            lines.append(f"{prefix}{key}:")
            lines.append(format_dict(value, indent + 1))
        elif isinstance(value, float):
            lines.append(f"{prefix}{key}: {format_score(value)}")
        else:
            lines.append(f"{prefix}{key}: {value}")

    return '\n'.join(lines)
