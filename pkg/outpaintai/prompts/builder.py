"""
提示词构造

正向提示词："A {location} during {time} with no vehicle."
负向提示词：固定顺序的车辆相关词，可选追加广告类词
"""
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .prompt_manager import PromptConfig, SafeDict
from ..exceptions import ConfigError
from ..geometry import DEFAULT_REGISTRY


@dataclass(frozen=True)
class PromptSpec:
    """一次生成使用的提示词"""

    positive: str
    negative: str
    location: Optional[str] = None
    time: Optional[str] = None
    class_id: Optional[int] = None

    def with_negative(self, negative: str) -> "PromptSpec":
        return PromptSpec(self.positive, negative, self.location, self.time, self.class_id)

    def to_dict(self) -> dict:
        return {
            "positive": self.positive,
            "negative": self.negative,
            "location": self.location,
            "time": self.time,
            "class_id": self.class_id,
        }


def build_positive(
    class_id: int,
    rng: np.random.Generator,
    cfg: PromptConfig,
    location: Optional[str] = None,
    time: Optional[str] = None,
) -> PromptSpec:
    """
    构造正向提示词

    Args:
        class_id: 类别
        rng: 命名随机流（先抽地点再抽时间）
        cfg: 提示词配置
        location: 指定地点（必须在该类别的子集内）
        time: 指定时间

    Returns:
        只有正向部分的 PromptSpec

    Raises:
        ConfigError: 类别地点子集为空或指定值非法
    """
    if class_id not in DEFAULT_REGISTRY:
        raise ConfigError(f"class_id {class_id} 不在类别表中")

    subset = cfg.locations_for(class_id)
    if not subset:
        raise ConfigError(f"{DEFAULT_REGISTRY.name_of(class_id)} 的地点子集为空")
    if not cfg.times:
        raise ConfigError("时间词表为空")

    drawn_location = subset[int(rng.integers(len(subset)))]
    drawn_time = cfg.times[int(rng.integers(len(cfg.times)))]

    if location is None:
        location = drawn_location
    elif location not in subset:
        raise ConfigError(f"地点 {location} 不属于 {DEFAULT_REGISTRY.name_of(class_id)} 的子集 {subset}")
    if time is None:
        time = drawn_time
    elif time not in cfg.times:
        raise ConfigError(f"时间 {time} 不在词表中")

    positive = cfg.template.format_map(SafeDict(location=location, time=time))
    return PromptSpec(positive, "", location, time, class_id)


def build_negative(include_extras: bool, cfg: PromptConfig) -> str:
    """
    构造负向提示词（顺序固定）

    Examples:
        extras 关闭: "traffic, train, car, truck, bus, van"
    """
    tokens = list(cfg.negative_base)
    if include_extras:
        tokens += [t for t in cfg.negative_extras if t not in tokens]
    return ", ".join(tokens)


def build_prompt(
    class_id: int,
    rng: np.random.Generator,
    cfg: PromptConfig,
    include_extras: bool = False,
) -> PromptSpec:
    """正向 + 负向"""
    return build_positive(class_id, rng, cfg).with_negative(build_negative(include_extras, cfg))


def build_background_prompt(
    rng: np.random.Generator,
    cfg: PromptConfig,
    include_extras: bool = False,
) -> PromptSpec:
    """
    构造背景图提示词

    Raises:
        ConfigError: 场景描述列表为空
    """
    if not cfg.background_descriptions:
        raise ConfigError("背景描述列表为空")

    description = cfg.background_descriptions[int(rng.integers(len(cfg.background_descriptions)))]
    positive = cfg.background_template.format_map(SafeDict(description=description))
    return PromptSpec(positive, build_negative(include_extras, cfg))
