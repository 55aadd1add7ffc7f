"""
提示词管理器

负责加载 prompts/prompts.json 并转换为 PromptConfig；
文件缺失时退回内置默认词表
"""
import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, List, Optional

from ..exceptions import ConfigError
from ..geometry import ClassRegistry, DEFAULT_REGISTRY
from ..logger import get_logger

logger = get_logger("prompts")

DEFAULT_TEMPLATE = "A {location} during {time} with no vehicle."
DEFAULT_LOCATIONS = ["highway", "road", "street", "downtown", "plaza"]
DEFAULT_TIMES = [
    "spring", "summer", "fall", "winter",
    "a sunny day", "a cloudy day", "a rainy day",
    "evening", "sunset", "sunrise",
]
DEFAULT_NEGATIVE_BASE = ["traffic", "train", "car", "truck", "bus", "van"]
DEFAULT_NEGATIVE_EXTRAS = ["billboard", "text", "advertisement"]


@dataclass
class PromptConfig:
    """提示词词表"""

    template: str = DEFAULT_TEMPLATE
    locations: List[str] = field(default_factory=lambda: list(DEFAULT_LOCATIONS))
    # class_id -> 地点子集；未列出的类别使用全部地点
    class_locations: Dict[int, List[str]] = field(default_factory=dict)
    times: List[str] = field(default_factory=lambda: list(DEFAULT_TIMES))
    negative_base: List[str] = field(default_factory=lambda: list(DEFAULT_NEGATIVE_BASE))
    negative_extras: List[str] = field(default_factory=lambda: list(DEFAULT_NEGATIVE_EXTRAS))
    background_template: str = "{description}"
    background_descriptions: List[str] = field(default_factory=list)

    def locations_for(self, class_id: int) -> List[str]:
        return self.class_locations.get(class_id, self.locations)

    def validate(self, registry: ClassRegistry = DEFAULT_REGISTRY) -> List[str]:
        errors = []
        if not self.locations:
            errors.append("locations 不能为空")
        if not self.times:
            errors.append("times 不能为空")
        if not self.negative_base:
            errors.append("negative.base 不能为空")
        for key in ("{location}", "{time}"):
            if key not in self.template:
                errors.append(f"template 缺少占位符 {key}")
        for class_id in range(len(registry)):
            subset = self.locations_for(class_id)
            if not subset:
                errors.append(f"{registry.name_of(class_id)} 的地点子集为空")
            unknown = [loc for loc in subset if loc not in self.locations]
            if unknown:
                errors.append(f"{registry.name_of(class_id)} 的地点不在词表中: {unknown}")
        return errors


class PromptManager:
    """提示词管理器"""

    # 提示词根目录
    PROMPTS_DIR = Path(__file__).parent.parent.parent / "prompts"

    def __init__(self, prompt_file: Optional[str] = None, registry: ClassRegistry = DEFAULT_REGISTRY):
        """
        初始化提示词管理器

        Args:
            prompt_file: 自定义 JSON 文件（可选，默认 prompts/prompts.json）
            registry: 类别表（class_locations 以类别名为键）
        """
        self.prompt_file = Path(prompt_file) if prompt_file else self.PROMPTS_DIR / "prompts.json"
        self.registry = registry
        self._config: Optional[PromptConfig] = None

    def _load_json(self) -> Dict[str, Any]:
        if not self.prompt_file.exists():
            logger.warning(f"提示词文件不存在: {self.prompt_file}，使用内置默认词表")
            return {}
        try:
            data = json.loads(self.prompt_file.read_text(encoding="utf-8"))
        except json.JSONDecodeError as e:
            raise ConfigError(f"提示词文件不是合法 JSON: {self.prompt_file}: {e}") from e
        logger.info(f"✅ 加载提示词: {self.prompt_file.name} ({len(data)} 个类型)")
        return data

    def get_config(self) -> PromptConfig:
        """
        获取提示词配置（首次调用时加载并校验）

        Raises:
            ConfigError: 文件格式错误或词表非法
        """
        if self._config is not None:
            return self._config

        data = self._load_json()
        outpaint = data.get("outpaint", {})
        negative = data.get("negative", {})
        background = data.get("background", {})

        class_locations = {}
        for name, subset in outpaint.get("class_locations", {}).items():
            try:
                class_locations[self.registry.id_of(name)] = list(subset)
            except KeyError:
                raise ConfigError(f"class_locations 中的未知类别: {name}")

        defaults = PromptConfig()
        cfg = PromptConfig(
            template=outpaint.get("template", defaults.template),
            locations=list(outpaint.get("locations", defaults.locations)),
            class_locations=class_locations,
            times=list(outpaint.get("times", defaults.times)),
            negative_base=list(negative.get("base", defaults.negative_base)),
            negative_extras=list(negative.get("extras", defaults.negative_extras)),
            background_template=background.get("template", defaults.background_template),
            background_descriptions=list(background.get("descriptions", [])),
        )

        errors = cfg.validate(self.registry)
        if errors:
            raise ConfigError("提示词配置错误: " + "; ".join(errors))

        self._config = cfg
        return cfg

    def reload(self) -> PromptConfig:
        """重新加载提示词文件"""
        self._config = None
        return self.get_config()


class SafeDict(dict):
    """
    安全字典，对于缺失的键返回占位符而不是抛出异常
    """
    def __missing__(self, key):
        return f"{{{key}}}"
