"""
流水线配置

PipelineConfig 是一棵 dataclass 树，可从 JSON 文件加载；
所有字段的默认值来自 config.py（即 .env / 环境变量）
"""
import json
import math
from dataclasses import asdict, dataclass, field, fields, is_dataclass
from pathlib import Path
from typing import Any, Dict, List, Optional

from . import config
from .exceptions import ConfigError
from .logger import get_logger

logger = get_logger("pipeline_config")

ON_EXHAUSTION_POLICIES = ("skip", "keep-best")
MOCK_MODES = ("always-smooth", "always-noisy", "noisy-first-k")


@dataclass
class QualityThresholds:
    """质量门限（比较均为闭区间）"""

    brisque_max: float = config.BRISQUE_MAX
    clipiqa_min: float = config.CLIPIQA_MIN
    tv_max: float = config.TV_MAX
    tv_resolution: int = config.TV_RESOLUTION

    def validate(self) -> List[str]:
        errors = []
        for name in ("brisque_max", "clipiqa_min", "tv_max"):
            value = getattr(self, name)
            # 门限允许 ±inf（等价于关闭该项）
            if not isinstance(value, (int, float)) or math.isnan(value):
                errors.append(f"thresholds.{name} 必须是数值: {value}")
        if not isinstance(self.tv_resolution, int) or self.tv_resolution < 2:
            errors.append(f"thresholds.tv_resolution 必须 >= 2: {self.tv_resolution}")
        return errors


@dataclass
class SplitConfig:
    """数据划分比例，按 seed_id 划分、按 class_id 分层"""

    train: float = 0.40
    val: float = 0.10
    test: float = 0.50
    stratify_by: str = "class_id"
    unit: str = "seed_id"

    @property
    def fractions(self) -> Dict[str, float]:
        return {"train": self.train, "val": self.val, "test": self.test}

    def validate(self) -> List[str]:
        errors = []
        for name, value in self.fractions.items():
            if not value > 0:
                errors.append(f"split.{name} 必须为正: {value}")
        if abs(self.train + self.val + self.test - 1.0) > 1e-9:
            errors.append(f"split 比例之和必须为 1: {self.train + self.val + self.test}")
        if self.stratify_by != "class_id":
            errors.append(f"split.stratify_by 只支持 class_id: {self.stratify_by}")
        if self.unit != "seed_id":
            errors.append(f"split.unit 只支持 seed_id: {self.unit}")
        return errors


@dataclass
class AttemptPolicy:
    """生成重试策略"""

    max_attempts: int = config.MAX_ATTEMPTS
    on_exhaustion: str = config.ON_EXHAUSTION

    def validate(self) -> List[str]:
        errors = []
        if not isinstance(self.max_attempts, int) or self.max_attempts < 1:
            errors.append(f"attempts.max_attempts 必须 >= 1: {self.max_attempts}")
        if self.on_exhaustion not in ON_EXHAUSTION_POLICIES:
            errors.append(
                f"attempts.on_exhaustion 必须是 {'/'.join(ON_EXHAUSTION_POLICIES)}: {self.on_exhaustion}"
            )
        return errors


@dataclass
class BackendConfig:
    """生成后端选择"""

    name: str = config.OUTPAINT_BACKEND
    endpoint: str = config.OUTPAINT_BACKEND_ENDPOINT
    model: str = config.OUTPAINT_BACKEND_MODEL
    timeout: float = config.OUTPAINT_REQUEST_TIMEOUT
    retries: int = config.OUTPAINT_REQUEST_RETRIES
    mock_mode: str = config.MOCK_MODE
    mock_noisy_k: int = config.MOCK_NOISY_K

    def validate(self) -> List[str]:
        errors = []
        if not self.name:
            errors.append("backend.name 不能为空")
        if self.timeout <= 0:
            errors.append(f"backend.timeout 必须为正: {self.timeout}")
        if self.retries < 0:
            errors.append(f"backend.retries 不能为负: {self.retries}")
        if self.name == "mock" and self.mock_mode not in MOCK_MODES:
            errors.append(f"backend.mock_mode 必须是 {'/'.join(MOCK_MODES)}: {self.mock_mode}")
        if self.mock_noisy_k < 0:
            errors.append(f"backend.mock_noisy_k 不能为负: {self.mock_noisy_k}")
        if self.name == "remote" and not self.endpoint:
            errors.append("remote 后端需要 backend.endpoint")
        return errors


@dataclass
class IqaConfig:
    """无参考质量评分器"""

    providers: List[str] = field(default_factory=lambda: list(config.IQA_PROVIDERS))
    device: str = config.IQA_DEVICE
    require_all: bool = config.IQA_REQUIRE_ALL

    def validate(self) -> List[str]:
        allowed = {"auto", "pyiqa", "fixture", "none"}
        unknown = [p for p in self.providers if p not in allowed]
        return [f"iqa.providers 包含未知项: {unknown}"] if unknown else []


@dataclass
class DetectorConfig:
    """检测器集成与共识投票"""

    name: str = config.DETECTOR
    ensemble: List[str] = field(default_factory=lambda: list(config.DETECTOR_ENSEMBLE))
    vote_iou_threshold: float = config.VOTE_IOU_THRESHOLD
    vehicle_labels: List[str] = field(default_factory=lambda: list(config.VEHICLE_LABELS))
    # fixture 检测器读取的旁注目录；为空时与源图同目录
    fixture_dir: str = ""
    # 参与投票的校准图数量上限（0 表示全部源图）
    calibration_limit: int = 0
    device: str = config.IQA_DEVICE

    def validate(self) -> List[str]:
        errors = []
        if not self.ensemble:
            errors.append("detectors.ensemble 不能为空")
        if len(set(self.ensemble)) != len(self.ensemble):
            errors.append(f"detectors.ensemble 有重复项: {self.ensemble}")
        if not (0 < self.vote_iou_threshold <= 1):
            errors.append(f"detectors.vote_iou_threshold 必须在 (0, 1]: {self.vote_iou_threshold}")
        if not self.vehicle_labels:
            errors.append("detectors.vehicle_labels 不能为空")
        if self.calibration_limit < 0:
            errors.append(f"detectors.calibration_limit 不能为负: {self.calibration_limit}")
        return errors


@dataclass
class PathsConfig:
    sources_manifest: str = config.SOURCES_MANIFEST
    workdir: str = config.WORKDIR
    dataset_root: str = config.DATASET_ROOT


@dataclass
class TrainerPassThrough:
    """
    外部训练器参数，原样写入 trainer.yaml，流水线从不解释
    """

    epochs: int = 1000
    batch: int = 32
    lr0: float = 0.01
    patience: int = 20
    imgsz: int = 512
    mosaic: bool = False
    mixup: bool = False

    def augmented(self) -> "TrainerPassThrough":
        """数据量翻倍时的配置：batch 64, lr0 0.02"""
        return TrainerPassThrough(
            epochs=self.epochs,
            batch=self.batch * 2,
            lr0=self.lr0 * 2,
            patience=self.patience,
            imgsz=self.imgsz,
            mosaic=self.mosaic,
            mixup=self.mixup,
        )


@dataclass
class PipelineConfig:
    """完整流水线配置"""

    paths: PathsConfig = field(default_factory=PathsConfig)
    global_seed: int = config.GLOBAL_SEED
    canvas_size: int = config.CANVAS_SIZE
    buffer_factor: float = config.BUFFER_FACTOR
    min_dim: int = config.MIN_DIM
    fill_value: int = config.FILL_VALUE
    blur_sigma_fraction: float = config.BLUR_SIGMA_FRACTION
    thresholds: QualityThresholds = field(default_factory=QualityThresholds)
    split: SplitConfig = field(default_factory=SplitConfig)
    attempts: AttemptPolicy = field(default_factory=AttemptPolicy)
    backend: BackendConfig = field(default_factory=BackendConfig)
    iqa: IqaConfig = field(default_factory=IqaConfig)
    detectors: DetectorConfig = field(default_factory=DetectorConfig)
    prompt_config: str = config.PROMPT_CONFIG
    background_fraction: float = config.BACKGROUND_FRACTION
    images_per_seed: int = config.IMAGES_PER_SEED
    mask_invert: bool = config.MASK_INVERT
    negative_extras: bool = config.NEGATIVE_EXTRAS
    workers: int = config.MAX_WORKERS
    trainer: TrainerPassThrough = field(default_factory=TrainerPassThrough)

    # ---------- 路径 ----------

    @property
    def workdir(self) -> Path:
        return Path(self.paths.workdir)

    def stage_dir(self, stage: str) -> Path:
        return self.workdir / stage

    # ---------- 校验 ----------

    def validate(self, check_paths: bool = True) -> List[str]:
        """
        校验配置

        Args:
            check_paths: 是否检查引用的输入文件存在

        Returns:
            错误列表（空列表表示通过）
        """
        errors = []
        if not isinstance(self.global_seed, int) or self.global_seed < 0:
            errors.append(f"global_seed 必须是非负整数: {self.global_seed}")
        if not isinstance(self.canvas_size, int) or self.canvas_size < 64:
            errors.append(f"canvas_size 必须 >= 64: {self.canvas_size}")
        if not self.buffer_factor > 1:
            errors.append(f"buffer_factor 必须 > 1: {self.buffer_factor}")
        if not isinstance(self.min_dim, int) or self.min_dim < 1:
            errors.append(f"min_dim 必须 >= 1: {self.min_dim}")
        if not (0 <= self.fill_value <= 255):
            errors.append(f"fill_value 必须在 [0, 255]: {self.fill_value}")
        if self.blur_sigma_fraction < 0:
            errors.append(f"blur_sigma_fraction 不能为负: {self.blur_sigma_fraction}")
        if not (0 <= self.background_fraction < 1):
            errors.append(f"background_fraction 必须在 [0, 1): {self.background_fraction}")
        if not isinstance(self.images_per_seed, int) or self.images_per_seed < 1:
            errors.append(f"images_per_seed 必须 >= 1: {self.images_per_seed}")
        if not isinstance(self.workers, int) or self.workers < 1:
            errors.append(f"workers 必须 >= 1: {self.workers}")

        for section in (self.thresholds, self.split, self.attempts, self.backend, self.iqa, self.detectors):
            errors.extend(section.validate())

        if check_paths and self.prompt_config and not Path(self.prompt_config).exists():
            errors.append(f"提示词配置文件不存在: {self.prompt_config}")
        return errors

    def ensure_valid(self, check_paths: bool = True) -> "PipelineConfig":
        errors = self.validate(check_paths=check_paths)
        if errors:
            for error in errors:
                logger.error(f"❌ 配置错误: {error}")
            raise ConfigError("配置校验失败: " + "; ".join(errors))
        return self

    # ---------- 序列化 ----------

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "PipelineConfig":
        """从字典构造，未知键视为配置错误"""
        return _build(cls, data, prefix="")

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True, ensure_ascii=False)

    @classmethod
    def load(cls, path: Optional[str] = None, check_paths: bool = True) -> "PipelineConfig":
        """
        加载配置

        Args:
            path: JSON 配置文件路径；为空时全部使用环境默认值
            check_paths: 是否检查引用文件存在

        Raises:
            ConfigError: 文件不存在、格式错误或校验失败
        """
        if not path:
            cfg = cls()
        else:
            file = Path(path)
            if not file.exists():
                raise ConfigError(f"配置文件不存在: {path}")
            try:
                data = json.loads(file.read_text(encoding="utf-8"))
            except json.JSONDecodeError as e:
                raise ConfigError(f"配置文件不是合法 JSON: {path}: {e}") from e
            if not isinstance(data, dict):
                raise ConfigError(f"配置文件顶层必须是对象: {path}")
            cfg = cls.from_dict(data)
            logger.info(f"✅ 加载配置: {path}")
        return cfg.ensure_valid(check_paths=check_paths)


def _build(cls, data: Dict[str, Any], prefix: str):
    if not isinstance(data, dict):
        raise ConfigError(f"{prefix or '配置'} 必须是对象")
    known = {f.name: f for f in fields(cls)}
    unknown = sorted(set(data) - set(known))
    if unknown:
        raise ConfigError(f"未知配置项: {', '.join(prefix + k for k in unknown)}")

    kwargs = {}
    for name, value in data.items():
        f = known[name]
        default = f.default_factory() if callable(f.default_factory) else f.default
        if is_dataclass(default):
            kwargs[name] = _build(type(default), value, prefix=f"{prefix}{name}.")
        elif isinstance(default, list):
            if not isinstance(value, list):
                raise ConfigError(f"{prefix}{name} 必须是列表")
            kwargs[name] = [str(v) for v in value]
        elif isinstance(default, bool):
            if not isinstance(value, bool):
                raise ConfigError(f"{prefix}{name} 必须是布尔值")
            kwargs[name] = value
        elif isinstance(default, int):
            if isinstance(value, bool) or not isinstance(value, int):
                raise ConfigError(f"{prefix}{name} 必须是整数")
            kwargs[name] = value
        elif isinstance(default, float):
            if isinstance(value, bool) or not isinstance(value, (int, float)):
                raise ConfigError(f"{prefix}{name} 必须是数值")
            kwargs[name] = float(value)
        else:
            kwargs[name] = value
    return cls(**kwargs)
