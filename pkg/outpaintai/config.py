"""
配置管理

所有默认值都可以通过 .env 或环境变量覆盖；
PipelineConfig（pipeline_config.py）以这里的值作为字段默认值
"""
from dotenv import load_dotenv

from .config_helper import (
    get_config,
    get_choice_config,
    get_bool_config,
    get_int_config,
    get_float_config,
    get_list_config,
)

load_dotenv()

# ==================== 生成后端 ====================
# mock, diffusers, remote, openai
OUTPAINT_BACKEND = get_config("OUTPAINT_BACKEND", "mock")
OUTPAINT_BACKEND_ENDPOINT = get_config("OUTPAINT_BACKEND_ENDPOINT", "")
OUTPAINT_BACKEND_MODEL = get_config("OUTPAINT_BACKEND_MODEL", "")
OUTPAINT_API_KEY = get_config("OUTPAINT_API_KEY", "")

# 远程后端请求超时（秒）与重试次数
OUTPAINT_REQUEST_TIMEOUT = get_float_config("OUTPAINT_REQUEST_TIMEOUT", 120.0)
OUTPAINT_REQUEST_RETRIES = get_int_config("OUTPAINT_REQUEST_RETRIES", 2)

# mock 后端模式：always-smooth, always-noisy, noisy-first-k
MOCK_MODE = get_choice_config("MOCK_MODE", "always-smooth", ("always-smooth", "always-noisy", "noisy-first-k"))
MOCK_NOISY_K = get_int_config("MOCK_NOISY_K", 3)

# ==================== 随机性 ====================
GLOBAL_SEED = get_int_config("GLOBAL_SEED", 0)

# ==================== 种子与画布 ====================
CANVAS_SIZE = get_int_config("CANVAS_SIZE", 512)
BUFFER_FACTOR = get_float_config("BUFFER_FACTOR", 1.15)
MIN_DIM = get_int_config("MIN_DIM", 32)
FILL_VALUE = get_int_config("FILL_VALUE", 128)
BLUR_SIGMA_FRACTION = get_float_config("BLUR_SIGMA_FRACTION", 0.5)

# 检测器集成顺序（同票时按此顺序）
DETECTOR_ENSEMBLE = get_list_config(
    "DETECTOR_ENSEMBLE",
    ["fcos", "retinanet", "ssd", "maskrcnn", "fasterrcnn"],
)
# 检测器适配器：fixture（读取旁注文件）或 torchvision
DETECTOR = get_config("DETECTOR", "fixture")
VOTE_IOU_THRESHOLD = get_float_config("VOTE_IOU_THRESHOLD", 0.95)
# 被视为"车辆"的粗粒度检测类别
VEHICLE_LABELS = get_list_config("VEHICLE_LABELS", ["car", "bus", "truck"])

# ==================== 质量门限 ====================
BRISQUE_MAX = get_float_config("BRISQUE_MAX", 15.0)
CLIPIQA_MIN = get_float_config("CLIPIQA_MIN", 0.9)
TV_MAX = get_float_config("TV_MAX", 15.0)
TV_RESOLUTION = get_int_config("TV_RESOLUTION", 32)
IQA_DEVICE = get_config("IQA_DEVICE", "cpu")
# auto: mock 后端用 fixture，其余尝试 pyiqa；也可显式列出 pyiqa, fixture
IQA_PROVIDERS = get_list_config("IQA_PROVIDERS", ["auto"])
# 任一评分器缺失时是否判为不通过
IQA_REQUIRE_ALL = get_bool_config("IQA_REQUIRE_ALL", True)

# ==================== 生成循环 ====================
MAX_ATTEMPTS = get_int_config("MAX_ATTEMPTS", 20)
ON_EXHAUSTION = get_choice_config("ON_EXHAUSTION", "skip", ("skip", "keep-best"))
MAX_WORKERS = get_int_config("MAX_WORKERS", 3)
IMAGES_PER_SEED = get_int_config("IMAGES_PER_SEED", 1)
BACKGROUND_FRACTION = get_float_config("BACKGROUND_FRACTION", 0.1)

# 掩码极性：默认 255 = 需要生成的区域
MASK_INVERT = get_bool_config("MASK_INVERT", False)
# 负向提示词是否追加 billboard, text, advertisement
NEGATIVE_EXTRAS = get_bool_config("NEGATIVE_EXTRAS", False)

# ==================== 路径 ====================
WORKDIR = get_config("WORKDIR", "data")
# 人工整理的源图清单（CSV: source_path, class, seed_id）
SOURCES_MANIFEST = get_config("SOURCES_MANIFEST", "data/sources/manifest.csv")
DATASET_ROOT = get_config("DATASET_ROOT", "dataset")
PROMPT_CONFIG = get_config("PROMPT_CONFIG", "")

# ==================== 日志配置 ====================
LOG_LEVEL = get_choice_config("LOG_LEVEL", "INFO", ("DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL"))
LOG_DIR = get_config("LOG_DIR", "logs")
LOG_RETENTION_HOURS = get_int_config("LOG_RETENTION_HOURS", 72)

# ==================== 代理配置 ====================
USE_PROXY = get_bool_config("USE_PROXY", False)
PROXY_HOST = get_config("PROXY_HOST", "127.0.0.1")
PROXY_PORT = get_int_config("PROXY_PORT", 7890)

# ==================== 画廊预览 ====================
WEB_PORT = get_int_config("WEB_PORT", 8080)
