"""
异常定义

每一类错误对应一个命令行退出码，main.py 据此返回：

    2  命令行用法错误（未知参数等，由 argparse 直接退出）
    3  PipelineIOError   读写错误（上游清单缺失、图像无法读取）
    4  ConfigError       配置错误（配置文件不合法、取值越界）
    5  BackendError      后端错误（本轮所有条目都因后端故障失败）
    6  ValidationError   校验错误（标签格式、数据泄漏、文件名冲突）
"""


class OutpaintError(Exception):
    """所有流水线错误的基类"""

    exit_code = 1
    category = "error"


class ConfigError(OutpaintError, ValueError):
    """配置错误（配置文件格式、取值范围、词表为空等）"""

    exit_code = 4
    category = "config"


class PipelineIOError(OutpaintError, OSError):
    """读写错误（图像无法读取、上游清单缺失等）"""

    exit_code = 3
    category = "io"


class BackendError(OutpaintError, RuntimeError):
    """生成后端错误"""

    exit_code = 5
    category = "backend"


class ValidationError(OutpaintError, ValueError):
    """数据校验错误"""

    exit_code = 6
    category = "validation"


class GeometryError(ValidationError):
    """几何参数非法（零面积框、缓冲比例矛盾等）"""


class PlacementError(ValidationError):
    """种子无法放置到画布上"""

    def __init__(self, message: str, reason: str = "unplaceable"):
        super().__init__(message)
        self.reason = reason


class LabelParseError(ValidationError):
    """标签文件解析失败，携带出错行号"""

    def __init__(self, line_no: int, message: str):
        super().__init__(f"第 {line_no} 行: {message}")
        self.line_no = line_no
