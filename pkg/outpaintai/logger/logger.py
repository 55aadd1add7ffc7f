"""
日志系统

所有模块日志器都挂在 "outpaintai" 之下，由它统一输出到控制台和按天命名的文件
（logs/outpaint_YYYYMMDD.log）；模块内通过 get_logger("seeds.extractor") 获取
"""
import logging
import sys
from datetime import datetime, timedelta
from pathlib import Path
from typing import Optional

# 获取项目根目录
PROJECT_ROOT = Path(__file__).parent.parent.parent

ROOT_NAME = "outpaintai"
LOG_FORMAT = '%(asctime)s [%(levelname)s] %(name)s: %(message)s'
DATE_FORMAT = '%Y-%m-%d %H:%M:%S'
FILE_PREFIX = "outpaint_"

_configured = False


class ColoredFormatter(logging.Formatter):
    """彩色日志格式化器（仅控制台）"""

    COLORS = {
        'DEBUG': '\033[36m',
        'INFO': '\033[32m',
        'WARNING': '\033[33m',
        'ERROR': '\033[31m',
        'CRITICAL': '\033[35m',
    }
    RESET = '\033[0m'

    def format(self, record):
        # 复制一份，颜色码不能进入文件处理器
        record = logging.makeLogRecord(record.__dict__)
        color = self.COLORS.get(record.levelname)
        if color:
            record.levelname = f"{color}{record.levelname}{self.RESET}"
        return super().format(record)


def setup_logger(level: str = "INFO", log_file: Optional[str] = None, console: bool = True) -> logging.Logger:
    """
    配置根日志器 outpaintai（重复调用会替换已有处理器）

    Args:
        level: 日志级别 (DEBUG, INFO, WARNING, ERROR, CRITICAL)
        log_file: 日志文件路径
        console: 是否输出到控制台

    Returns:
        根日志器
    """
    root = logging.getLogger(ROOT_NAME)
    root.setLevel(getattr(logging, level.upper(), logging.INFO))
    root.propagate = False

    for handler in list(root.handlers):
        handler.close()
        root.removeHandler(handler)

    if console:
        console_handler = logging.StreamHandler(sys.stdout)
        console_handler.setFormatter(ColoredFormatter(LOG_FORMAT, DATE_FORMAT))
        root.addHandler(console_handler)

    if log_file:
        Path(log_file).parent.mkdir(parents=True, exist_ok=True)
        file_handler = logging.FileHandler(log_file, encoding='utf-8')
        file_handler.setFormatter(logging.Formatter(LOG_FORMAT, DATE_FORMAT))
        root.addHandler(file_handler)

    return root


def cleanup_old_logs(log_dir: Path, max_hours: int = 72) -> int:
    """
    删除超过保留期的按天日志文件

    Args:
        log_dir: 日志目录
        max_hours: 保留的最大小时数

    Returns:
        删除的文件数
    """
    if not log_dir.exists():
        return 0

    cutoff = (datetime.now() - timedelta(hours=max_hours)).date()
    removed = 0
    for path in log_dir.glob(f"{FILE_PREFIX}*.log"):
        try:
            day = datetime.strptime(path.stem[len(FILE_PREFIX):], '%Y%m%d').date()
        except ValueError:
            continue
        if day >= cutoff:
            continue
        try:
            path.unlink()
            removed += 1
        except OSError as e:
            print(f"清理日志文件失败 {path}: {e}")
    return removed


def get_logger(name: str, log_file: Optional[str] = None) -> logging.Logger:
    """
    获取模块日志器

    Args:
        name: 模块名称（如 "orchestrator.pipeline"）
        log_file: 日志文件路径（可选，只在首次配置根日志器时生效）

    Returns:
        outpaintai.<name> 日志器
    """
    global _configured
    if not _configured:
        from ..config import LOG_LEVEL, LOG_DIR, LOG_RETENTION_HOURS

        log_dir = PROJECT_ROOT / LOG_DIR
        cleanup_old_logs(log_dir, LOG_RETENTION_HOURS)
        if log_file is None:
            log_file = str(log_dir / f"{FILE_PREFIX}{datetime.now():%Y%m%d}.log")
        setup_logger(LOG_LEVEL, log_file)
        _configured = True

    if name.startswith(ROOT_NAME + "."):
        name = name[len(ROOT_NAME) + 1:]
    return logging.getLogger(f"{ROOT_NAME}.{name}")
