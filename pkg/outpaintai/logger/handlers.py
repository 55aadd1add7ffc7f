"""
自定义日志处理器
"""
import logging
from pathlib import Path
from typing import Optional

# 获取项目根目录
PROJECT_ROOT = Path(__file__).parent.parent.parent


class AttemptLogger:
    """生成尝试专用日志器（人类可读的尝试轨迹）"""

    def __init__(self, log_file: Optional[str] = None):
        if log_file is None:
            from ..config import LOG_DIR
            log_file = str(PROJECT_ROOT / LOG_DIR / "attempts.log")

        self.logger = logging.getLogger(f"outpaintai.attempts.{Path(log_file).resolve()}")
        self.logger.setLevel(logging.INFO)
        self.logger.propagate = False

        if not self.logger.handlers:
            Path(log_file).parent.mkdir(parents=True, exist_ok=True)
            handler = logging.FileHandler(log_file, encoding='utf-8')
            handler.setFormatter(logging.Formatter('%(asctime)s | %(message)s', '%Y-%m-%d %H:%M:%S'))
            self.logger.addHandler(handler)

    def log_attempt(self, item_key: str, attempt: int, report: Optional[dict], verdict: str):
        """记录一次后端调用及其评分"""
        if report:
            scores = (
                f"BRISQUE: {_fmt(report.get('brisque'))} | "
                f"CLIP-IQA: {_fmt(report.get('clip_iqa'))} | "
                f"TV: {_fmt(report.get('tv'))}"
            )
        else:
            scores = "no scores"
        self.logger.info(f"ATTEMPT | {item_key} | #{attempt} | {scores} | {verdict}")

    def log_outcome(self, item_key: str, accepted: bool, attempts: int, reason: str = ""):
        """记录一个条目的最终结果"""
        status = "ACCEPTED" if accepted else f"REJECTED ({reason})"
        self.logger.info(f"OUTCOME | {item_key} | {status} | attempts: {attempts}")

    def log_error(self, item_key: str, error: str):
        """记录错误"""
        self.logger.error(f"ERROR | {item_key} | {error}")


def _fmt(value) -> str:
    return "skipped" if value is None else f"{value:.3f}"
