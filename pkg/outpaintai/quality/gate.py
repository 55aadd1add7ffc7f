"""
质量门限

BRISQUE <= 15、CLIP-IQA >= 0.9、TV <= 15 全部满足才通过（闭区间）；
评分器缺失或出错时该项记为 skipped，不算通过
"""
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence

import numpy as np

from .providers.base import BaseIqaProvider, HIGHER_BETTER
from .tv import tv_loss
from ..logger import get_logger
from ..pipeline_config import QualityThresholds

logger = get_logger("quality.gate")

PASSED = "passed"
FAILED = "failed"
SKIPPED = "skipped"


@dataclass
class QualityReport:
    """单张图的质量报告"""

    brisque: Optional[float] = None
    clip_iqa: Optional[float] = None
    tv: Optional[float] = None
    pass_brisque: str = SKIPPED
    pass_clipiqa: str = SKIPPED
    pass_tv: str = SKIPPED
    pass_all: bool = False
    notes: List[str] = field(default_factory=list)

    @property
    def flags(self) -> Dict[str, str]:
        return {"brisque": self.pass_brisque, "clipiqa": self.pass_clipiqa, "tv": self.pass_tv}

    def to_dict(self) -> dict:
        return {
            "brisque": self.brisque,
            "clip_iqa": self.clip_iqa,
            "tv": self.tv,
            "pass_brisque": self.pass_brisque,
            "pass_clipiqa": self.pass_clipiqa,
            "pass_tv": self.pass_tv,
            "pass_all": self.pass_all,
            "notes": list(self.notes),
        }

    @classmethod
    def from_dict(cls, data: dict) -> "QualityReport":
        return cls(
            brisque=data.get("brisque"),
            clip_iqa=data.get("clip_iqa"),
            tv=data.get("tv"),
            pass_brisque=data.get("pass_brisque", SKIPPED),
            pass_clipiqa=data.get("pass_clipiqa", SKIPPED),
            pass_tv=data.get("pass_tv", SKIPPED),
            pass_all=bool(data.get("pass_all", False)),
            notes=list(data.get("notes", [])),
        )


def _verdict(value: float, threshold: float, direction: str) -> str:
    if direction == HIGHER_BETTER:
        return PASSED if value >= threshold else FAILED
    return PASSED if value <= threshold else FAILED


def assess(
    image: np.ndarray,
    providers: Sequence[BaseIqaProvider],
    thresholds: QualityThresholds,
    require_all: bool = True,
) -> QualityReport:
    """
    评估一张图

    Args:
        image: (H, W, 3) uint8 图像
        providers: BRISQUE / CLIP-IQA 评分器（可为空）
        thresholds: 门限
        require_all: skipped 是否视为不通过

    Returns:
        QualityReport（评分器异常不会向外抛出）
    """
    report = QualityReport()

    report.tv = tv_loss(image, thresholds.tv_resolution)
    report.pass_tv = _verdict(report.tv, thresholds.tv_max, "lower")

    by_metric = {p.metric: p for p in providers}
    for metric, attr, flag, threshold in (
        ("brisque", "brisque", "pass_brisque", thresholds.brisque_max),
        ("clipiqa", "clip_iqa", "pass_clipiqa", thresholds.clipiqa_min),
    ):
        provider = by_metric.get(metric)
        if provider is None:
            report.notes.append(f"{metric}: 评分器不可用")
            continue
        try:
            value = float(provider.score(image))
        except Exception as e:
            logger.warning(f"⚠️  {provider.get_provider_name()} 打分失败: {e}")
            report.notes.append(f"{metric}: {type(e).__name__}: {e}")
            continue
        setattr(report, attr, value)
        setattr(report, flag, _verdict(value, threshold, provider.direction))

    flags = list(report.flags.values())
    if require_all:
        report.pass_all = all(f == PASSED for f in flags)
    else:
        report.pass_all = FAILED not in flags
    return report


class QualityGate:
    """评分器 + 门限"""

    def __init__(
        self,
        providers: Optional[Sequence[BaseIqaProvider]] = None,
        thresholds: Optional[QualityThresholds] = None,
        require_all: bool = True,
    ):
        self.providers = list(providers or [])
        self.thresholds = thresholds or QualityThresholds()
        self.require_all = require_all

        missing = {"brisque", "clipiqa"} - {p.metric for p in self.providers}
        if missing and require_all:
            logger.warning(
                f"⚠️  缺少评分器 {', '.join(sorted(missing))}，在 require_all 模式下所有图像都不会通过"
            )

    def assess(self, image: np.ndarray) -> QualityReport:
        return assess(image, self.providers, self.thresholds, self.require_all)

    def close(self):
        for provider in self.providers:
            provider.close()
