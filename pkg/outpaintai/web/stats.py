"""
运行统计模块
汇总各阶段清单：接受率、拒绝原因、尝试次数与分数分布
"""
from pathlib import Path
from typing import Any, Dict

import pandas as pd

from ..geometry import DEFAULT_REGISTRY, ClassRegistry
from ..logger import get_logger
from ..utils import read_jsonl

logger = get_logger("web.stats")

SCORE_COLUMNS = ("brisque", "clip_iqa", "tv")


def _round(value, digits: int = 6):
    if value is None or pd.isna(value):
        return None
    return round(float(value), digits)


class RunStats:
    """运行统计计算器"""

    def __init__(self, workdir: str = "data", registry: ClassRegistry = DEFAULT_REGISTRY):
        """
        初始化统计计算器

        Args:
            workdir: 流水线工作目录
            registry: 类别表
        """
        self.workdir = Path(workdir)
        self.registry = registry

    def load(self, stage: str, name: str = "manifest.jsonl") -> pd.DataFrame:
        """读取某个阶段的清单（不存在时返回空表）"""
        rows = read_jsonl(self.workdir / stage / name, required=False)
        return pd.DataFrame(rows)

    @staticmethod
    def _status_counts(frame: pd.DataFrame) -> Dict[str, Any]:
        if frame.empty:
            return {"total": 0, "accepted": 0, "rejected": 0, "acceptance_rate": None, "reasons": {}}
        accepted = int((frame["status"] == "accepted").sum())
        rejected = frame[frame["status"] != "accepted"]
        reason = rejected["reason"] if "reason" in rejected else pd.Series("unknown", index=rejected.index)
        reasons = reason.fillna("unknown").value_counts().sort_index()
        return {
            "total": int(len(frame)),
            "accepted": accepted,
            "rejected": int(len(rejected)),
            "acceptance_rate": _round(accepted / len(frame)),
            "reasons": {str(k): int(v) for k, v in reasons.items()},
        }

    @staticmethod
    def scores(frame: pd.DataFrame) -> pd.DataFrame:
        """已接受条目的分数表（每行一张图）"""
        if frame.empty or "report" not in frame:
            return pd.DataFrame(columns=["item_key", *SCORE_COLUMNS])
        accepted = frame[frame["status"] == "accepted"]
        records = []
        for _, row in accepted.iterrows():
            report = row["report"] or {}
            records.append({"item_key": row["item_key"], **{c: report.get(c) for c in SCORE_COLUMNS}})
        return pd.DataFrame(records, columns=["item_key", *SCORE_COLUMNS])

    def _score_summary(self, frame: pd.DataFrame) -> Dict[str, Dict[str, Any]]:
        table = self.scores(frame)
        summary = {}
        for column in SCORE_COLUMNS:
            values = pd.to_numeric(table[column], errors="coerce").dropna()
            if values.empty:
                summary[column] = {"count": 0}
                continue
            summary[column] = {
                "count": int(values.count()),
                "mean": _round(values.mean()),
                "min": _round(values.min()),
                "median": _round(values.median()),
                "max": _round(values.max()),
            }
        return summary

    def _attempt_summary(self, stage: str, frame: pd.DataFrame) -> Dict[str, Any]:
        attempts = self.load(stage, "attempts.jsonl")
        summary = {"backend_calls": int(len(attempts))}
        if not attempts.empty:
            summary["verdicts"] = {str(k): int(v) for k, v in attempts["verdict"].value_counts().sort_index().items()}
        if not frame.empty and "attempts" in frame:
            per_item = pd.to_numeric(frame["attempts"], errors="coerce").dropna()
            if not per_item.empty:
                summary["per_item_mean"] = _round(per_item.mean())
                summary["per_item_max"] = int(per_item.max())
        return summary

    def per_class(self, frame: pd.DataFrame) -> Dict[str, int]:
        if frame.empty:
            return {}
        accepted = frame[frame["status"] == "accepted"]
        counts = accepted["class_id"].value_counts()
        return {self.registry.name_of(int(cid)): int(counts.get(cid, 0)) for cid in sorted(counts.index)}

    def summary(self) -> Dict[str, Any]:
        """
        运行报告（不含时间戳，相同输入得到相同内容）

        Returns:
            {"seeds", "compose", "outpaint", "backgrounds"}
        """
        seeds = self.load("seeds")
        compose = self.load("compose")
        outpaint = self.load("outpaint")
        backgrounds = self.load("backgrounds")

        report = {
            "seeds": self._status_counts(seeds),
            "compose": self._status_counts(compose),
            "outpaint": {
                **self._status_counts(outpaint),
                "attempts": self._attempt_summary("outpaint", outpaint),
                "scores": self._score_summary(outpaint),
                "per_class": self.per_class(outpaint),
            },
            "backgrounds": {
                **self._status_counts(backgrounds),
                "attempts": self._attempt_summary("backgrounds", backgrounds),
                "scores": self._score_summary(backgrounds),
            },
        }
        logger.debug(f"运行统计: 外扩接受 {report['outpaint']['accepted']} / {report['outpaint']['total']}")
        return report
