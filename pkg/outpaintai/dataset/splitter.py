"""
按种子划分数据集

以 seed_id 为划分单位（同一种子的所有外扩图落在同一个 split），按 class_id 分层；
每个类别内部先确定性打乱，再用最大余数法把比例取整
"""
from dataclasses import dataclass, field
from typing import Dict, Iterable, List, Mapping, Optional

import numpy as np
import pandas as pd

from ..exceptions import ValidationError
from ..geometry import ClassRegistry, DEFAULT_REGISTRY
from ..logger import get_logger
from ..pipeline_config import SplitConfig

logger = get_logger("dataset.splitter")

SPLITS = ("train", "val", "test")
# 种子不足 3 个的类别依次分配到 test, train, val；余数相同时也按此顺序
PRIORITY = ("test", "train", "val")
BACKGROUND = "BACKGROUND"


@dataclass
class SplitAssignment:
    """seed_id → split"""

    splits: Dict[str, str] = field(default_factory=dict)
    classes: Dict[str, Optional[int]] = field(default_factory=dict)

    def split_of(self, seed_id: str) -> str:
        if seed_id not in self.splits:
            raise ValidationError(f"种子 {seed_id} 不在划分结果中")
        return self.splits[seed_id]

    def seeds_in(self, split: str) -> List[str]:
        return sorted(s for s, sp in self.splits.items() if sp == split)

    def counts(self) -> pd.DataFrame:
        """每个 split × 类别的种子数（背景类别记为 None）"""
        frame = self.to_frame()
        if frame.empty:
            return pd.DataFrame(0, index=list(SPLITS), columns=[])
        table = pd.crosstab(frame["split"], frame["stratum"])
        return table.reindex(index=list(SPLITS), fill_value=0)

    def to_frame(self) -> pd.DataFrame:
        rows = [
            {
                "seed_id": seed_id,
                "class_id": self.classes.get(seed_id),
                "stratum": _stratum(self.classes.get(seed_id)),
                "split": split,
            }
            for seed_id, split in sorted(self.splits.items())
        ]
        return pd.DataFrame(rows, columns=["seed_id", "class_id", "stratum", "split"])

    def assert_leak_free(self, image_seeds: Mapping[str, str]):
        """
        校验每张图都跟随其种子的 split

        Args:
            image_seeds: image stem → seed_id
        """
        seen: Dict[str, str] = {}
        for stem, seed_id in image_seeds.items():
            split = self.split_of(seed_id)
            if seen.setdefault(seed_id, split) != split:
                raise ValidationError(f"种子 {seed_id} 出现在多个 split 中")


def _stratum(class_id: Optional[int]) -> str:
    return BACKGROUND if class_id is None else str(int(class_id))


def largest_remainder(n: int, fractions: Mapping[str, float]) -> Dict[str, int]:
    """
    最大余数法取整

    Examples:
        largest_remainder(10, {"train": .4, "val": .1, "test": .5}) → {"train": 4, "val": 1, "test": 5}
    """
    targets = {name: n * fractions[name] for name in SPLITS}
    counts = {name: int(np.floor(t + 1e-9)) for name, t in targets.items()}
    left = n - sum(counts.values())
    order = sorted(PRIORITY, key=lambda name: -(targets[name] - counts[name]))
    for name in order[:left]:
        counts[name] += 1
    return counts


def stratified_split(records: Iterable, cfg: SplitConfig, rng: np.random.Generator) -> SplitAssignment:
    """
    分层划分

    Args:
        records: 带 seed_id、class_id 的记录（dict 或对象）；class_id 为 None 表示背景图，
            背景单独作为一个分层
        cfg: 划分比例
        rng: 命名随机流（类别按 ID 顺序依次消耗）

    Returns:
        SplitAssignment

    Raises:
        ValidationError: 输入为空，或同一种子出现不同类别
    """
    errors = cfg.validate()
    if errors:
        raise ValidationError("; ".join(errors))

    classes: Dict[str, Optional[int]] = {}
    for record in records:
        seed_id = _field(record, "seed_id")
        class_id = _field(record, "class_id")
        class_id = None if class_id is None else int(class_id)
        if seed_id in classes and classes[seed_id] != class_id:
            raise ValidationError(f"种子 {seed_id} 的类别不一致: {classes[seed_id]} / {class_id}")
        classes[seed_id] = class_id

    if not classes:
        raise ValidationError("没有可划分的记录")

    strata: Dict[str, List[str]] = {}
    for seed_id, class_id in classes.items():
        strata.setdefault(_stratum(class_id), []).append(seed_id)

    assignment = SplitAssignment(classes=dict(classes))
    for stratum in sorted(strata, key=lambda s: (s == BACKGROUND, int(s) if s != BACKGROUND else 0)):
        seeds = sorted(strata[stratum])
        shuffled = [seeds[i] for i in rng.permutation(len(seeds))]

        if len(shuffled) < 3:
            for seed_id, split in zip(shuffled, PRIORITY):
                assignment.splits[seed_id] = split
            continue

        counts = largest_remainder(len(shuffled), cfg.fractions)
        cursor = 0
        for split in SPLITS:
            for seed_id in shuffled[cursor:cursor + counts[split]]:
                assignment.splits[seed_id] = split
            cursor += counts[split]

    sizes = {s: len(assignment.seeds_in(s)) for s in SPLITS}
    logger.info(f"✅ 划分完成: train {sizes['train']} / val {sizes['val']} / test {sizes['test']}")
    return assignment


def _field(record, name: str):
    if isinstance(record, Mapping):
        if name not in record:
            raise ValidationError(f"记录缺少字段 {name}: {record}")
        return record[name]
    return getattr(record, name)


def distribution_table(
    assignment: SplitAssignment,
    image_seeds: Optional[Mapping[str, str]] = None,
    registry: ClassRegistry = DEFAULT_REGISTRY,
) -> pd.DataFrame:
    """
    每个 split 的类别占比（百分比）

    Args:
        assignment: 划分结果
        image_seeds: image stem → seed_id；提供时按图像计数，否则按种子计数
        registry: 类别表（列顺序）

    Returns:
        行为 train/val/test，列为 Size、类别名与 BACKGROUND 的 DataFrame
    """
    if not assignment.splits:
        raise ValidationError("划分结果为空")

    if image_seeds is None:
        units = {seed_id: seed_id for seed_id in assignment.splits}
    else:
        units = dict(image_seeds)

    rows = []
    for unit, seed_id in units.items():
        class_id = assignment.classes.get(seed_id)
        rows.append({
            "split": assignment.split_of(seed_id),
            "column": BACKGROUND if class_id is None else registry.name_of(class_id),
        })
    frame = pd.DataFrame(rows)

    columns = registry.names + [BACKGROUND]
    counts = pd.crosstab(frame["split"], frame["column"]).reindex(index=list(SPLITS), columns=columns, fill_value=0)
    sizes = counts.sum(axis=1)
    percent = counts.div(sizes.where(sizes > 0, 1), axis=0) * 100.0

    table = percent.round(2)
    table.insert(0, "Size", sizes.astype(int))
    table.index.name = "Split"
    return table
