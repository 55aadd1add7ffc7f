"""
数据集目录输出

    root/images/{train,val,test}/<stem>.png
    root/labels/{train,val,test}/<stem>.txt
    root/data.yaml      类别名、split 路径与数量
    root/trainer.yaml   训练器参数（原样转交）
    root/splits.csv     seed_id → split
"""
import shutil
from dataclasses import asdict, dataclass
from pathlib import Path
from typing import Dict, List, Optional, Sequence

import yaml

from .splitter import SPLITS, SplitAssignment, distribution_table, stratified_split
from ..exceptions import ConfigError, PipelineIOError, ValidationError
from ..geometry import ClassRegistry, DEFAULT_REGISTRY
from ..logger import get_logger
from ..utils import read_jsonl, stream

logger = get_logger("dataset.writer")

IMAGE_SUFFIXES = (".png", ".jpg", ".jpeg", ".bmp")


@dataclass
class DatasetItem:
    """一张待写入的数据集图像"""

    stem: str
    image_path: Path
    label_path: Path
    seed_id: str
    class_id: Optional[int]
    # 固定 split（真实数据集增强模式）；为空时跟随种子
    split: Optional[str] = None


def collect_items(workdir) -> List[DatasetItem]:
    """
    从 outpaint 与 backgrounds 清单收集已接受的图像

    Raises:
        PipelineIOError: 外扩清单不存在
    """
    workdir = Path(workdir)
    items = []

    outpaint_dir = workdir / "outpaint"
    for row in read_jsonl(outpaint_dir / "manifest.jsonl"):
        if row.get("status") != "accepted":
            continue
        items.append(DatasetItem(
            stem=row["item_key"],
            image_path=outpaint_dir / row["image"],
            label_path=outpaint_dir / row["label"],
            seed_id=row["seed_id"],
            class_id=int(row["class_id"]),
        ))

    background_dir = workdir / "backgrounds"
    for row in read_jsonl(background_dir / "manifest.jsonl", required=False):
        if row.get("status") != "accepted":
            continue
        items.append(DatasetItem(
            stem=row["item_key"],
            image_path=background_dir / row["image"],
            label_path=background_dir / row["label"],
            seed_id=row["item_key"],
            class_id=None,
        ))

    items.sort(key=lambda item: item.stem)
    return items


def collect_real_items(real_root) -> List[DatasetItem]:
    """
    读取已有的真实数据集（images/{split}, labels/{split} 布局）

    Raises:
        PipelineIOError: 目录不存在
    """
    real_root = Path(real_root)
    if not (real_root / "images").is_dir():
        raise PipelineIOError(f"真实数据集缺少 images 目录: {real_root}")

    items = []
    for split in SPLITS:
        image_dir = real_root / "images" / split
        if not image_dir.is_dir():
            continue
        for image_path in sorted(image_dir.iterdir()):
            if image_path.suffix.lower() not in IMAGE_SUFFIXES:
                continue
            items.append(DatasetItem(
                stem=image_path.stem,
                image_path=image_path,
                label_path=real_root / "labels" / split / f"{image_path.stem}.txt",
                seed_id=f"real:{image_path.stem}",
                class_id=None,
                split=split,
            ))
    logger.info(f"📥 真实数据集: {len(items)} 张")
    return items


def _plan(items: Sequence[DatasetItem], assignment: Optional[SplitAssignment]) -> Dict[str, List[DatasetItem]]:
    """把图像分配到各 split，并检查文件名冲突与缺失标签"""
    plan: Dict[str, List[DatasetItem]] = {split: [] for split in SPLITS}
    stems: Dict[str, str] = {}

    for item in items:
        split = item.split or assignment.split_of(item.seed_id)
        if item.stem in stems:
            raise ValidationError(f"文件名冲突: {item.stem} ({stems[item.stem]} / {split})")
        stems[item.stem] = split
        if not item.image_path.exists():
            raise PipelineIOError(f"图像不存在: {item.image_path}")
        if not item.label_path.exists():
            raise ValidationError(f"图像缺少标签文件: {item.image_path.name}")
        plan[split].append(item)

    for split in SPLITS:
        plan[split].sort(key=lambda item: item.stem)
    return plan


def check_disjoint(root: Path, protected: Sequence) -> None:
    """输出目录会被清空重建，不能与受保护目录相同或互相包含"""
    target = root.resolve()
    for other in protected:
        guarded = Path(other).resolve()
        if target == guarded or target.is_relative_to(guarded) or guarded.is_relative_to(target):
            raise ConfigError(f"数据集目录 {root} 与 {other} 重叠，拒绝覆盖")


def write_dataset(
    items: Sequence[DatasetItem],
    assignment: Optional[SplitAssignment],
    root,
    registry: ClassRegistry = DEFAULT_REGISTRY,
    trainer: Optional[object] = None,
    protected: Sequence = (),
) -> dict:
    """
    输出数据集目录与描述文件（重复执行得到相同的目录树）

    Args:
        items: 图像列表
        assignment: 种子划分（item.split 固定时可为空）
        root: 输出根目录
        registry: 类别表（names 顺序）
        trainer: TrainerPassThrough，写入 trainer.yaml
        protected: 不允许与 root 相互包含的目录（工作目录、真实数据集）

    Returns:
        data.yaml 的内容

    Raises:
        ValidationError: 文件名冲突或缺少标签
        ConfigError: root 与受保护目录重叠
    """
    root = Path(root)
    check_disjoint(root, protected)
    plan = _plan(items, assignment)

    for sub in ("images", "labels"):
        if (root / sub).exists():
            shutil.rmtree(root / sub)

    for split, split_items in plan.items():
        image_dir = root / "images" / split
        label_dir = root / "labels" / split
        image_dir.mkdir(parents=True, exist_ok=True)
        label_dir.mkdir(parents=True, exist_ok=True)
        for item in split_items:
            shutil.copyfile(item.image_path, image_dir / f"{item.stem}{item.image_path.suffix.lower()}")
            shutil.copyfile(item.label_path, label_dir / f"{item.stem}.txt")

    descriptor = {
        "path": str(root),
        "train": "images/train",
        "val": "images/val",
        "test": "images/test",
        "nc": len(registry),
        "names": registry.names,
        "counts": {split: len(plan[split]) for split in SPLITS},
    }
    (root / "data.yaml").write_text(
        yaml.safe_dump(descriptor, sort_keys=False, allow_unicode=True), encoding="utf-8"
    )
    if trainer is not None:
        (root / "trainer.yaml").write_text(yaml.safe_dump(asdict(trainer), sort_keys=False), encoding="utf-8")

    if assignment is not None:
        assignment.to_frame().to_csv(root / "splits.csv", index=False, lineterminator="\n")

    counts = descriptor["counts"]
    logger.info(
        f"✅ 数据集已写出: {root} (train {counts['train']} / val {counts['val']} / test {counts['test']})"
    )
    return descriptor


def assemble_dataset(cfg, augment_real: Optional[str] = None, registry: ClassRegistry = DEFAULT_REGISTRY) -> dict:
    """
    assemble 阶段：收集 → 划分 → 输出 → 分布表

    Args:
        cfg: PipelineConfig
        augment_real: 真实数据集目录；提供时外扩图只进入 train，
            数量不超过真实 train 图像数（1:1），训练参数切换为翻倍配置

    Returns:
        {"descriptor", "distribution"}
    """
    root = Path(cfg.paths.dataset_root)
    protected = [cfg.workdir] + ([augment_real] if augment_real else [])
    check_disjoint(root, protected)

    items = collect_items(cfg.workdir)
    if not items:
        raise ValidationError("没有已接受的外扩图像或背景图")

    report_dir = cfg.stage_dir("reports")
    report_dir.mkdir(parents=True, exist_ok=True)

    if augment_real:
        real = collect_real_items(augment_real)
        real_train = sum(1 for item in real if item.split == "train")
        rng = stream(cfg.global_seed, "augment")
        chosen = [items[i] for i in sorted(rng.permutation(len(items))[:real_train])]
        for item in chosen:
            item.split = "train"
        logger.info(f"➕ 增强模式: 真实 train {real_train} 张 + 外扩 {len(chosen)} 张")
        descriptor = write_dataset(real + chosen, None, root, registry, cfg.trainer.augmented(), protected)
        return {"descriptor": descriptor, "distribution": None}

    assignment = stratified_split(items, cfg.split, stream(cfg.global_seed, "split"))
    image_seeds = {item.stem: item.seed_id for item in items}
    assignment.assert_leak_free(image_seeds)
    descriptor = write_dataset(items, assignment, root, registry, cfg.trainer, protected)

    table = distribution_table(assignment, image_seeds, registry)
    table.to_csv(report_dir / "distribution.csv", lineterminator="\n")
    return {"descriptor": descriptor, "distribution": table}
