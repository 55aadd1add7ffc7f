"""
外扩流水线

compose → outpaint → gen-backgrounds 三个阶段，每个阶段读上一阶段的清单、写自己的清单，
可以单独重跑；outpaint 阶段以 (seed_id, image_index) 为续跑键
"""
import asyncio
import json
from pathlib import Path
from typing import Dict, List, Optional, Set

import numpy as np

from .outpainter import REASON_BACKEND_DEAD, GenerationOutcome, Outpainter
from ..backends import BackendFactory, BaseGenerativeBackend
from ..canvas import CanvasBundle, compose_canvas, sample_placement
from ..canvas.placement import PlacementSpec, round_half_up
from ..exceptions import BackendError, PlacementError, ValidationError
from ..geometry import NormAnnotation, serialize_labels
from ..logger import AttemptLogger, get_logger
from ..prompts import PromptManager
from ..quality import IqaProviderFactory, QualityGate
from ..seeds import load_seeds
from ..utils import JsonlAppender, load_image, load_mask, read_jsonl, save_png, stream, write_jsonl

logger = get_logger("orchestrator.pipeline")

BACKGROUND_PREFIX = "bg_"


def _item_sort(row: dict):
    return row["seed_id"], row["image_index"]


def _attempt_sort(row: dict):
    return row["item_key"], row["attempt"]


def background_count(vehicle_images: int, fraction: float) -> int:
    """
    背景图数量：使背景占全部图像的 fraction

    Examples:
        90 张车辆图、fraction 0.1 → 10
    """
    if fraction <= 0 or vehicle_images <= 0:
        return 0
    return round_half_up(vehicle_images * fraction / (1 - fraction))


def ensure_backend_alive(results: list, stage: str):
    """
    本轮所有条目都因后端故障失败时中止（清单已落盘，可 --resume 续跑）

    Raises:
        BackendError: 后端不可用
    """
    if results and all(
        isinstance(r, GenerationOutcome) and r.reason == REASON_BACKEND_DEAD for r in results
    ):
        raise BackendError(f"{stage}: 全部 {len(results)} 个条目的每次尝试都失败，后端不可用")


def check_preserved(image: np.ndarray, bundle: CanvasBundle):
    """
    校验目标框内像素与画布逐位一致

    Raises:
        ValidationError: 保留区被改动
    """
    inner = bundle.placement.inner_rect()
    x0, y0 = int(np.floor(inner.x_min)), int(np.floor(inner.y_min))
    x1, y1 = int(np.ceil(inner.x_max)), int(np.ceil(inner.y_max))
    if not np.array_equal(image[y0:y1, x0:x1], bundle.canvas[y0:y1, x0:x1]):
        raise ValidationError(f"{bundle.item_key}: 目标框内像素被后端改动")


def compose_all(cfg) -> Dict[str, int]:
    """
    为每个种子合成 images_per_seed 张画布，写出 compose/ 清单

    不需要生成后端，可以在 outpaint 之前单独运行

    Args:
        cfg: PipelineConfig

    Returns:
        统计 {"composed", "unplaceable"}
    """
    compose_dir = cfg.stage_dir("compose")
    seeds = load_seeds(cfg.workdir)
    if not seeds:
        raise ValidationError("种子清单中没有已接受的种子")
    logger.info(f"📥 载入种子: {len(seeds)} 个，每个合成 {cfg.images_per_seed} 张")

    rows, stats = [], {"composed": 0, "unplaceable": 0}
    for seed in seeds:
        for index in range(cfg.images_per_seed):
            rng = stream(cfg.global_seed, "placement", seed.seed_id, index)
            try:
                placement = sample_placement(seed, cfg.canvas_size, rng, cfg.min_dim)
            except PlacementError as e:
                logger.info(f"⏭️  {seed.seed_id}: 无法放置 ({e})")
                rows.append({
                    "seed_id": seed.seed_id,
                    "image_index": index,
                    "item_key": f"{seed.seed_id}_{index:02d}",
                    "class_id": seed.class_id,
                    "status": "rejected",
                    "reason": e.reason,
                })
                stats["unplaceable"] += 1
                continue

            bundle = compose_canvas(
                seed,
                placement,
                fill_value=cfg.fill_value,
                blur_sigma_fraction=cfg.blur_sigma_fraction,
                image_index=index,
            )
            canvas_rel = f"canvases/{bundle.item_key}.png"
            mask_rel = f"masks/{bundle.item_key}.png"
            save_png(bundle.canvas, compose_dir / canvas_rel)
            disk_mask = 255 - bundle.mask if cfg.mask_invert else bundle.mask
            save_png(disk_mask, compose_dir / mask_rel)

            row = bundle.to_row(canvas_rel, mask_rel)
            row.update({"status": "accepted", "reason": None, "mask_inverted": cfg.mask_invert})
            rows.append(row)
            stats["composed"] += 1

    write_jsonl(compose_dir / "manifest.jsonl", rows, sort_key=_item_sort)
    logger.info(f"✅ 合成完成: {stats['composed']} 张，无法放置 {stats['unplaceable']}")
    return stats


def load_bundles(compose_dir: Path) -> List[CanvasBundle]:
    """从合成清单恢复 CanvasBundle（掩码统一还原为 255 = 生成）"""
    compose_dir = Path(compose_dir)
    bundles = []
    for row in read_jsonl(compose_dir / "manifest.jsonl"):
        if row.get("status") != "accepted":
            continue
        mask = load_mask(compose_dir / row["mask"])
        if row.get("mask_inverted"):
            mask = 255 - mask
        cx, cy, w, h = row["annotation"]
        bundles.append(CanvasBundle(
            canvas=load_image(compose_dir / row["canvas"]),
            mask=mask,
            annotation=NormAnnotation(int(row["class_id"]), cx, cy, w, h),
            placement=PlacementSpec.from_dict(row["placement"]),
            seed_id=row["seed_id"],
            image_index=int(row["image_index"]),
        ))
    return bundles


class OutpaintPipeline:
    """外扩流水线"""

    def __init__(
        self,
        cfg,
        backend: Optional[BaseGenerativeBackend] = None,
        gate: Optional[QualityGate] = None,
    ):
        """
        Args:
            cfg: PipelineConfig
            backend: 生成后端（为空时按配置创建）
            gate: 质量门限（为空时按配置创建评分器）
        """
        self.cfg = cfg
        self.backend = backend or BackendFactory.create_from_config(cfg.backend)
        self.gate = gate or QualityGate(
            IqaProviderFactory.create_from_config(cfg.iqa, backend=self.backend),
            cfg.thresholds,
            cfg.iqa.require_all,
        )
        self.prompt_cfg = PromptManager(cfg.prompt_config or None).get_config()

        self.compose_dir = cfg.stage_dir("compose")
        self.outpaint_dir = cfg.stage_dir("outpaint")
        self.background_dir = cfg.stage_dir("backgrounds")
        self.report_dir = cfg.stage_dir("reports")

    # ==================== compose ====================

    def compose_all(self) -> Dict[str, int]:
        return compose_all(self.cfg)

    def load_bundles(self) -> List[CanvasBundle]:
        return load_bundles(self.compose_dir)

    # ==================== outpaint ====================

    def _resume_state(self, stage_dir: Path, resume: bool, key_field: str = "item_key") -> Set[str]:
        """
        准备续跑：返回已完成的条目键，并清理未完成条目的尝试记录

        不续跑时清空本阶段的清单与尝试日志
        """
        manifest = stage_dir / "manifest.jsonl"
        attempts = stage_dir / "attempts.jsonl"
        if not resume:
            for path in (manifest, attempts):
                if path.exists():
                    path.unlink()
            return set()

        # 因异常中断的条目重新生成
        finished = [r for r in read_jsonl(manifest, required=False) if r.get("reason") != "error"]
        done = {row[key_field] for row in finished}
        write_jsonl(manifest, finished, sort_key=lambda r: r[key_field])
        kept = [row for row in read_jsonl(attempts, required=False) if row["item_key"] in done]
        write_jsonl(attempts, kept, sort_key=_attempt_sort)
        if done:
            logger.info(f"🔁 续跑: 跳过已完成的 {len(done)} 个条目")
        return done

    def _outpainter(self, attempt_log: JsonlAppender, trail: str) -> Outpainter:
        return Outpainter(
            self.backend,
            self.gate,
            self.cfg.attempts,
            self.prompt_cfg,
            global_seed=self.cfg.global_seed,
            negative_extras=self.cfg.negative_extras,
            attempt_log=attempt_log,
            attempt_logger=AttemptLogger(str(trail)),
        )

    async def outpaint_all(self, resume: bool = False) -> Dict[str, int]:
        """
        外扩所有画布（有界并发）

        Args:
            resume: 跳过清单中已有结果的条目

        Returns:
            统计 {"accepted", "rejected", ...按原因}
        """
        bundles = self.load_bundles()
        done = self._resume_state(self.outpaint_dir, resume)
        pending = [b for b in bundles if b.item_key not in done]
        logger.info(f"🎨 开始外扩: {len(pending)} 张（并发 {self.cfg.workers}）")

        manifest = JsonlAppender(self.outpaint_dir / "manifest.jsonl")
        attempt_log = JsonlAppender(self.outpaint_dir / "attempts.jsonl")
        outpainter = self._outpainter(attempt_log, self.outpaint_dir / "attempts.log")
        semaphore = asyncio.Semaphore(self.cfg.workers)

        async def work(bundle: CanvasBundle):
            async with semaphore:
                outcome = await outpainter.generate_until_pass(bundle)
                await manifest.append(self._persist_vehicle(bundle, outcome))
                return outcome

        results = await asyncio.gather(*(work(b) for b in pending), return_exceptions=True)

        for bundle, result in zip(pending, results):
            if isinstance(result, Exception):
                logger.error(f"❌ {bundle.item_key} 处理失败: {result}")
                await manifest.append(self._rejection_row(bundle, "error", str(result)))

        manifest.finalize(_item_sort)
        attempt_log.finalize(_attempt_sort)

        ensure_backend_alive(results, "outpaint")
        stats = self._tally(manifest.rows())
        logger.info(f"✅ 外扩完成: 接受 {stats['accepted']} / 拒绝 {stats['rejected']}")
        return stats

    def _rejection_row(self, bundle: CanvasBundle, reason: str, detail: str = "") -> dict:
        return {
            "item_key": bundle.item_key,
            "seed_id": bundle.seed_id,
            "image_index": bundle.image_index,
            "class_id": bundle.annotation.class_id,
            "status": "rejected",
            "reason": reason,
            "detail": detail,
        }

    def _persist_vehicle(self, bundle: CanvasBundle, outcome: GenerationOutcome) -> dict:
        """保存通过的图像与单行标签，返回清单行"""
        row = {
            "item_key": bundle.item_key,
            "seed_id": bundle.seed_id,
            "image_index": bundle.image_index,
            "class_id": bundle.annotation.class_id,
            "attempts": outcome.attempts,
        }
        if not outcome.accepted:
            row.update({"status": "rejected", "reason": outcome.reason})
            return row

        check_preserved(outcome.image, bundle)
        image_rel = f"images/{bundle.item_key}.png"
        label_rel = f"labels/{bundle.item_key}.txt"
        save_png(outcome.image, self.outpaint_dir / image_rel)
        label_path = self.outpaint_dir / label_rel
        label_path.parent.mkdir(parents=True, exist_ok=True)
        label_path.write_text(serialize_labels([bundle.annotation]), encoding="utf-8")

        row.update({
            "status": "accepted",
            "reason": None,
            "accepted_attempt": outcome.accepted_attempt,
            "kept_best": outcome.kept_best,
            "noise_seed": outcome.noise_seed,
            "prompt": outcome.prompt.to_dict(),
            "report": outcome.report.to_dict(),
            "image": image_rel,
            "label": label_rel,
        })
        return row

    # ==================== backgrounds ====================

    async def generate_backgrounds(self, resume: bool = False, count: Optional[int] = None) -> Dict[str, int]:
        """
        生成无车背景图（空标签文件）

        Args:
            resume: 跳过已完成的背景
            count: 指定数量；为空时由已接受的车辆图数量和 background_fraction 推出
        """
        if count is None:
            vehicle_rows = read_jsonl(self.outpaint_dir / "manifest.jsonl", required=False)
            accepted = sum(1 for r in vehicle_rows if r.get("status") == "accepted")
            count = background_count(accepted, self.cfg.background_fraction)
        logger.info(f"🌆 背景图: 需要 {count} 张")

        done = self._resume_state(self.background_dir, resume)
        keys = [f"{BACKGROUND_PREFIX}{i:04d}" for i in range(count)]
        pending = [k for k in keys if k not in done]

        manifest = JsonlAppender(self.background_dir / "manifest.jsonl")
        attempt_log = JsonlAppender(self.background_dir / "attempts.jsonl")
        outpainter = self._outpainter(attempt_log, self.background_dir / "attempts.log")
        semaphore = asyncio.Semaphore(self.cfg.workers)
        size = (self.cfg.canvas_size, self.cfg.canvas_size)

        async def work(key: str):
            async with semaphore:
                outcome = await outpainter.generate_background(key, size)
                await manifest.append(self._persist_background(key, outcome))
                return outcome

        results = await asyncio.gather(*(work(k) for k in pending), return_exceptions=True)
        for key, result in zip(pending, results):
            if isinstance(result, Exception):
                logger.error(f"❌ {key} 处理失败: {result}")
                await manifest.append({"item_key": key, "status": "rejected", "reason": "error", "detail": str(result)})

        manifest.finalize(lambda r: r["item_key"])
        attempt_log.finalize(_attempt_sort)

        ensure_backend_alive(results, "gen-backgrounds")
        stats = self._tally(manifest.rows())
        logger.info(f"✅ 背景图完成: 接受 {stats['accepted']} / 拒绝 {stats['rejected']}")
        return stats

    def _persist_background(self, key: str, outcome: GenerationOutcome) -> dict:
        row = {"item_key": key, "attempts": outcome.attempts}
        if not outcome.accepted:
            row.update({"status": "rejected", "reason": outcome.reason})
            return row

        image_rel = f"images/{key}.png"
        label_rel = f"labels/{key}.txt"
        save_png(outcome.image, self.background_dir / image_rel)
        label_path = self.background_dir / label_rel
        label_path.parent.mkdir(parents=True, exist_ok=True)
        label_path.write_text("", encoding="utf-8")

        row.update({
            "status": "accepted",
            "reason": None,
            "accepted_attempt": outcome.accepted_attempt,
            "kept_best": outcome.kept_best,
            "noise_seed": outcome.noise_seed,
            "prompt": outcome.prompt.to_dict(),
            "report": outcome.report.to_dict(),
            "image": image_rel,
            "label": label_rel,
        })
        return row

    # ==================== run ====================

    @staticmethod
    def _tally(rows: List[dict]) -> Dict[str, int]:
        stats = {"accepted": 0, "rejected": 0}
        for row in rows:
            if row.get("status") == "accepted":
                stats["accepted"] += 1
            else:
                stats["rejected"] += 1
                reason = row.get("reason") or "unknown"
                stats[reason] = stats.get(reason, 0) + 1
        return stats

    def write_run_report(self) -> dict:
        """汇总各阶段清单，写出 reports/run_report.json"""
        from ..web.stats import RunStats

        report = RunStats(self.cfg.workdir).summary()
        path = self.report_dir / "run_report.json"
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(json.dumps(report, indent=2, sort_keys=True, ensure_ascii=False) + "\n", encoding="utf-8")
        logger.info(f"📄 运行报告: {path}")
        return report

    async def run(self, resume: bool = False) -> dict:
        """
        端到端：合成 → 外扩 → 背景 → 运行报告

        Returns:
            运行报告
        """
        try:
            if not resume or not (self.compose_dir / "manifest.jsonl").exists():
                self.compose_all()
            await self.outpaint_all(resume=resume)
            await self.generate_backgrounds(resume=resume)
            return self.write_run_report()
        finally:
            await self.close()

    async def close(self):
        await self.backend.close()
        self.gate.close()


def run_pipeline(cfg, backend: Optional[BaseGenerativeBackend] = None, resume: bool = False) -> dict:
    """同步入口"""
    return asyncio.run(OutpaintPipeline(cfg, backend=backend).run(resume=resume))
