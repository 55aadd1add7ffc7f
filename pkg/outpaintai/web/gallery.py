"""
静态画廊报告

reports/gallery/index.html + thumbs/*.png：缩略图上画出标注框，
附质量分数、分布表和评估指标；生成后不依赖任何服务即可打开
"""
import json
from pathlib import Path
from typing import List, Optional

import pandas as pd
from jinja2 import Environment, FileSystemLoader, select_autoescape
from PIL import Image, ImageDraw

from .stats import RunStats
from ..geometry import DEFAULT_REGISTRY, ClassRegistry, parse_labels
from ..logger import get_logger
from ..utils import format_score

logger = get_logger("web.gallery")

TEMPLATES_DIR = Path(__file__).parent / "templates"
THUMB_SIZE = 192
BOX_COLOR = (255, 64, 64)


def draw_thumbnail(image_path: Path, label_text: str, out_path: Path, registry: ClassRegistry = DEFAULT_REGISTRY):
    """缩略图 + 标注框"""
    with Image.open(image_path) as img:
        img = img.convert("RGB")
        width, height = img.size
        draw = ImageDraw.Draw(img)
        for annotation in parse_labels(label_text, registry):
            box = annotation.to_pixel_box(width, height)
            draw.rectangle(box.as_tuple(), outline=BOX_COLOR, width=max(2, width // 128))
            draw.text((box.x_min + 3, box.y_min + 3), registry.name_of(annotation.class_id), fill=BOX_COLOR)
        img.thumbnail((THUMB_SIZE, THUMB_SIZE))
        out_path.parent.mkdir(parents=True, exist_ok=True)
        img.save(out_path, format="PNG")


class GalleryBuilder:
    """画廊生成器"""

    def __init__(self, workdir, registry: ClassRegistry = DEFAULT_REGISTRY):
        self.workdir = Path(workdir)
        self.registry = registry
        self.out_dir = self.workdir / "reports" / "gallery"
        self.stats = RunStats(workdir, registry)
        self.env = Environment(
            loader=FileSystemLoader(str(TEMPLATES_DIR)),
            autoescape=select_autoescape(["html"]),
        )

    def _cards(self, stage: str, limit: Optional[int] = None) -> List[dict]:
        cards = []
        stage_dir = self.workdir / stage
        for row in read_rows(self.stats.load(stage)):
            if row.get("status") != "accepted":
                continue
            if limit is not None and len(cards) >= limit:
                break
            key = row["item_key"]
            thumb_rel = f"thumbs/{key}.png"
            label_text = (stage_dir / row["label"]).read_text(encoding="utf-8")
            draw_thumbnail(stage_dir / row["image"], label_text, self.out_dir / thumb_rel, self.registry)
            report = row.get("report") or {}
            class_id = row.get("class_id")
            cards.append({
                "key": key,
                "thumb": thumb_rel,
                "class_name": self.registry.name_of(int(class_id)) if class_id is not None else "BACKGROUND",
                "attempts": row.get("attempts"),
                "kept_best": row.get("kept_best", False),
                "prompt": (row.get("prompt") or {}).get("positive", ""),
                "brisque": format_score(report.get("brisque")),
                "clip_iqa": format_score(report.get("clip_iqa")),
                "tv": format_score(report.get("tv")),
            })
        return cards

    @staticmethod
    def _table_html(path: Path) -> Optional[str]:
        if not path.exists():
            return None
        return pd.read_csv(path, index_col=0).to_html(classes="table", border=0)

    def build(self, limit: Optional[int] = None) -> Path:
        """
        生成 index.html

        Args:
            limit: 最多展示多少张车辆图（None 表示全部）

        Returns:
            index.html 路径
        """
        reports = self.workdir / "reports"
        vehicles = self._cards("outpaint", limit)
        backgrounds = self._cards("backgrounds")

        metrics = None
        if (reports / "metrics.json").exists():
            metrics = json.loads((reports / "metrics.json").read_text(encoding="utf-8"))

        html = self.env.get_template("gallery.html").render(
            summary=self.stats.summary(),
            vehicles=vehicles,
            backgrounds=backgrounds,
            distribution=self._table_html(reports / "distribution.csv"),
            metrics=metrics,
            confusion=self._table_html(reports / "confusion_normalized.csv"),
        )
        index = self.out_dir / "index.html"
        index.parent.mkdir(parents=True, exist_ok=True)
        index.write_text(html, encoding="utf-8")
        logger.info(f"🖼️  画廊已生成: {index} ({len(vehicles)} 张车辆图, {len(backgrounds)} 张背景图)")
        return index


def read_rows(frame: pd.DataFrame) -> List[dict]:
    if frame.empty:
        return []
    return [{k: v for k, v in row.items() if not (isinstance(v, float) and pd.isna(v))}
            for row in frame.to_dict(orient="records")]
