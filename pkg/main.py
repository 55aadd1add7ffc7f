#!/usr/bin/env python
# -*- coding: utf-8 -*-
"""
Outpaint AI - 自标注合成车辆检测数据集

子命令对应流水线各阶段，每个阶段读写自己的清单，可以单独重跑：

    python main.py extract-seeds [--keep-uncropped]
    python main.py compose
    python main.py outpaint [--resume]
    python main.py gen-backgrounds [--resume]
    python main.py run                       # compose + outpaint + gen-backgrounds
    python main.py assemble [--augment-real DIR]
    python main.py evaluate --preds DIR
    python main.py report [--serve]

退出码：0 成功，2 用法错误，3 读写错误，4 配置错误，5 后端错误，6 校验错误
"""
import argparse
import asyncio
import sys
from pathlib import Path
from typing import List, Optional

from outpaintai import config, __version__
from outpaintai.exceptions import ConfigError, OutpaintError
from outpaintai.logger import get_logger
from outpaintai.pipeline_config import PipelineConfig
from outpaintai.utils import format_dict, format_ratio

# 初始化日志
logger = get_logger("main")


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON 配置文件（缺省时全部使用 .env / 环境变量）")
    common.add_argument("--backend", help="生成后端: mock, diffusers, remote, openai")
    common.add_argument("--seed", type=int, help="全局随机种子")
    common.add_argument("--workers", type=int, help="并发数")
    common.add_argument("--max-attempts", type=int, help="每张图最多尝试次数")
    common.add_argument("--resume", action="store_true", help="跳过清单中已完成的条目")
    common.add_argument("--invert-mask", action="store_true", help="磁盘上的掩码使用 0 = 生成")

    parser = argparse.ArgumentParser(
        prog="outpaintai",
        description="自标注合成车辆检测数据集流水线",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("extract-seeds", parents=[common], help="检测 + 共识投票 + 带缓冲裁剪")
    p.add_argument("--keep-uncropped", action="store_true", help="保留未裁剪原图及标签（消融基线）")

    sub.add_parser("compose", parents=[common], help="合成画布、掩码与标注")
    sub.add_parser("outpaint", parents=[common], help="外扩 + 质量门限 + 重试")

    p = sub.add_parser("gen-backgrounds", parents=[common], help="生成无车背景图")
    p.add_argument("--count", type=int, help="背景图数量（缺省时按 background_fraction 推出）")

    sub.add_parser("run", parents=[common], help="compose + outpaint + gen-backgrounds + 运行报告")

    p = sub.add_parser("assemble", parents=[common], help="按种子分层划分并输出数据集")
    p.add_argument("--augment-real", help="真实数据集目录，外扩图只加入其 train")

    p = sub.add_parser("evaluate", parents=[common], help="计算 mAP / P / R / F1 / 混淆矩阵")
    p.add_argument("--preds", required=True, help="预测目录（标签格式 + 置信度）")
    p.add_argument("--labels", help="真值标签目录（缺省为数据集 labels/test）")
    p.add_argument("--conf", type=float, default=0.25, help="混淆矩阵置信度阈值")
    p.add_argument("--iou", type=float, default=0.50, help="混淆矩阵 IoU 阈值")

    p = sub.add_parser("report", parents=[common], help="生成静态画廊")
    p.add_argument("--limit", type=int, help="最多展示多少张车辆图")
    p.add_argument("--serve", action="store_true", help="生成后启动只读预览服务器")
    p.add_argument("--port", type=int, default=config.WEB_PORT)

    return parser


def load_config(args: argparse.Namespace, check_paths: bool = True) -> PipelineConfig:
    """加载配置文件并套用命令行覆盖项"""
    cfg = PipelineConfig.load(args.config, check_paths=False)
    if args.backend:
        cfg.backend.name = args.backend
    if args.seed is not None:
        cfg.global_seed = args.seed
    if args.workers is not None:
        cfg.workers = args.workers
    if args.max_attempts is not None:
        cfg.attempts.max_attempts = args.max_attempts
    if args.invert_mask:
        cfg.mask_invert = True
    return cfg.ensure_valid(check_paths=check_paths)


def cmd_extract_seeds(cfg: PipelineConfig, args) -> None:
    from outpaintai.seeds import SeedExtractor

    if not Path(cfg.paths.sources_manifest).exists():
        raise ConfigError(f"源图清单不存在: {cfg.paths.sources_manifest}")
    stats = SeedExtractor(cfg).run(keep_uncropped=args.keep_uncropped)
    logger.info(f"📊 种子统计:\n{format_dict(stats, indent=1)}")


def cmd_compose(cfg: PipelineConfig, args) -> None:
    from outpaintai.orchestrator import compose_all

    compose_all(cfg)


async def _outpaint(cfg: PipelineConfig, args) -> None:
    from outpaintai.orchestrator import OutpaintPipeline

    pipeline = OutpaintPipeline(cfg)
    if args.command == "run":
        report = await pipeline.run(resume=args.resume)
        counts = report["outpaint"]
        logger.info(f"📊 接受率: {format_ratio(counts['accepted'], counts['total'])}")
        return

    try:
        if args.command == "outpaint":
            stats = await pipeline.outpaint_all(resume=args.resume)
        else:
            stats = await pipeline.generate_backgrounds(resume=args.resume, count=args.count)
        pipeline.write_run_report()
    finally:
        await pipeline.close()

    logger.info(f"📊 接受率: {format_ratio(stats['accepted'], stats['accepted'] + stats['rejected'])}")


def cmd_assemble(cfg: PipelineConfig, args) -> None:
    from outpaintai.dataset import assemble_dataset

    result = assemble_dataset(cfg, augment_real=args.augment_real)
    if result["distribution"] is not None:
        logger.info(f"📊 类别分布 (%):\n{result['distribution'].to_string()}")


def cmd_evaluate(cfg: PipelineConfig, args) -> None:
    from outpaintai.metrics import evaluate_dirs

    labels = args.labels or str(Path(cfg.paths.dataset_root) / "labels" / "test")
    report = evaluate_dirs(
        labels,
        args.preds,
        cfg.stage_dir("reports"),
        confidence_threshold=args.conf,
        iou_threshold=args.iou,
    )
    logger.info(f"📊 评估结果:\n{format_dict(report.to_dict(), indent=1)}")


def cmd_report(cfg: PipelineConfig, args) -> None:
    from outpaintai.web import GalleryBuilder

    index = GalleryBuilder(cfg.workdir).build(limit=args.limit)
    if args.serve:
        from outpaintai.web.server import GalleryServer

        GalleryServer(port=args.port, workdir=str(cfg.workdir)).run()
    else:
        logger.info(f"   打开 {index.resolve()} 查看")


COMMANDS = {
    "extract-seeds": cmd_extract_seeds,
    "compose": cmd_compose,
    "assemble": cmd_assemble,
    "evaluate": cmd_evaluate,
    "report": cmd_report,
}


def main(argv: Optional[List[str]] = None) -> int:
    """
    主程序

    Returns:
        退出码
    """
    args = build_parser().parse_args(argv)

    try:
        cfg = load_config(args)
        logger.info("=" * 60)
        logger.info(f"🚗 Outpaint AI · {args.command}")
        logger.info(f"   后端: {cfg.backend.name} | 种子: {cfg.global_seed} | 并发: {cfg.workers}")
        logger.info("=" * 60)

        if args.command in COMMANDS:
            COMMANDS[args.command](cfg, args)
        else:
            asyncio.run(_outpaint(cfg, args))
        return 0

    except KeyboardInterrupt:
        logger.info("⏹️  中断")
        return 130
    except OutpaintError as e:
        logger.error(f"❌ [{e.category}] {e}")
        return e.exit_code
    except Exception as e:
        logger.error(f"❌ 错误: {e}", exc_info=True)
        return 1


if __name__ == "__main__":
    if sys.platform == "win32":
        asyncio.set_event_loop_policy(asyncio.WindowsSelectorEventLoopPolicy())

    sys.exit(main())
