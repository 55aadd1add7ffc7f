"""
生成-评分-重试循环

每次尝试都重新抽提示词和噪声种子（来自以 item_key 和尝试序号命名的随机流），
调用后端后把保留区逐像素写回，再交给质量门限；
所有后端调用都写入尝试日志（JSONL + 人类可读轨迹）
"""
import math
from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np

from ..backends import BaseGenerativeBackend
from ..canvas import CanvasBundle
from ..exceptions import BackendError
from ..logger import AttemptLogger, get_logger
from ..pipeline_config import AttemptPolicy
from ..prompts import PromptConfig, PromptSpec, build_background_prompt, build_prompt
from ..quality import QualityGate, QualityReport
from ..utils import JsonlAppender, noise_seed, resize_bilinear, stream

logger = get_logger("orchestrator.outpainter")

REASON_EXHAUSTED = "exhausted"
REASON_BACKEND_DEAD = "backend-dead"

VERDICT_PASS = "pass"
VERDICT_FAIL = "fail"
VERDICT_ERROR = "error"


@dataclass
class GenerationOutcome:
    """单个条目的生成结果"""

    item_key: str
    accepted: bool
    attempts: int
    image: Optional[np.ndarray] = None
    report: Optional[QualityReport] = None
    prompt: Optional[PromptSpec] = None
    noise_seed: Optional[int] = None
    reason: Optional[str] = None
    kept_best: bool = False
    # 接受的是第几次尝试
    accepted_attempt: Optional[int] = None


def reclamp(image: np.ndarray, canvas: np.ndarray, mask: np.ndarray) -> np.ndarray:
    """
    把保留区（mask == 0）写回画布像素

    Raises:
        BackendError: 输出不是三通道图像
    """
    if image.ndim != 3 or image.shape[2] != 3:
        raise BackendError(f"后端返回的图像形状非法: {image.shape}")
    height, width = canvas.shape[:2]
    if image.shape[:2] != (height, width):
        logger.warning(f"⚠️  后端输出尺寸 {image.shape[1]}x{image.shape[0]} 与画布不符，已缩放")
        image = resize_bilinear(image, width, height)
    out = np.array(image, dtype=np.uint8, copy=True)
    keep = mask == 0
    out[keep] = canvas[keep]
    return out


def _best_key(report: QualityReport) -> Tuple[float, float]:
    """keep-best 排序键：CLIP-IQA 越高越好，缺失时看 TV 越低越好"""
    clip = report.clip_iqa if report.clip_iqa is not None else -math.inf
    tv = report.tv if report.tv is not None else math.inf
    return clip, -tv


class Outpainter:
    """单条目的生成循环"""

    def __init__(
        self,
        backend: BaseGenerativeBackend,
        gate: QualityGate,
        policy: AttemptPolicy,
        prompt_cfg: PromptConfig,
        global_seed: int = 0,
        negative_extras: bool = False,
        attempt_log: Optional[JsonlAppender] = None,
        attempt_logger: Optional[AttemptLogger] = None,
    ):
        """
        Args:
            backend: 生成后端
            gate: 质量门限
            policy: 重试策略
            prompt_cfg: 提示词配置
            global_seed: 全局随机种子
            negative_extras: 负向提示词是否追加广告类词
            attempt_log: 机器可读的尝试日志（JSONL）
            attempt_logger: 人类可读的尝试轨迹
        """
        self.backend = backend
        self.gate = gate
        self.policy = policy
        self.prompt_cfg = prompt_cfg
        self.global_seed = global_seed
        self.negative_extras = negative_extras
        self.attempt_log = attempt_log
        self.attempt_logger = attempt_logger

    async def _record(
        self,
        item_key: str,
        attempt: int,
        prompt: PromptSpec,
        seed: int,
        report: Optional[QualityReport],
        verdict: str,
        error: Optional[str] = None,
    ):
        row = {
            "item_key": item_key,
            "attempt": attempt,
            "noise_seed": seed,
            "positive": prompt.positive,
            "negative": prompt.negative,
            "report": report.to_dict() if report else None,
            "verdict": verdict,
            "error": error,
        }
        if self.attempt_log is not None:
            await self.attempt_log.append(row)
        if self.attempt_logger is not None:
            if error:
                self.attempt_logger.log_error(item_key, f"#{attempt}: {error}")
            self.attempt_logger.log_attempt(item_key, attempt, row["report"], verdict)

    async def _loop(self, item_key: str, make_prompt, call) -> GenerationOutcome:
        """
        通用重试循环

        Args:
            item_key: 条目键（同时作为随机流名称）
            make_prompt: attempt -> PromptSpec
            call: (prompt, noise_seed) -> awaitable 图像（已回写保留区）
        """
        best: Optional[GenerationOutcome] = None
        errors = 0

        for attempt in range(1, self.policy.max_attempts + 1):
            prompt = make_prompt(attempt)
            seed = noise_seed(self.global_seed, item_key, attempt)

            try:
                image = await call(prompt, seed)
            except Exception as e:
                errors += 1
                logger.warning(f"⚠️  {item_key} 第 {attempt} 次调用失败: {e}")
                await self._record(item_key, attempt, prompt, seed, None, VERDICT_ERROR, f"{type(e).__name__}: {e}")
                continue

            report = self.gate.assess(image)
            verdict = VERDICT_PASS if report.pass_all else VERDICT_FAIL
            await self._record(item_key, attempt, prompt, seed, report, verdict)

            candidate = GenerationOutcome(
                item_key=item_key,
                accepted=True,
                attempts=attempt,
                image=image,
                report=report,
                prompt=prompt,
                noise_seed=seed,
                accepted_attempt=attempt,
            )
            if report.pass_all:
                logger.debug(f"{item_key} 第 {attempt} 次尝试通过")
                self._outcome(candidate)
                return candidate

            if best is None or _best_key(report) > _best_key(best.report):
                best = candidate

        attempts = self.policy.max_attempts
        if errors == attempts:
            outcome = GenerationOutcome(item_key, False, attempts, reason=REASON_BACKEND_DEAD)
        elif self.policy.on_exhaustion == "keep-best" and best is not None:
            best.attempts = attempts
            best.kept_best = True
            outcome = best
        else:
            outcome = GenerationOutcome(item_key, False, attempts, reason=REASON_EXHAUSTED)
        self._outcome(outcome)
        return outcome

    def _outcome(self, outcome: GenerationOutcome):
        if self.attempt_logger is not None:
            self.attempt_logger.log_outcome(outcome.item_key, outcome.accepted, outcome.attempts, outcome.reason or "")

    async def generate_until_pass(self, bundle: CanvasBundle) -> GenerationOutcome:
        """
        外扩一张画布直到通过质量门限

        Args:
            bundle: 合成结果（掩码 255 = 生成）

        Returns:
            GenerationOutcome；拒绝原因为 exhausted 或 backend-dead
        """
        key = bundle.item_key
        class_id = bundle.annotation.class_id

        def make_prompt(attempt: int) -> PromptSpec:
            rng = stream(self.global_seed, "prompt", key, attempt)
            return build_prompt(class_id, rng, self.prompt_cfg, self.negative_extras)

        async def call(prompt: PromptSpec, seed: int) -> np.ndarray:
            raw = await self.backend.outpaint(
                bundle.canvas, bundle.mask, prompt.positive, prompt.negative, seed, request_key=key
            )
            return reclamp(np.asarray(raw), bundle.canvas, bundle.mask)

        return await self._loop(key, make_prompt, call)

    async def generate_background(self, item_key: str, size: Tuple[int, int]) -> GenerationOutcome:
        """
        文生图生成无车背景（同一门限和重试策略）

        Args:
            item_key: 背景条目键，如 "bg_0000"
            size: (width, height)
        """

        def make_prompt(attempt: int) -> PromptSpec:
            rng = stream(self.global_seed, "background", item_key, attempt)
            return build_background_prompt(rng, self.prompt_cfg, self.negative_extras)

        async def call(prompt: PromptSpec, seed: int) -> np.ndarray:
            raw = np.asarray(
                await self.backend.text_to_image(prompt.positive, prompt.negative, seed, size, request_key=item_key)
            )
            if raw.ndim != 3 or raw.shape[2] != 3:
                raise BackendError(f"后端返回的图像形状非法: {raw.shape}")
            if raw.shape[:2] != (size[1], size[0]):
                raw = resize_bilinear(raw, size[0], size[1])
            return raw

        return await self._loop(item_key, make_prompt, call)


async def generate_until_pass(
    bundle: CanvasBundle,
    backend: BaseGenerativeBackend,
    gate: QualityGate,
    policy: AttemptPolicy,
    prompt_cfg: PromptConfig,
    global_seed: int = 0,
    **kwargs
) -> GenerationOutcome:
    """函数式入口，参数同 Outpainter"""
    outpainter = Outpainter(backend, gate, policy, prompt_cfg, global_seed, **kwargs)
    return await outpainter.generate_until_pass(bundle)


async def generate_background(
    item_key: str,
    backend: BaseGenerativeBackend,
    gate: QualityGate,
    policy: AttemptPolicy,
    prompt_cfg: PromptConfig,
    global_seed: int = 0,
    size: Tuple[int, int] = (512, 512),
    **kwargs
) -> GenerationOutcome:
    outpainter = Outpainter(backend, gate, policy, prompt_cfg, global_seed, **kwargs)
    return await outpainter.generate_background(item_key, size)
