"""
平均精度（全点插值）
"""
from typing import Optional, Sequence

import numpy as np


def pr_curve(tp_flags: Sequence[bool], confidences: Sequence[float], total_gt: int):
    """
    按置信度降序累积得到 (precision, recall)

    Returns:
        (precision, recall) 两个 numpy 数组
    """
    order = np.argsort(-np.asarray(confidences, dtype=np.float64), kind="stable")
    tp = np.asarray(tp_flags, dtype=np.float64)[order]
    ctp = np.cumsum(tp)
    cfp = np.cumsum(1.0 - tp)
    recall = ctp / max(total_gt, 1)
    precision = ctp / np.maximum(ctp + cfp, 1e-12)
    return precision, recall


def average_precision(tp_flags: Sequence[bool], confidences: Sequence[float], total_gt: int) -> Optional[float]:
    """
    精度包络线下的面积

    Args:
        tp_flags: 每个预测是否 TP
        confidences: 对应置信度
        total_gt: 真值总数

    Returns:
        [0, 1] 的 AP；没有真值也没有预测时返回 None（不参与平均）

    Examples:
        (TP, FP, TP)，置信度递减，total_gt=2 → 0.5·1 + 0.5·2/3 = 0.8333
    """
    if total_gt < 0:
        raise ValueError(f"total_gt 不能为负: {total_gt}")
    if total_gt == 0:
        return 0.0 if len(tp_flags) else None
    if not len(tp_flags):
        return 0.0

    precision, recall = pr_curve(tp_flags, confidences, total_gt)
    mrec = np.concatenate(([0.0], recall, [1.0]))
    mpre = np.concatenate(([0.0], precision, [0.0]))
    # 包络：每个召回率处取其右侧的最大精度
    mpre = np.maximum.accumulate(mpre[::-1])[::-1]

    steps = np.where(mrec[1:] != mrec[:-1])[0]
    return float(np.sum((mrec[steps + 1] - mrec[steps]) * mpre[steps + 1]))
