"""
检测评估模块
"""
from .matching import DetectionSample, match_detections
from .ap import average_precision, pr_curve
from .evaluator import (
    IOU_THRESHOLDS,
    MapResult,
    MetricsReport,
    compute_map,
    confusion_matrix,
    evaluate,
    evaluate_dirs,
    f1,
    fitness,
    load_samples,
    normalize_columns,
    precision_recall_at_best_f1,
    write_metrics,
)

__all__ = [
    'DetectionSample',
    'match_detections',
    'average_precision',
    'pr_curve',
    'IOU_THRESHOLDS',
    'MapResult',
    'MetricsReport',
    'compute_map',
    'confusion_matrix',
    'evaluate',
    'evaluate_dirs',
    'f1',
    'fitness',
    'load_samples',
    'normalize_columns',
    'precision_recall_at_best_f1',
    'write_metrics',
]
