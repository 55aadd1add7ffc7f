"""
数据集组装模块
"""
from .splitter import (
    SPLITS,
    SplitAssignment,
    distribution_table,
    largest_remainder,
    stratified_split,
)
from .writer import DatasetItem, assemble_dataset, collect_items, collect_real_items, write_dataset

__all__ = [
    'SPLITS',
    'SplitAssignment',
    'distribution_table',
    'largest_remainder',
    'stratified_split',
    'DatasetItem',
    'assemble_dataset',
    'collect_items',
    'collect_real_items',
    'write_dataset',
]
