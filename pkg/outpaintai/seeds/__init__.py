"""
种子提取模块
"""
from .consensus import (
    ConsensusConfig,
    largest_box,
    consensus_vote,
    rank_by_totals,
    rank_detectors,
    tally_calibration,
)
from .detectors import BaseDetector, Detection, DetectorFactory, FixtureDetector
from .extractor import (
    SeedRecord,
    SeedRejection,
    SeedExtractor,
    SourceItem,
    crop_raster,
    extract_seed,
    load_seeds,
    read_sources,
)

__all__ = [
    'ConsensusConfig',
    'largest_box',
    'consensus_vote',
    'rank_by_totals',
    'rank_detectors',
    'tally_calibration',
    'BaseDetector',
    'Detection',
    'DetectorFactory',
    'FixtureDetector',
    'SeedRecord',
    'SeedRejection',
    'SeedExtractor',
    'SourceItem',
    'crop_raster',
    'extract_seed',
    'load_seeds',
    'read_sources',
]
