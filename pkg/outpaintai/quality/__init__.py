"""
质量门限模块
"""
from .tv import tv_loss, area_downscale
from .gate import QualityGate, QualityReport, assess, PASSED, FAILED, SKIPPED
from .factory import IqaProviderFactory
from .providers import BaseIqaProvider, FixtureIqaProvider, LOWER_BETTER, HIGHER_BETTER
from ..pipeline_config import QualityThresholds

__all__ = [
    'tv_loss',
    'area_downscale',
    'QualityGate',
    'QualityReport',
    'QualityThresholds',
    'assess',
    'PASSED',
    'FAILED',
    'SKIPPED',
    'IqaProviderFactory',
    'BaseIqaProvider',
    'FixtureIqaProvider',
    'LOWER_BETTER',
    'HIGHER_BETTER',
]
