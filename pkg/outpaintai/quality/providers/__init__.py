"""
质量评分器
"""
from .base import BaseIqaProvider, LOWER_BETTER, HIGHER_BETTER
from .fixture_provider import FixtureIqaProvider

__all__ = ['BaseIqaProvider', 'LOWER_BETTER', 'HIGHER_BETTER', 'FixtureIqaProvider']
