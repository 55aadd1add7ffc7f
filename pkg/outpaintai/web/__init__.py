"""
报告模块
静态画廊、运行统计与只读预览服务器
"""

from .stats import RunStats
from .gallery import GalleryBuilder, draw_thumbnail

__all__ = [
    'RunStats',
    'GalleryBuilder',
    'draw_thumbnail',
]
