"""
画布合成模块
"""
from .placement import (
    PlacementSpec,
    CHANNEL_PERMUTATIONS,
    IDENTITY_PERM,
    sample_placement,
    scale_bounds,
)
from .compose import (
    CanvasBundle,
    compose_canvas,
    derive_annotation,
    mask_sigma,
    permute_channels,
    render_mask,
)

__all__ = [
    'PlacementSpec',
    'CHANNEL_PERMUTATIONS',
    'IDENTITY_PERM',
    'sample_placement',
    'scale_bounds',
    'CanvasBundle',
    'compose_canvas',
    'derive_annotation',
    'mask_sigma',
    'permute_channels',
    'render_mask',
]
