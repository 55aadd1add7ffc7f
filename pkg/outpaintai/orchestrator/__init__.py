"""
外扩编排模块
"""
from .outpainter import (
    GenerationOutcome,
    Outpainter,
    generate_background,
    generate_until_pass,
    reclamp,
    REASON_EXHAUSTED,
    REASON_BACKEND_DEAD,
)
from .pipeline import (
    OutpaintPipeline,
    background_count,
    check_preserved,
    compose_all,
    load_bundles,
    run_pipeline,
)

__all__ = [
    'GenerationOutcome',
    'Outpainter',
    'generate_background',
    'generate_until_pass',
    'reclamp',
    'REASON_EXHAUSTED',
    'REASON_BACKEND_DEAD',
    'OutpaintPipeline',
    'background_count',
    'check_preserved',
    'compose_all',
    'load_bundles',
    'run_pipeline',
]
