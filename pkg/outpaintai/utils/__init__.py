"""
工具模块
"""
from .formatters import format_score, format_ratio, format_dict
from .rng import derive_seed, stream, noise_seed
from .image_io import (
    load_image,
    load_mask,
    to_pil,
    from_pil,
    save_png,
    encode_png,
    decode_image,
    resize_bilinear,
    image_digest,
)
from .jsonl import JsonlAppender, read_jsonl, write_jsonl, dumps_row

__all__ = [
    "format_score",
    "format_ratio",
    "format_dict",
    "derive_seed",
    "stream",
    "noise_seed",
    "load_image",
    "load_mask",
    "to_pil",
    "from_pil",
    "save_png",
    "encode_png",
    "decode_image",
    "resize_bilinear",
    "image_digest",
    "JsonlAppender",
    "read_jsonl",
    "write_jsonl",
    "dumps_row",
]
