"""
命名随机流

所有随机性都从 (global_seed, 名称键...) 派生，和调度顺序无关：
同一个键在任何 worker、任何执行顺序下都得到同一条随机流
"""
import hashlib

import numpy as np


def derive_seed(global_seed: int, *keys) -> int:
    """
    从全局种子和命名键派生 64 位整数种子

    Args:
        global_seed: 全局随机种子
        *keys: 命名键（如 "placement", seed_id, image_index）

    Returns:
        非负整数种子
    """
    material = "|".join([str(int(global_seed))] + [str(k) for k in keys])
    digest = hashlib.sha256(material.encode("utf-8")).digest()
    return int.from_bytes(digest[:8], "big")


def stream(global_seed: int, *keys) -> np.random.Generator:
    """派生一条独立的 numpy 随机流"""
    return np.random.default_rng(derive_seed(global_seed, *keys))


def noise_seed(global_seed: int, *keys) -> int:
    """给生成后端使用的 32 位噪声种子"""
    return derive_seed(global_seed, "noise", *keys) % (2 ** 32)
