#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
Philox4x32-10 计数器型随机数模块

职责：
- numpy向量化实现 Philox4x32-10 双射（128位计数器，64位密钥）
- 将输出字转换为 (0, 1) 开区间上的53位均匀数
"""

import numpy as np

PHILOX_M4x32_0 = np.uint64(0xD2511F53)
PHILOX_M4x32_1 = np.uint64(0xCD9E8D57)
PHILOX_W32_0 = np.uint64(0x9E3779B9)
PHILOX_W32_1 = np.uint64(0xBB67AE85)
MASK32 = np.uint64(0xFFFFFFFF)
PHILOX_ROUNDS = 10

_SHIFT32 = np.uint64(32)
_TWO_POW_M52 = 2.0 ** -52


def philox4x32(counter: np.ndarray, key: np.ndarray, rounds: int = PHILOX_ROUNDS) -> np.ndarray:
    """
    Philox4x32 分组变换

    Args:
        counter: 形状 (4, ...) 的计数器字
        key: 形状 (2, ...) 的密钥字，可与计数器广播
        rounds: 轮数

    Returns:
        np.ndarray: 形状 (4, ...) 的 uint32 输出字
    """
    counter = np.asarray(counter)
    key = np.asarray(key)
    c0, c1, c2, c3 = (np.asarray(counter[i], dtype=np.uint64) & MASK32 for i in range(4))
    k0 = np.asarray(key[0], dtype=np.uint64) & MASK32
    k1 = np.asarray(key[1], dtype=np.uint64) & MASK32

    for _ in range(rounds):
        p0 = c0 * PHILOX_M4x32_0
        p1 = c2 * PHILOX_M4x32_1
        hi0, lo0 = p0 >> _SHIFT32, p0 & MASK32
        hi1, lo1 = p1 >> _SHIFT32, p1 & MASK32
        c0, c1, c2, c3 = hi1 ^ c1 ^ k0, lo1, hi0 ^ c3 ^ k1, lo0
        k0 = (k0 + PHILOX_W32_0) & MASK32
        k1 = (k1 + PHILOX_W32_1) & MASK32

    shape = np.broadcast_shapes(c0.shape, c1.shape, c2.shape, c3.shape)
    return np.stack([np.broadcast_to(c, shape) for c in (c0, c1, c2, c3)]).astype(np.uint32)


def words_to_uniform(high: np.ndarray, low: np.ndarray) -> np.ndarray:
    """两个32位字组合为 (0, 1) 上的52位均匀数（单元中点，不取端点）"""
    hi = np.asarray(high, dtype=np.uint64) >> np.uint64(5)
    lo = np.asarray(low, dtype=np.uint64) >> np.uint64(6)
    mantissa = ((hi << np.uint64(26)) | lo) >> np.uint64(1)
    return (mantissa.astype(np.float64) + 0.5) * _TWO_POW_M52


def split_counter(counter: np.ndarray) -> tuple:
    """64位计数器拆分为 (低32位, 高32位)"""
    c = np.asarray(counter, dtype=np.uint64)
    return c & MASK32, (c >> _SHIFT32) & MASK32
