#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
随机流模块

职责：
- 由64位整数种子展开128位密钥材料（SeedSequence.generate_state(4, uint32)）
- 计数器型流：第 i 个分组 = Philox4x32(计数器 i, 流密钥)，与调度顺序无关
- 按 (层级 n, 单元 r) 派生子流，子流保留主流计数器
"""

from dataclasses import dataclass
from typing import Optional, Tuple
import logging

import numpy as np

from modules.stable.philox import philox4x32, words_to_uniform, split_counter
from modules.utils.exceptions import ValidationError

logger = logging.getLogger(__name__)

# 派生密钥的域分离常数
_DERIVE_TAG = (0x3C6EF372, 0xA54FF53A)

_MAX_COUNTER = (1 << 64) - 1


@dataclass(frozen=True)
class RngStream:
    """可派生的计数器型随机流"""
    key: Tuple[int, int]
    nonce: Tuple[int, int]
    counter: int = 0
    substream: Tuple[Tuple[int, int], ...] = ()
    seed: Optional[int] = None

    def __post_init__(self):
        if not (0 <= self.counter <= _MAX_COUNTER):
            raise ValidationError(f"计数器超出64位范围: {self.counter}", inequality="0 ≤ counter < 2^64")

    @classmethod
    def from_seed(cls, seed: int) -> 'RngStream':
        """
        由64位整数种子构造主流

        Args:
            seed: 非负整数种子（< 2^64）

        Returns:
            RngStream: 计数器为0的主流
        """
        seed = int(seed)
        if not (0 <= seed <= _MAX_COUNTER):
            raise ValidationError(f"种子必须是64位非负整数: {seed}", inequality="0 ≤ seed < 2^64")
        state = np.random.SeedSequence(seed).generate_state(4, np.uint32)
        return cls((int(state[0]), int(state[1])), (int(state[2]), int(state[3])), 0, (), seed)

    def advance(self, steps: int) -> 'RngStream':
        """计数器前进 steps 个分组"""
        counter = self.counter + int(steps)
        if not (0 <= counter <= _MAX_COUNTER):
            raise ValidationError(f"计数器超出64位范围: {counter}", inequality="0 ≤ counter < 2^64")
        return RngStream(self.key, self.nonce, counter, self.substream, self.seed)

    def derive(self, level: int, cell: int) -> 'RngStream':
        """派生 (level, cell) 子流，见 derive_stream"""
        words = derive_words(self, level, np.asarray([cell], dtype=np.int64))[:, 0]
        return RngStream(
            (int(words[0]), int(words[1])),
            (int(words[2]), int(words[3])),
            self.counter,
            self.substream + ((int(level), int(cell)),),
            self.seed,
        )

    def blocks(self, n: int) -> np.ndarray:
        """计数器 counter..counter+n−1 的输出分组，形状 (4, n)"""
        if n < 0:
            raise ValidationError(f"分组数必须非负: {n}")
        if self.counter + n - 1 > _MAX_COUNTER:
            raise ValidationError("计数器超出64位范围", inequality="counter + n ≤ 2^64")
        counters = np.uint64(self.counter) + np.arange(n, dtype=np.uint64)
        lo, hi = split_counter(counters)
        ctr = np.stack([lo, hi,
                        np.full(n, self.nonce[0], dtype=np.uint64),
                        np.full(n, self.nonce[1], dtype=np.uint64)])
        return philox4x32(ctr, np.asarray(self.key, dtype=np.uint64))

    def uniforms(self, n: int) -> np.ndarray:
        """每个分组两个 (0, 1) 均匀数，形状 (2, n)"""
        words = self.blocks(n)
        return np.stack([words_to_uniform(words[0], words[1]), words_to_uniform(words[2], words[3])])

    def to_dict(self) -> dict:
        return {
            'seed': self.seed,
            'counter': self.counter,
            'substream': [list(s) for s in self.substream],
        }


def derive_words(master: RngStream, level: int, cells: np.ndarray) -> np.ndarray:
    """
    向量化派生子流密钥材料

    Args:
        master: 主流
        level: 层级 n
        cells: 单元编号数组（可为负）

    Returns:
        np.ndarray: 形状 (4, m)：子流密钥 (0, 1) 与 nonce (2, 3)
    """
    cells = np.asarray(cells, dtype=np.int64)
    lo, hi = split_counter(cells.astype(np.uint64))
    ctr = np.stack([
        lo, hi,
        np.full(cells.shape, int(level) & 0xFFFFFFFF, dtype=np.uint64),
        np.full(cells.shape, master.nonce[1], dtype=np.uint64),
    ])
    key = np.asarray([
        master.key[0] ^ master.nonce[0] ^ _DERIVE_TAG[0],
        master.key[1] ^ _DERIVE_TAG[1],
    ], dtype=np.uint64)
    return philox4x32(ctr, key)


def derive_stream(master: RngStream, level: int, cell: int) -> RngStream:
    """
    派生子流：相同 (密钥, level, cell) 得到相同子流，不同 (level, cell) 相互独立

    Args:
        master: 主流
        level: 层级 n
        cell: 单元编号 r

    Returns:
        RngStream: 子流（计数器与主流相同）
    """
    return master.derive(level, cell)
