#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
stable模块 - 对称α稳定采样

负责计数器型可派生随机流（Philox4x32-10）以及特征函数为 exp(−σ^α|θ|^α) 的
对称稳定变量采样（Chambers-Mallows-Stuck）。
"""

from .philox import philox4x32, words_to_uniform
from .streams import RngStream, derive_stream, derive_words
from .sampler import StableParams, cms_transform, sample_stable, sample_stable_array, sample_stable_cells

__all__ = [
    # 计数器型生成器
    'philox4x32',
    'words_to_uniform',

    # 随机流
    'RngStream',
    'derive_stream',
    'derive_words',

    # 采样
    'StableParams',
    'cms_transform',
    'sample_stable',
    'sample_stable_array',
    'sample_stable_cells'
]
