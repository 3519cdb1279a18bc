#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
对称α稳定分布采样模块

职责：
- Chambers-Mallows-Stuck 方法生成特征函数为 exp(−σ^α|θ|^α) 的对称稳定变量
- 该归一化下 CMS 的尺度常数为1；α = 1 用 tan(U)，α = 2 用 2σ√W·sin(U)
- 注意：α = 2 对应 N(0, 2σ²) 而不是 N(0, σ²)
- 按单元向量化采样，供二进近似模拟器使用
"""

from dataclasses import dataclass
import logging

import numpy as np

from modules.stable.streams import RngStream, derive_words
from modules.stable.philox import philox4x32, words_to_uniform, split_counter
from modules.utils.exceptions import ValidationError

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class StableParams:
    """对称稳定分布参数"""
    alpha: float
    scale: float = 1.0

    def __post_init__(self):
        if not (0.0 < self.alpha <= 2.0):
            raise ValidationError(f"稳定指数超出范围: {self.alpha}", inequality="0 < α ≤ 2")
        if not self.scale > 0.0:
            raise ValidationError(f"尺度必须为正: {self.scale}", inequality="σ > 0")

    def cf(self, theta: np.ndarray) -> np.ndarray:
        """特征函数 exp(−σ^α|θ|^α)"""
        return np.exp(-(self.scale ** self.alpha) * np.abs(np.asarray(theta, dtype=float)) ** self.alpha)


def cms_transform(alpha: np.ndarray, u1: np.ndarray, u2: np.ndarray) -> np.ndarray:
    """
    CMS变换：均匀数 → 标准对称稳定变量（σ = 1）

    Args:
        alpha: 稳定指数（可广播）
        u1: 角度用均匀数，U = π(u1 − 1/2)
        u2: 指数用均匀数，W = −log(u2)

    Returns:
        np.ndarray: 标准对称稳定样本
    """
    alpha = np.asarray(alpha, dtype=float)
    angle = np.pi * (np.asarray(u1) - 0.5)
    w = -np.log(np.asarray(u2))
    alpha, angle, w = np.broadcast_arrays(alpha, angle, w)

    out = np.empty(angle.shape)
    cauchy = alpha == 1.0
    gauss = alpha == 2.0
    general = ~(cauchy | gauss)

    out[cauchy] = np.tan(angle[cauchy])
    out[gauss] = 2.0 * np.sqrt(w[gauss]) * np.sin(angle[gauss])
    if np.any(general):
        a = alpha[general]
        v = angle[general]
        with np.errstate(over='ignore'):
            out[general] = (np.sin(a * v) / np.cos(v) ** (1.0 / a)
                            * (np.cos((1.0 - a) * v) / w[general]) ** ((1.0 - a) / a))
    return out


def sample_stable(params: StableParams, stream: RngStream) -> float:
    """
    使用流当前计数器处的分组生成一个样本

    Args:
        params: 稳定分布参数
        stream: 随机流

    Returns:
        float: 样本 X，特征函数为 exp(−σ^α|θ|^α)
    """
    u = stream.uniforms(1)
    return float(params.scale * cms_transform(params.alpha, u[0], u[1])[0])


def sample_stable_array(params: StableParams, stream: RngStream, n: int) -> np.ndarray:
    """
    生成 n 个独立样本（计数器 counter..counter+n−1）

    Args:
        params: 稳定分布参数
        stream: 随机流
        n: 样本数

    Returns:
        np.ndarray: 样本数组
    """
    u = stream.uniforms(n)
    return params.scale * cms_transform(params.alpha, u[0], u[1])


def sample_stable_cells(alphas: np.ndarray, scales: np.ndarray, stream: RngStream, level: int,
                        cells: np.ndarray, n: int = 1) -> np.ndarray:
    """
    按单元向量化采样：第 i 行第 j 列等于 derive_stream(stream.advance(i), level, cells[j]) 的首个样本

    Args:
        alphas: 各单元稳定指数
        scales: 各单元尺度
        stream: 主流
        level: 层级 n
        cells: 单元编号
        n: 实现次数

    Returns:
        np.ndarray: 形状 (n, m) 的样本
    """
    cells = np.asarray(cells, dtype=np.int64)
    alphas = np.asarray(alphas, dtype=float)
    scales = np.asarray(scales, dtype=float)
    if alphas.shape != cells.shape or scales.shape != cells.shape:
        raise ValidationError("alphas、scales 与 cells 形状必须一致")
    if n < 1:
        raise ValidationError(f"实现次数必须为正: {n}", inequality="n ≥ 1")
    if cells.size == 0:
        return np.zeros((n, 0))

    child = derive_words(stream, level, cells)
    counters = np.uint64(stream.counter) + np.arange(n, dtype=np.uint64)
    lo, hi = split_counter(counters)
    shape = (n, cells.size)
    ctr = np.stack([
        np.broadcast_to(lo[:, None], shape),
        np.broadcast_to(hi[:, None], shape),
        np.broadcast_to(child[2][None, :].astype(np.uint64), shape),
        np.broadcast_to(child[3][None, :].astype(np.uint64), shape),
    ])
    key = np.stack([child[0][None, :], child[1][None, :]]).astype(np.uint64)
    words = philox4x32(ctr, key)
    u1 = words_to_uniform(words[0], words[1])
    u2 = words_to_uniform(words[2], words[3])
    return scales[None, :] * cms_transform(alphas[None, :], u1, u2)
