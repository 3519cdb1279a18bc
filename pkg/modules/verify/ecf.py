#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
经验特征函数模块

职责：
- 样本的经验特征函数：cos/sin(θ·X) 的均值，按行分块累加
- 接受带宽 band = band_factor/√N（有界被加项约4σ）
- θ网格：一维等距网格；多维使用确定性的 Weyl 序列，首点为0
"""

from dataclasses import dataclass
from typing import Optional, Sequence
import logging

import numpy as np

from config.settings import settings
from modules.utils.exceptions import ValidationError

logger = logging.getLogger(__name__)

MIN_SAMPLES = 100

# 单次分块的样本行数
_ROW_CHUNK = 10000


@dataclass
class EcfEstimate:
    """经验特征函数估计"""
    theta_grid: np.ndarray
    re: np.ndarray
    im: np.ndarray
    n_samples: int
    band: float

    def deviation(self, exact: Sequence[float]) -> np.ndarray:
        """与实值特征函数的逐点偏差 max(|re − φ|, |im|)"""
        exact = np.asarray(exact, dtype=float).reshape(self.re.shape)
        return np.maximum(np.abs(self.re - exact), np.abs(self.im))

    def sup_deviation(self, exact: Sequence[float]) -> float:
        return float(np.max(self.deviation(exact)))

    def within_band(self, exact: Sequence[float], factor: float = 1.0) -> bool:
        return self.sup_deviation(exact) <= factor * self.band


def _as_matrix(samples: np.ndarray) -> np.ndarray:
    samples = np.asarray(samples, dtype=float)
    if samples.ndim == 1:
        samples = samples[:, None]
    if samples.ndim != 2:
        raise ValidationError(f"样本形状无效: {samples.shape}")
    return samples


def _as_theta(theta_grid: Sequence, dimension: int) -> np.ndarray:
    grid = np.asarray(theta_grid, dtype=float)
    if grid.ndim <= 1:
        grid = grid.reshape(-1, 1) if dimension == 1 else grid.reshape(1, -1)
    if grid.shape[1] != dimension:
        raise ValidationError(f"θ维数 {grid.shape[1]} 与样本维数 {dimension} 不一致")
    return grid


def ecf(samples: Sequence, theta_grid: Sequence, band_factor: Optional[float] = None) -> EcfEstimate:
    """
    经验特征函数

    Args:
        samples: 形状 (N,) 或 (N, d) 的样本
        theta_grid: 形状 (K,) 或 (K, d) 的θ
        band_factor: 带宽系数，默认取配置（4）

    Returns:
        EcfEstimate: 实部、虚部与带宽
    """
    data = _as_matrix(samples)
    n = data.shape[0]
    if n == 0:
        raise ValidationError("样本为空")
    if n < MIN_SAMPLES:
        raise ValidationError(f"样本数过少: {n}", inequality=f"N ≥ {MIN_SAMPLES}")
    if not np.all(np.isfinite(data)):
        raise ValidationError("样本包含非有限值")
    grid = _as_theta(theta_grid, data.shape[1])

    re = np.zeros(grid.shape[0])
    im = np.zeros(grid.shape[0])
    for start in range(0, n, _ROW_CHUNK):
        phase = data[start:start + _ROW_CHUNK] @ grid.T
        re += np.cos(phase).sum(axis=0)
        im += np.sin(phase).sum(axis=0)
    factor = settings.BAND_FACTOR if band_factor is None else float(band_factor)
    return EcfEstimate(grid, re / n, im / n, n, factor / np.sqrt(n))


def theta_grid(dimension: int = 1, span: Optional[float] = None, points: Optional[int] = None) -> np.ndarray:
    """
    确定性θ网格

    Args:
        dimension: 维数 d
        span: θ取值于 [−span, span]^d
        points: 网格点数

    Returns:
        np.ndarray: 形状 (points, d)，首点为0
    """
    span = settings.THETA_SPAN if span is None else float(span)
    points = settings.THETA_POINTS if points is None else int(points)
    if dimension < 1 or points < 1:
        raise ValidationError("θ网格的维数与点数必须为正")
    if dimension == 1:
        return np.linspace(-span, span, points).reshape(-1, 1)
    # R_d 序列：φ_d 为 x^{d+1} = x + 1 的正根
    phi = 2.0
    for _ in range(64):
        phi = (1.0 + phi) ** (1.0 / (dimension + 1))
    steps = (1.0 / phi) ** np.arange(1, dimension + 1)
    k = np.arange(points)[:, None]
    fractions = np.mod(0.5 + k * steps[None, :], 1.0)
    return span * (2.0 * fractions - 1.0)
