#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
样本积分模块

职责：
- 离散多稳定积分 Σ_r f(x_r^*)·M_{n,r}，x_r^* 为单元中点
- 含负指数奇异点的单元使用局部积分得到的单元平均值
- 集合测度 M(A)：跨边界单元按重叠比例计权
- 覆盖不足时报告截断质量 ∫_{未覆盖}|f|^{a,b}
- 求和使用 math.fsum，单次实现与批量实现的结果逐位相同
"""

import math
from typing import Optional, Sequence, Tuple, Union
import logging

import numpy as np

from modules.spaces import IntervalSet, QuadratureEngine, QuadratureSpec, RealFunction, integrate_ab_power
from modules.measure.simulator import MeasureIncrements

logger = logging.getLogger(__name__)

# 单元平均值所用的局部积分容限
_CELL_AVERAGE_TOL = 1e-10


def cell_edges(level: int, first_cell: int, n_cells: int) -> np.ndarray:
    """网格点 (first_cell + k)·2^{-n}"""
    return np.arange(first_cell, first_cell + n_cells + 1, dtype=float) * 2.0 ** -level


def _singular_cells(f: RealFunction, level: int, first_cell: int, n_cells: int) -> Sequence[int]:
    width = 2.0 ** -level
    cells = set()
    for s in f.singularities:
        if s.exponent >= 0:
            continue
        position = s.point / width
        k = int(math.floor(position))
        candidates = (k - 1, k) if position == k else (k,)
        cells.update(c - first_cell for c in candidates if 0 <= c - first_cell < n_cells)
    return sorted(cells)


def cell_average(f: RealFunction, left: float, right: float, quad: Optional[QuadratureSpec] = None) -> float:
    """单元平均值 (1/|cell|)∫_cell f(x)dx"""
    piece = f.restricted(left, right)
    if piece.is_zero:
        return 0.0
    spec = (quad or QuadratureSpec.from_settings()).with_tolerance(_CELL_AVERAGE_TOL)
    result = QuadratureEngine(spec).integrate(lambda x: piece(x), piece.layout)
    return result.scalar() / (right - left)


def function_weights(f: RealFunction, level: int, first_cell: int, n_cells: int,
                     quad: Optional[QuadratureSpec] = None) -> np.ndarray:
    """
    每个单元上 f 的取值权重

    Args:
        f: 实函数
        level: 层级 n
        first_cell: 首个单元编号
        n_cells: 单元数

    Returns:
        np.ndarray: 中点值；负指数奇异点所在单元为单元平均值
    """
    if f.is_zero:
        return np.zeros(n_cells)
    width = 2.0 ** -level
    midpoints = (np.arange(first_cell, first_cell + n_cells, dtype=float) + 0.5) * width
    weights = np.asarray(f(midpoints), dtype=float)
    for k in _singular_cells(f, level, first_cell, n_cells):
        left = (first_cell + k) * width
        weights[k] = cell_average(f, left, left + width, quad)
    return weights


def set_weights(A: IntervalSet, level: int, first_cell: int, n_cells: int) -> np.ndarray:
    """
    集合 A 在每个单元中的重叠比例 |A ∩ cell| / |cell|

    Args:
        A: 半开区间并集
        level: 层级 n

    Returns:
        np.ndarray: [0, 1] 内的权重
    """
    weights = np.zeros(n_cells)
    if A.is_empty:
        return weights
    width = 2.0 ** -level
    edges = cell_edges(level, first_cell, n_cells)
    left, right = edges[:-1], edges[1:]
    for lo, hi in A:
        overlap = np.minimum(hi, right) - np.maximum(lo, left)
        weights += np.clip(overlap, 0.0, None) / width
    return weights


def weighted_sum(draws: np.ndarray, weights: np.ndarray) -> Union[float, np.ndarray]:
    """
    Σ_r w_r·draws[r]，精确舍入求和

    Args:
        draws: 一维（单次实现）或二维（每行一次实现）增量
        weights: 单元权重

    Returns:
        float 或 np.ndarray: 每次实现的积分值
    """
    active = np.flatnonzero(weights)
    if draws.ndim == 1:
        if active.size == 0:
            return 0.0
        return math.fsum(draws[active] * weights[active])
    if active.size == 0:
        return np.zeros(draws.shape[0])
    products = draws[:, active] * weights[active]
    return np.asarray([math.fsum(row) for row in products])


def coverage_deficit(f: RealFunction, increments: Union[MeasureIncrements, Tuple[float, float, float, float]],
                     quad: Optional[QuadratureSpec] = None) -> float:
    """
    f 在模拟区域外的截断质量 ∫_{未覆盖}|f|^{a,b}

    Args:
        f: 实函数
        increments: 增量实现，或 (x_lo, x_hi, a, b)

    Returns:
        float: 截断质量，完全覆盖时为0
    """
    if isinstance(increments, MeasureIncrements):
        (x_lo, x_hi), a, b = increments.domain, increments.a, increments.b
    else:
        x_lo, x_hi, a, b = increments
    if f.is_zero:
        return 0.0
    deficit = 0.0
    for piece in (f.restricted(-math.inf, x_lo), f.restricted(x_hi, math.inf)):
        if not piece.is_zero:
            deficit += integrate_ab_power(piece, a, b, quad)
    return deficit


def integrate_sample(f: RealFunction, increments: MeasureIncrements,
                     quad: Optional[QuadratureSpec] = None) -> float:
    """
    离散多稳定积分的一次实现

    Args:
        f: 被积函数
        increments: 增量实现
        quad: 奇异单元平均与覆盖检查所用积分参数

    Returns:
        float: Σ_r f(x_r^*)·draws[r]
    """
    if f.is_zero:
        return 0.0
    x_lo, x_hi = increments.domain
    if f.support[0] < x_lo or f.support[1] > x_hi:
        deficit = coverage_deficit(f, increments, quad)
        if deficit > 0:
            logger.warning(f"函数 {f.name} 的支撑超出模拟区域 [{x_lo}, {x_hi})，截断质量 {deficit:.3e}")
    weights = function_weights(f, increments.level, increments.first_cell, increments.n_cells, quad)
    return weighted_sum(increments.draws, weights)


def measure_of_set(A: Union[IntervalSet, Sequence[Sequence[float]]], increments: MeasureIncrements) -> float:
    """
    集合测度 M(A) 的一次实现

    Args:
        A: 有界半开区间并集
        increments: 增量实现

    Returns:
        float: Σ_r (|A ∩ cell_r|/|cell_r|)·draws[r]
    """
    A = A if isinstance(A, IntervalSet) else IntervalSet(A)
    if A.is_empty:
        return 0.0
    x_lo, x_hi = increments.domain
    lo, hi = A.bounds
    if lo < x_lo or hi > x_hi:
        logger.warning(f"集合 {A!r} 超出模拟区域 [{x_lo}, {x_hi})，区域外部分不计入")
    weights = set_weights(A, increments.level, increments.first_cell, increments.n_cells)
    return weighted_sum(increments.draws, weights)
