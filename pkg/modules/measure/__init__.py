#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
measure模块 - 多稳定随机测度

负责联合特征函数与缩放特征函数、M_α 的二进近似模拟，以及样本上的多稳定积分与集合测度。
"""

from .characteristic import CfSpec, cf_joint, scaled_cf, scaled_exponents, cf_on_grid, zoomed_layout
from .simulator import (
    MeasureIncrements,
    MeasureIncrementBatch,
    aligned_cells,
    chunk_rows,
    simulate_increments,
    simulate_increment_batch,
    iter_increment_chunks,
    save_increments,
    load_increments,
)
from .integral import (
    integrate_sample,
    measure_of_set,
    coverage_deficit,
    function_weights,
    set_weights,
    weighted_sum,
    cell_average,
)

__all__ = [
    # 特征函数
    'CfSpec',
    'cf_joint',
    'scaled_cf',
    'scaled_exponents',
    'cf_on_grid',
    'zoomed_layout',

    # 模拟
    'MeasureIncrements',
    'MeasureIncrementBatch',
    'aligned_cells',
    'chunk_rows',
    'simulate_increments',
    'simulate_increment_batch',
    'iter_increment_chunks',
    'save_increments',
    'load_increments',

    # 样本积分
    'integrate_sample',
    'measure_of_set',
    'coverage_deficit',
    'function_weights',
    'set_weights',
    'weighted_sum',
    'cell_average'
]
