#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
二进近似模拟器模块

职责：
- 在分辨率 2^{-n} 下模拟多稳定测度 M_{α_n} 的单元增量
- 单元 r 的增量 ~ stable(α(r2^{-n}), (2^{-n})^{1/α(r2^{-n})})，α取左端点
- 每个单元使用按 (n, r) 派生的独立子流，结果与调度顺序无关
- 批量模拟：第 i 行与 stream.advance(i) 的单次模拟逐位相同
- 增量的CSV保存与加载
"""

import math
from dataclasses import dataclass
from pathlib import Path
from typing import Iterator, Optional, Sequence, Tuple, Union
import logging

import numpy as np
import pandas as pd

from config.settings import settings
from modules.spaces import IndexFunction
from modules.stable import RngStream, sample_stable_cells
from modules.utils.exceptions import ResourceLimitError, ValidationError
from modules.utils.file_manager import FileManager

logger = logging.getLogger(__name__)

# 单个批量分块的元素上限
_CHUNK_ELEMENTS = 1 << 22

INCREMENT_COLUMNS = ['level', 'cell_index', 'x_left', 'alpha_used', 'draw']


def aligned_cells(domain: Sequence[float], level: int) -> Tuple[int, int]:
    """
    将区间扩展到二进网格

    Args:
        domain: [x_lo, x_hi)
        level: 层级 n

    Returns:
        Tuple[int, int]: 单元编号范围 [k_lo, k_hi)
    """
    if level < 0:
        raise ValidationError(f"层级必须非负: {level}", inequality="n ≥ 0")
    lo, hi = float(domain[0]), float(domain[1])
    if not (math.isfinite(lo) and math.isfinite(hi)):
        raise ValidationError(f"模拟区域必须有界: [{lo}, {hi})", inequality="-∞ < x_lo < x_hi < ∞")
    if not hi > lo:
        raise ValidationError(f"模拟区域为空: [{lo}, {hi})", inequality="x_lo < x_hi")
    scale = 2.0 ** level
    return int(math.floor(lo * scale)), int(math.ceil(hi * scale))


def _check_cells(n_cells: int, max_cells: Optional[int]):
    cap = settings.MAX_CELLS if max_cells is None else int(max_cells)
    if n_cells > cap:
        raise ResourceLimitError(f"单元数 {n_cells} 超过上限 {cap}，请降低层级或缩小区域")


@dataclass(frozen=True)
class MeasureIncrements:
    """M_{α_n} 的一次实现：区域内所有单元的增量"""
    level: int
    first_cell: int
    draws: np.ndarray
    alphas_used: np.ndarray
    stream: RngStream
    a: float
    b: float

    def __post_init__(self):
        if self.draws.shape != self.alphas_used.shape or self.draws.ndim != 1:
            raise ValidationError("draws 与 alphas_used 必须是等长一维数组")
        self.draws.setflags(write=False)
        self.alphas_used.setflags(write=False)

    @property
    def n_cells(self) -> int:
        return int(self.draws.size)

    @property
    def cell_width(self) -> float:
        return 2.0 ** -self.level

    @property
    def cell_indices(self) -> np.ndarray:
        return np.arange(self.first_cell, self.first_cell + self.n_cells, dtype=np.int64)

    @property
    def cell_edges(self) -> np.ndarray:
        """n_cells + 1 个网格点"""
        return np.arange(self.first_cell, self.first_cell + self.n_cells + 1, dtype=float) * self.cell_width

    @property
    def domain(self) -> Tuple[float, float]:
        return self.first_cell * self.cell_width, (self.first_cell + self.n_cells) * self.cell_width

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame({
            'level': np.full(self.n_cells, self.level, dtype=np.int64),
            'cell_index': self.cell_indices,
            'x_left': self.cell_edges[:-1],
            'alpha_used': self.alphas_used,
            'draw': self.draws,
        }, columns=INCREMENT_COLUMNS)


@dataclass(frozen=True)
class MeasureIncrementBatch:
    """同一网格上 N 次独立实现，第 i 行使用 stream.advance(i)"""
    level: int
    first_cell: int
    draws: np.ndarray
    alphas_used: np.ndarray
    stream: RngStream
    a: float
    b: float

    @property
    def n_realizations(self) -> int:
        return int(self.draws.shape[0])

    @property
    def domain(self) -> Tuple[float, float]:
        width = 2.0 ** -self.level
        return self.first_cell * width, (self.first_cell + self.draws.shape[1]) * width

    def realization(self, i: int) -> MeasureIncrements:
        """第 i 次实现"""
        return MeasureIncrements(self.level, self.first_cell, np.array(self.draws[i]), np.array(self.alphas_used),
                                 self.stream.advance(i), self.a, self.b)


def _cell_law(alpha: IndexFunction, level: int, k_lo: int, k_hi: int) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    cells = np.arange(k_lo, k_hi, dtype=np.int64)
    width = 2.0 ** -level
    alphas = np.asarray(alpha(cells * width), dtype=float)
    scales = width ** (1.0 / alphas)
    return cells, alphas, scales


def simulate_increments(alpha: IndexFunction, level: int, domain: Sequence[float], stream: RngStream,
                        max_cells: Optional[int] = None) -> MeasureIncrements:
    """
    模拟一次 M_{α_n} 在区域上的全部单元增量

    Args:
        alpha: 索引函数
        level: 层级 n（单元宽 2^{-n}）
        domain: 区域 [x_lo, x_hi)，自动扩展到网格对齐
        stream: 主流
        max_cells: 单元数上限，默认取配置

    Returns:
        MeasureIncrements: 增量实现
    """
    k_lo, k_hi = aligned_cells(domain, level)
    _check_cells(k_hi - k_lo, max_cells)
    cells, alphas, scales = _cell_law(alpha, level, k_lo, k_hi)
    draws = sample_stable_cells(alphas, scales, stream, level, cells, 1)[0]
    logger.debug(f"模拟增量: level={level}, 单元={k_hi - k_lo}, counter={stream.counter}")
    return MeasureIncrements(level, k_lo, draws, alphas, stream, alpha.a, alpha.b)


def chunk_rows(n_cells: int, chunk_size: Optional[int] = None) -> int:
    """每个分块的实现数，使分块元素数不超过上限"""
    size = settings.CHUNK_SIZE if chunk_size is None else int(chunk_size)
    return max(1, min(size, _CHUNK_ELEMENTS // max(n_cells, 1)))


def iter_increment_chunks(alpha: IndexFunction, level: int, domain: Sequence[float], stream: RngStream,
                          n_realizations: int, chunk_size: Optional[int] = None,
                          max_cells: Optional[int] = None) -> Iterator[Tuple[int, np.ndarray]]:
    """
    分块生成批量增量

    Args:
        alpha: 索引函数
        level: 层级 n
        domain: 区域
        stream: 主流
        n_realizations: 实现次数 N
        chunk_size: 每块最大行数

    Yields:
        Tuple[int, np.ndarray]: (起始行号, 形状 (rows, cells) 的增量)
    """
    if n_realizations < 1:
        raise ValidationError(f"实现次数必须为正: {n_realizations}", inequality="N ≥ 1")
    k_lo, k_hi = aligned_cells(domain, level)
    _check_cells(k_hi - k_lo, max_cells)
    cells, alphas, scales = _cell_law(alpha, level, k_lo, k_hi)
    rows = chunk_rows(cells.size, chunk_size)
    for start in range(0, n_realizations, rows):
        count = min(rows, n_realizations - start)
        yield start, sample_stable_cells(alphas, scales, stream.advance(start), level, cells, count)


def simulate_increment_batch(alpha: IndexFunction, level: int, domain: Sequence[float], stream: RngStream,
                             n_realizations: int, chunk_size: Optional[int] = None,
                             max_cells: Optional[int] = None) -> MeasureIncrementBatch:
    """
    批量模拟：第 i 行与 simulate_increments(..., stream.advance(i)) 相同

    Args:
        alpha: 索引函数
        level: 层级 n
        domain: 区域
        stream: 主流
        n_realizations: 实现次数 N

    Returns:
        MeasureIncrementBatch: 形状 (N, cells) 的增量
    """
    k_lo, k_hi = aligned_cells(domain, level)
    _check_cells(k_hi - k_lo, max_cells)
    cap = settings.MAX_CELLS if max_cells is None else int(max_cells)
    if n_realizations * (k_hi - k_lo) > 16 * cap:
        raise ResourceLimitError(
            f"批量元素数 {n_realizations * (k_hi - k_lo)} 过大，请使用 iter_increment_chunks 分块处理"
        )
    draws = np.empty((n_realizations, k_hi - k_lo))
    for start, chunk in iter_increment_chunks(alpha, level, domain, stream, n_realizations, chunk_size, max_cells):
        draws[start:start + chunk.shape[0]] = chunk
    _, alphas, _ = _cell_law(alpha, level, k_lo, k_hi)
    logger.info(f"批量模拟完成: level={level}, 单元={k_hi - k_lo}, 实现={n_realizations}")
    return MeasureIncrementBatch(level, k_lo, draws, alphas, stream, alpha.a, alpha.b)


def save_increments(increments: MeasureIncrements, output_path: Union[str, Path],
                    file_manager: Optional[FileManager] = None) -> Path:
    """
    保存增量CSV：列 level, cell_index, x_left, alpha_used, draw

    Args:
        increments: 增量实现
        output_path: 输出路径

    Returns:
        Path: 写入的文件
    """
    manager = file_manager or FileManager()
    return manager.save_csv(increments.to_frame(), output_path)


def load_increments(file_path: Union[str, Path], stream: RngStream, a: float, b: float,
                    file_manager: Optional[FileManager] = None) -> MeasureIncrements:
    """
    从CSV加载增量

    Args:
        file_path: CSV路径
        stream: 生成该实现的流（CSV不保存密钥）
        a, b: 索引函数的界

    Returns:
        MeasureIncrements: 增量实现
    """
    manager = file_manager or FileManager()
    frame = manager.load_csv(file_path)
    missing = [c for c in INCREMENT_COLUMNS if c not in frame.columns]
    if missing:
        raise ValidationError(f"增量CSV缺少列: {missing}")
    if frame.empty:
        raise ValidationError("增量CSV为空")
    levels = frame['level'].unique()
    if len(levels) != 1:
        raise ValidationError(f"增量CSV包含多个层级: {levels.tolist()}")
    cells = frame['cell_index'].to_numpy(dtype=np.int64)
    if np.any(np.diff(cells) != 1):
        raise ValidationError("增量CSV的单元编号必须连续递增")
    return MeasureIncrements(int(levels[0]), int(cells[0]), frame['draw'].to_numpy(dtype=float),
                             frame['alpha_used'].to_numpy(dtype=float), stream, float(a), float(b))
