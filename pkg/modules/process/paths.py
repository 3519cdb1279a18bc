#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
过程路径模块

职责：
- 由同一次增量实现计算所有时刻的 Y(t_i) = Σ_r f(t_i, x_r^*)·M_{n,r}
- 选择模拟窗口：覆盖各截面的有界支撑，无界支撑向外加倍直到尾部质量
  ∫|f(t,·)|^{a,b} < truncation_epsilon 或达到最大窗口
- 批量路径：第 i 条路径使用 stream.advance(i)，与单条路径逐位相同
- 边际特征函数 exp(−∫|Σθ_j f(t_j,x)|^{α(x)}dx)
- 连续模 ∫|f(t,x) − f(v,x)|^{α(x)}dx ≤ c₁|t − v|^{aη} 的拟合与趋势诊断
"""

import math
from dataclasses import dataclass, field
from typing import Any, Dict, Iterator, List, Optional, Sequence, Tuple
import logging

import numpy as np
import pandas as pd
from tqdm import tqdm

from config.settings import settings
from modules.spaces import IndexFunction, QuadratureSpec, RealFunction, integrate_alpha_power
from modules.stable import RngStream
from modules.measure import (
    CfSpec,
    cf_joint,
    aligned_cells,
    coverage_deficit,
    function_weights,
    iter_increment_chunks,
    simulate_increments,
    weighted_sum,
)
from modules.process.kernels import ProcessKernel
from modules.verify.report import VerifyReport
from modules.utils.exceptions import ValidationError

logger = logging.getLogger(__name__)

# 缓存全部时刻权重的元素上限
_WEIGHT_CACHE_ELEMENTS = 1 << 24

# 连续模诊断的相对容限
_RATIO_SLACK = 1e-6


@dataclass
class PathSample:
    """一条路径：同一增量实现下各时刻的 Y(t)"""
    times: np.ndarray
    values: np.ndarray
    level: int
    stream: RngStream
    window: Tuple[float, float]
    truncated_mass: np.ndarray
    kernel: Dict[str, Any] = field(default_factory=dict)
    alpha: Dict[str, Any] = field(default_factory=dict)

    def __post_init__(self):
        if self.times.shape != self.values.shape:
            raise ValidationError("times 与 values 长度不一致")

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame({'t': self.times, 'value': self.values}, columns=['t', 'value'])

    def sidecar(self) -> Dict[str, Any]:
        """路径的JSON附属信息"""
        return {
            'kernel': self.kernel,
            'alpha': self.alpha,
            'level': self.level,
            'window': list(self.window),
            'stream': self.stream.to_dict(),
            'max_truncated_mass': float(np.max(self.truncated_mass)) if self.truncated_mass.size else 0.0,
        }


def _check_times(times: Sequence[float]) -> np.ndarray:
    times = np.asarray(times, dtype=float).reshape(-1)
    if times.size == 0:
        raise ValidationError("时间列表不能为空")
    if not np.all(np.isfinite(times)):
        raise ValidationError("时间必须是有限实数")
    if np.any(np.diff(times) < 0):
        raise ValidationError("时间必须递增", inequality="t_1 ≤ t_2 ≤ … ≤ t_k")
    return times


def _resolve_alpha(kernel: ProcessKernel, alpha: Optional[IndexFunction]) -> IndexFunction:
    if alpha is None:
        return kernel.alpha
    if alpha != kernel.alpha:
        raise ValidationError("路径的索引函数必须与核构造时的索引函数一致")
    return alpha


def simulation_window(kernel: ProcessKernel, times: Sequence[float], quad: Optional[QuadratureSpec] = None,
                      max_window: Optional[float] = None) -> Tuple[Tuple[float, float], float]:
    """
    选择模拟窗口

    Args:
        kernel: 过程核
        times: 时间列表
        quad: 积分参数（截断阈值取 truncation_epsilon）
        max_window: 窗口长度上限

    Returns:
        Tuple[Tuple[float, float], float]: (窗口, 端点时刻的最大截断质量)
    """
    times = _check_times(times)
    quad = quad or QuadratureSpec.from_settings()
    max_window = settings.MAX_WINDOW if max_window is None else float(max_window)
    a, b = kernel.alpha.a, kernel.alpha.b

    probes = [kernel.section(t) for t in sorted({float(times[0]), float(times[-1])})]
    probes = [f for f in probes if not f.is_zero]
    finite = [0.0, float(times[0]), float(times[-1])]
    for f in probes:
        finite.extend(p for p in f.support if math.isfinite(p))
        finite.extend(f.breakpoints)
    lo, hi = min(finite), max(finite)
    open_left = any(not math.isfinite(f.support[0]) for f in probes)
    open_right = any(not math.isfinite(f.support[1]) for f in probes)
    if hi <= lo:
        hi = lo + 1.0
    if not (open_left or open_right):
        return (lo, hi), 0.0

    sides = int(open_left) + int(open_right)
    pad_cap = max((max_window - (hi - lo)) / sides, 0.0)
    pad = min(max(1.0, hi - lo), pad_cap)
    while True:
        window = (lo - pad if open_left else lo, hi + pad if open_right else hi)
        deficit = max(coverage_deficit(f, (window[0], window[1], a, b), quad) for f in probes)
        if deficit <= quad.truncation_epsilon or pad >= pad_cap:
            break
        pad = min(2.0 * pad, pad_cap)
    if deficit > quad.truncation_epsilon:
        logger.warning(f"模拟窗口达到上限 {max_window}，尾部截断质量 {deficit:.3e}")
    return window, deficit


def _iter_time_weights(kernel: ProcessKernel, times: np.ndarray, level: int, first_cell: int, n_cells: int,
                       quad: Optional[QuadratureSpec], cached: Optional[List[np.ndarray]] = None
                       ) -> Iterator[np.ndarray]:
    """逐时刻的单元权重；未缓存时同一时刻只持有一个权重数组"""
    if cached is not None:
        yield from cached
        return
    for t in times:
        yield function_weights(kernel.section(t), level, first_cell, n_cells, quad)


def _truncated_masses(kernel: ProcessKernel, times: np.ndarray, window: Tuple[float, float],
                      quad: Optional[QuadratureSpec]) -> np.ndarray:
    a, b = kernel.alpha.a, kernel.alpha.b
    return np.asarray([coverage_deficit(kernel.section(t), (window[0], window[1], a, b), quad) for t in times])


def sample_path(kernel: ProcessKernel, times: Sequence[float], alpha: Optional[IndexFunction] = None,
                level: Optional[int] = None, stream: Optional[RngStream] = None,
                quad: Optional[QuadratureSpec] = None, max_window: Optional[float] = None) -> PathSample:
    """
    生成一条路径

    Args:
        kernel: 过程核
        times: 递增的时间列表
        alpha: 索引函数（须与核一致，默认取核的索引函数）
        level: 模拟层级，默认取配置
        stream: 随机流
        quad: 奇异单元平均与窗口截断所用积分参数
        max_window: 窗口长度上限

    Returns:
        PathSample: 路径
    """
    if stream is None:
        raise ValidationError("sample_path 需要随机流")
    return sample_paths(kernel, times, alpha, level, stream, 1, quad, max_window, show_progress=False)[0]


def sample_paths(kernel: ProcessKernel, times: Sequence[float], alpha: Optional[IndexFunction] = None,
                 level: Optional[int] = None, stream: Optional[RngStream] = None, n_paths: int = 1,
                 quad: Optional[QuadratureSpec] = None, max_window: Optional[float] = None,
                 chunk_size: Optional[int] = None, show_progress: bool = True) -> List[PathSample]:
    """
    批量生成路径，第 i 条路径等于 sample_path(..., stream.advance(i))

    Args:
        kernel: 过程核
        times: 时间列表
        n_paths: 路径数
        chunk_size: 每个分块的路径数
        show_progress: 是否显示进度条

    Returns:
        List[PathSample]: 路径列表
    """
    if stream is None:
        raise ValidationError("sample_paths 需要随机流")
    if n_paths < 1:
        raise ValidationError(f"路径数必须为正: {n_paths}", inequality="n_paths ≥ 1")
    times = _check_times(times)
    alpha = _resolve_alpha(kernel, alpha)
    level = settings.DEFAULT_LEVEL if level is None else int(level)

    window, _ = simulation_window(kernel, times, quad, max_window)
    truncated = _truncated_masses(kernel, times, window, quad)
    k_lo, k_hi = aligned_cells(window, level)
    n_cells = k_hi - k_lo

    cached = None
    if times.size * n_cells <= _WEIGHT_CACHE_ELEMENTS:
        cached = list(_iter_time_weights(kernel, times, level, k_lo, n_cells, quad))
    else:
        logger.debug(f"权重元素数 {times.size * n_cells} 超过缓存上限，逐时刻计算")

    values = np.empty((n_paths, times.size))
    if n_paths == 1:
        increments = simulate_increments(alpha, level, window, stream)
        for j, w in enumerate(_iter_time_weights(kernel, times, level, k_lo, n_cells, quad, cached)):
            values[0, j] = weighted_sum(increments.draws, w)
    else:
        chunks = iter_increment_chunks(alpha, level, window, stream, n_paths, chunk_size)
        for start, draws in tqdm(chunks, desc="模拟路径", disable=not show_progress, leave=False):
            for j, w in enumerate(_iter_time_weights(kernel, times, level, k_lo, n_cells, quad, cached)):
                values[start:start + draws.shape[0], j] = weighted_sum(draws, w)

    kernel_config, alpha_config = kernel.to_config(), alpha.to_config()
    paths = [
        PathSample(times.copy(), values[i], level, stream.advance(i), window, truncated, kernel_config, alpha_config)
        for i in range(n_paths)
    ]
    logger.info(f"路径模拟完成: {kernel.kind}, 路径={n_paths}, 时刻={times.size}, 单元={n_cells}, level={level}")
    return paths


def marginal_cf(kernel: ProcessKernel, t_list: Sequence[float], theta_list: Sequence[float],
                alpha: Optional[IndexFunction] = None, quad: Optional[QuadratureSpec] = None) -> float:
    """
    有限维边际特征函数 exp(−∫|Σθ_j f(t_j,x)|^{α(x)}dx)

    Args:
        kernel: 过程核
        t_list: 时刻
        theta_list: 参数

    Returns:
        float: 特征函数值
    """
    alpha = _resolve_alpha(kernel, alpha)
    if len(t_list) != len(theta_list):
        raise ValidationError("t_list 与 theta_list 长度不一致", inequality="len(t) = len(θ)")
    sections = tuple(kernel.section(t) for t in t_list)
    return cf_joint(CfSpec(sections, tuple(theta_list), alpha), quad)


def increment_exponent(kernel: ProcessKernel, t: float, v: float, alpha: Optional[IndexFunction] = None,
                       quad: Optional[QuadratureSpec] = None) -> float:
    """D(t,v) = ∫|f(t,x) − f(v,x)|^{α(x)}dx，差在x坐标下精确构造"""
    alpha = _resolve_alpha(kernel, alpha)
    difference = kernel.pullback_difference(0.0, 1.0, t, v)
    if difference.is_zero:
        return 0.0
    return integrate_alpha_power(difference, alpha, quad)


def continuity_modulus_check(kernel: ProcessKernel, alpha: Optional[IndexFunction], interval: Sequence[float],
                             eta: float, quad: Optional[QuadratureSpec] = None,
                             depth: int = 8) -> VerifyReport:
    """
    拟合 D(t,v) ≤ c₁|t − v|^{aη} 中最小的 c₁

    在区间左端与中点处取间隔 δ_k = L·2^{-k}（k = 1..depth）的点对；比值 D/δ^{aη}
    在最细的几个间隔上不得增长。

    Args:
        kernel: 过程核
        alpha: 索引函数（须满足 a > 1）
        interval: [lo, hi]
        eta: 1/a ≤ η < 1

    Returns:
        VerifyReport: c₁、最坏点对与比值序列
    """
    alpha = _resolve_alpha(kernel, alpha)
    a = alpha.a
    if not a > 1.0:
        raise ValidationError(f"连续性检查要求 a > 1: a={a}", inequality="1 < a ≤ α(x) ≤ b ≤ 2")
    if not (1.0 / a <= eta < 1.0):
        raise ValidationError(f"η={eta} 不在 [1/a, 1) 内 (a={a})", inequality="1/a ≤ η < 1")
    lo, hi = float(interval[0]), float(interval[1])
    if not hi > lo:
        raise ValidationError(f"区间无效: [{lo}, {hi}]", inequality="lo < hi")
    exponent = a * eta
    length = hi - lo

    anchors = (lo, lo + 0.5 * length)
    ratios: Dict[str, List[float]] = {}
    worst = (0.0, (lo, lo))
    c1 = 0.0
    trend_ok = True
    floor = 10.0 * (quad or QuadratureSpec.from_settings()).abs_tol
    for s in anchors:
        series = []
        floors = []
        for k in range(1, depth + 1):
            delta = length * 2.0 ** -k
            d = increment_exponent(kernel, s + delta, s, alpha, quad)
            ratio = d / delta ** exponent
            series.append(ratio)
            floors.append(floor / delta ** exponent)
            if ratio > c1:
                c1, worst = ratio, (ratio, (s, s + delta))
        tail, slack = series[-3:], floors[-3:]
        if any(later > earlier * (1.0 + _RATIO_SLACK) + tol
               for earlier, later, tol in zip(tail, tail[1:], slack[1:])):
            trend_ok = False
        ratios[f"{s:g}"] = series
    finite = math.isfinite(c1)
    notes = []
    if not trend_ok:
        notes.append("比值 D/|t−v|^{aη} 在最细间隔上增长，c₁ 随细化发散")
    return VerifyReport(
        check='continuity_modulus',
        statistics={'c1': c1, 'worst_pair': list(worst[1]), 'ratios': ratios, 'exponent': exponent},
        thresholds={'c1_finite': True, 'ratio_non_increasing': True},
        passed=finite and trend_ok,
        provenance={'kernel': kernel.to_config(), 'alpha': alpha.to_config(), 'interval': [lo, hi],
                    'eta': eta, 'depth': depth},
        notes=notes,
    )
