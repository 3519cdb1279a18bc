#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
测度校验模块

职责：
- 独立散布：不相交集合测度的联合ECF与边际精确特征函数之积比较
- 路径σ可加性：并集测度与各部分之和的逐路径差异（舍入量级）
- 特征函数收敛：α_n → α 时精确特征函数偏差的单调趋势
- 测度缩放：缩放特征函数与冻结指数特征函数的偏差随 r 递减
- 稳定采样器分布检验与接受带宽校准
- 模拟分布是 M_{α_n}，对应的精确特征函数使用 α.dyadic(level)
"""

import math
from typing import Callable, List, Optional, Sequence, Tuple, Union
import logging

import numpy as np
from tqdm import tqdm

from config.settings import settings
from modules.spaces import (
    IndexFunction,
    IntervalSet,
    QuadratureSpec,
    RealFunction,
    integrate_alpha_power,
    log_continuity_diagnostic,
)
from modules.stable import RngStream, StableParams, sample_stable_array
from modules.measure import (
    CfSpec,
    cf_joint,
    iter_increment_chunks,
    aligned_cells,
    scaled_exponents,
    set_weights,
    weighted_sum,
)
from modules.verify.ecf import ecf, theta_grid
from modules.verify.report import VerifyReport, trend_verdict
from modules.utils.exceptions import ValidationError

logger = logging.getLogger(__name__)

SetLike = Union[IntervalSet, Sequence[Sequence[float]]]

# 路径可加性允许的相对舍入误差（以机器精度计）
_ADDITIVITY_ULPS = 8.0


def _as_sets(sets: Sequence[SetLike]) -> List[IntervalSet]:
    result = [s if isinstance(s, IntervalSet) else IntervalSet(s) for s in sets]
    if not result:
        raise ValidationError("至少需要一个集合")
    for s in result:
        if s.is_empty:
            raise ValidationError("集合不能为空")
    return result


def _check_disjoint(sets: Sequence[IntervalSet]):
    for i in range(len(sets)):
        for j in range(i + 1, len(sets)):
            overlap = sets[i].overlap_length(sets[j])
            if overlap > 0:
                raise ValidationError(
                    f"集合 {i} 与 {j} 相交（重叠长度 {overlap:g}）",
                    inequality="A_i ∩ A_j = ∅",
                )


def _hull(sets: Sequence[IntervalSet]) -> Tuple[float, float]:
    return min(s.bounds[0] for s in sets), max(s.bounds[1] for s in sets)


def _aligned(sets: Sequence[IntervalSet], level: int) -> bool:
    scale = 2.0 ** level
    return all(float(e * scale).is_integer() for s in sets for e in s.edges)


def _check_samples(n_paths: int):
    if n_paths < 100:
        raise ValidationError(f"实现次数过少: {n_paths}", inequality="N ≥ 100")


def set_measure_samples(alpha: IndexFunction, sets: Sequence[IntervalSet], level: int, n_paths: int,
                        stream: RngStream, chunk_size: Optional[int] = None,
                        show_progress: bool = False) -> np.ndarray:
    """
    N 次实现下各集合的测度

    Args:
        alpha: 索引函数
        sets: 集合列表
        level: 层级 n
        n_paths: 实现次数

    Returns:
        np.ndarray: 形状 (N, d)
    """
    domain = _hull(sets)
    k_lo, k_hi = aligned_cells(domain, level)
    weights = [set_weights(s, level, k_lo, k_hi - k_lo) for s in sets]
    samples = np.empty((n_paths, len(sets)))
    chunks = iter_increment_chunks(alpha, level, domain, stream, n_paths, chunk_size)
    for start, draws in tqdm(chunks, desc="模拟测度", disable=not show_progress, leave=False):
        for j, w in enumerate(weights):
            samples[start:start + draws.shape[0], j] = weighted_sum(draws, w)
    return samples


def _set_exponents(sets: Sequence[IntervalSet], thetas: np.ndarray, alpha: IndexFunction,
                   quad: Optional[QuadratureSpec]) -> np.ndarray:
    """每个θ向量下 Σ_j ∫_{A_j}|θ_j|^{α(x)}dx"""
    rows = []
    for row in thetas:
        rows.append(sum(integrate_alpha_power(RealFunction.indicator(s, t), alpha, quad)
                        for s, t in zip(sets, row)))
    return np.asarray(rows)


def independence_check(alpha: IndexFunction, sets: Sequence[SetLike], level: int, n_paths: int,
                       stream: RngStream, quad: Optional[QuadratureSpec] = None,
                       thetas: Optional[np.ndarray] = None, show_progress: bool = False) -> VerifyReport:
    """
    独立散布检验：(M(A_1),…,M(A_d)) 的联合ECF 对比边际精确特征函数之积

    Args:
        alpha: 索引函数
        sets: 两两不相交的有界集合
        level: 模拟层级
        n_paths: 实现次数 N
        stream: 随机流
        thetas: θ网格，默认 d 维确定性网格

    Returns:
        VerifyReport: sup偏差与带宽 band_factor/√N
    """
    sets = _as_sets(sets)
    _check_disjoint(sets)
    _check_samples(n_paths)
    grid = theta_grid(len(sets)) if thetas is None else np.asarray(thetas, dtype=float).reshape(-1, len(sets))

    samples = set_measure_samples(alpha, sets, level, n_paths, stream, show_progress=show_progress)
    estimate = ecf(samples, grid)
    simulated = alpha.dyadic(level)
    exact = np.exp(-_set_exponents(sets, grid, simulated, quad))
    deviation = estimate.sup_deviation(exact)

    notes = []
    if len(sets) == 1:
        notes.append("d = 1：联合分布即边际分布")
    if not _aligned(sets, level):
        notes.append("集合边界未与二进网格对齐，跨边界单元按重叠比例计权")
    return VerifyReport(
        check='independence',
        statistics={'sup_deviation': deviation, 'n_samples': n_paths, 'grid_points': int(grid.shape[0])},
        thresholds={'band': estimate.band},
        passed=deviation <= estimate.band,
        seed=stream.seed,
        provenance={'level': level, 'sets': [s.to_config() for s in sets], 'alpha': alpha.to_config(),
                    'stream': stream.to_dict()},
        notes=notes,
    )


def additivity_check(alpha: IndexFunction, sets: Sequence[SetLike], level: int, n_paths: int,
                     stream: RngStream, quad: Optional[QuadratureSpec] = None,
                     show_progress: bool = False) -> VerifyReport:
    """
    路径σ可加性：M(∪A_j) 与 ΣM(A_j) 逐路径比较，并集的ECF对比精确特征函数

    Args:
        alpha: 索引函数
        sets: 两两不相交的集合
        level: 模拟层级
        n_paths: 实现次数

    Returns:
        VerifyReport: 最大相对差异（机器精度单位）与ECF偏差
    """
    sets = _as_sets(sets)
    _check_disjoint(sets)
    _check_samples(n_paths)
    union = sets[0]
    for s in sets[1:]:
        union = union.union(s)

    domain = _hull(sets)
    k_lo, k_hi = aligned_cells(domain, level)
    n_cells = k_hi - k_lo
    part_weights = [set_weights(s, level, k_lo, n_cells) for s in sets]
    union_weights = set_weights(union, level, k_lo, n_cells)

    union_values = np.empty(n_paths)
    worst = 0.0
    chunks = iter_increment_chunks(alpha, level, domain, stream, n_paths)
    for start, draws in tqdm(chunks, desc="可加性", disable=not show_progress, leave=False):
        whole = weighted_sum(draws, union_weights)
        parts = sum(weighted_sum(draws, w) for w in part_weights)
        scale = weighted_sum(np.abs(draws), np.abs(union_weights)) + np.finfo(float).tiny
        worst = max(worst, float(np.max(np.abs(whole - parts) / scale)))
        union_values[start:start + draws.shape[0]] = whole
    eps = float(np.finfo(float).eps)

    grid = theta_grid(1)
    estimate = ecf(union_values, grid)
    exact = np.exp(-_set_exponents([union], grid, alpha.dyadic(level), quad))
    deviation = estimate.sup_deviation(exact)
    pathwise_ok = worst <= _ADDITIVITY_ULPS * eps
    return VerifyReport(
        check='additivity',
        statistics={'max_relative_discrepancy': worst, 'sup_deviation': deviation, 'n_samples': n_paths},
        thresholds={'max_relative_discrepancy': _ADDITIVITY_ULPS * eps, 'band': estimate.band},
        passed=pathwise_ok and deviation <= estimate.band,
        seed=stream.seed,
        provenance={'level': level, 'sets': [s.to_config() for s in sets], 'alpha': alpha.to_config(),
                    'stream': stream.to_dict()},
        notes=["逐路径差异以 Σ|w_r·M_{n,r}| 为尺度，只含求和舍入误差"],
    )


def _cf_grid(functions: Sequence[RealFunction], thetas: np.ndarray, alpha: IndexFunction,
             quad: Optional[QuadratureSpec]) -> np.ndarray:
    spec = CfSpec(tuple(functions), tuple(thetas[0]), alpha)
    return np.asarray([cf_joint(spec.with_thetas(row), quad) for row in thetas])


def cf_convergence_check(alpha_seq: Sequence[IndexFunction], alpha_limit: IndexFunction,
                         functions: Sequence[RealFunction], thetas: Optional[np.ndarray] = None,
                         quad: Optional[QuadratureSpec] = None,
                         final_tolerance: Optional[float] = None) -> VerifyReport:
    """
    α_n → α 时精确特征函数的收敛（无蒙特卡洛）

    Args:
        alpha_seq: 索引函数序列 α_n
        alpha_limit: 极限 α
        functions: f_1..f_d
        thetas: 形状 (K, d) 的θ网格

    Returns:
        VerifyReport: 各 α_n 的sup偏差，要求单调不增且末值 < final_tolerance
    """
    if not alpha_seq:
        raise ValidationError("索引函数序列不能为空")
    for alpha_n in alpha_seq:
        if (alpha_n.a, alpha_n.b) != (alpha_limit.a, alpha_limit.b):
            raise ValidationError("序列中的索引函数必须与极限共享界 [a, b]", inequality="[a_n, b_n] = [a, b]")
    d = len(functions)
    grid = theta_grid(d) if thetas is None else np.asarray(thetas, dtype=float).reshape(-1, d)
    spec = quad or QuadratureSpec.from_settings()
    tolerance = settings.FINAL_TOLERANCE if final_tolerance is None else float(final_tolerance)

    limit = _cf_grid(functions, grid, alpha_limit, spec)
    deviations = [float(np.max(np.abs(_cf_grid(functions, grid, alpha_n, spec) - limit))) for alpha_n in alpha_seq]
    verdict = trend_verdict(deviations, 10.0 * spec.abs_tol, tolerance)
    return VerifyReport(
        check='cf_convergence',
        statistics={'deviations': deviations, **verdict},
        thresholds={'final_tolerance': tolerance, 'trend_floor': 10.0 * spec.abs_tol},
        passed=verdict['non_increasing'] and verdict['final_small'],
        provenance={'alpha_seq': [a.to_config() for a in alpha_seq], 'alpha_limit': alpha_limit.to_config(),
                    'grid_points': int(grid.shape[0])},
        notes=["有限序列上的单调趋势诊断，不给出收敛速率"],
    )


def measure_scaling_check(alpha: IndexFunction, u: float, functions: Sequence[RealFunction],
                          thetas: Optional[np.ndarray] = None, r_seq: Optional[Sequence[float]] = None,
                          quad: Optional[QuadratureSpec] = None,
                          final_tolerance: Optional[float] = None) -> VerifyReport:
    """
    切测度定理：r^{−1/α(u)}T_{u,r}^# M_α 的特征函数 → 冻结指数 α(u) 的特征函数

    Args:
        alpha: 索引函数
        u: 中心点
        functions: 紧支撑函数
        thetas: θ网格
        r_seq: 严格递减的 r 序列

    Returns:
        VerifyReport: 各 r 的sup偏差
    """
    r_values = list(settings.R_SEQUENCE if r_seq is None else r_seq)
    d = len(functions)
    grid = theta_grid(d) if thetas is None else np.asarray(thetas, dtype=float).reshape(-1, d)
    spec = quad or QuadratureSpec.from_settings()
    tolerance = settings.FINAL_TOLERANCE if final_tolerance is None else float(final_tolerance)
    diagnostic = log_continuity_diagnostic(alpha, (u - 0.5, u + 0.5), [r for r in r_values if r < 1.0] or [0.5])

    base = CfSpec(tuple(functions), tuple(grid[0]), alpha)
    deviations = []
    for r in r_values:
        worst = 0.0
        for row in grid:
            scaled, frozen = scaled_exponents(base.with_thetas(row), u, r, spec)
            worst = max(worst, abs(math.exp(-scaled) - math.exp(-frozen)))
        deviations.append(worst)
    verdict = trend_verdict(deviations, 10.0 * spec.abs_tol, tolerance)
    notes = ["有限 r 序列上的单调趋势诊断"]
    if not diagnostic.plausibly_satisfied:
        notes.append("α 在 u 邻域内未通过对数连续性诊断，定理的前提可能不成立")
    return VerifyReport(
        check='measure_scaling',
        statistics={'r_values': r_values, 'deviations': deviations, **verdict,
                    'log_continuity': diagnostic.to_dict()},
        thresholds={'final_tolerance': tolerance, 'trend_floor': 10.0 * spec.abs_tol},
        passed=verdict['non_increasing'] and verdict['final_small'],
        provenance={'alpha': alpha.to_config(), 'u': u, 'grid_points': int(grid.shape[0])},
        notes=notes,
    )


def sampler_law_check(alpha: float, scale: float, n: int, stream: RngStream,
                      thetas: Optional[np.ndarray] = None) -> VerifyReport:
    """
    稳定采样器的分布检验

    Args:
        alpha: 稳定指数
        scale: 尺度 σ
        n: 样本数
        stream: 随机流

    Returns:
        VerifyReport: ECF sup偏差；α = 2 另查方差 2σ²，α = 1 另查四分位距 2σ（±2%）
    """
    params = StableParams(alpha, scale)
    _check_samples(n)
    grid = (np.linspace(-settings.SAMPLER_THETA_SPAN, settings.SAMPLER_THETA_SPAN, settings.SAMPLER_THETA_POINTS)
            if thetas is None else np.asarray(thetas, dtype=float)).reshape(-1)
    samples = sample_stable_array(params, stream, n)
    estimate = ecf(samples, grid)
    deviation = estimate.sup_deviation(params.cf(grid))

    statistics = {'sup_deviation': deviation, 'n_samples': n, 'theta_grid': grid}
    thresholds = {'band': estimate.band}
    passed = deviation <= estimate.band
    if alpha == 2.0:
        ratio = float(np.var(samples)) / (2.0 * scale ** 2)
        statistics['variance_ratio'] = ratio
        thresholds['variance_ratio'] = [0.98, 1.02]
        passed = passed and abs(ratio - 1.0) <= 0.02
    if alpha == 1.0:
        q1, q3 = np.percentile(samples, [25.0, 75.0])
        ratio = float(q3 - q1) / (2.0 * scale)
        statistics['iqr_ratio'] = ratio
        thresholds['iqr_ratio'] = [0.98, 1.02]
        passed = passed and abs(ratio - 1.0) <= 0.02
    return VerifyReport(
        check='sampler_law',
        statistics=statistics,
        thresholds=thresholds,
        passed=passed,
        seed=stream.seed,
        provenance={'alpha': alpha, 'scale': scale, 'stream': stream.to_dict()},
    )


def calibrate_band(check: Callable[[int], VerifyReport], seeds: Sequence[int],
                   required_fraction: float = 0.99, show_progress: bool = True) -> VerifyReport:
    """
    零假设下的带宽校准：统计在多个种子上通过的比例

    Args:
        check: seed ↦ VerifyReport
        seeds: 种子列表
        required_fraction: 要求的通过比例

    Returns:
        VerifyReport: 通过比例
    """
    seeds = [int(s) for s in seeds]
    if not seeds:
        raise ValidationError("种子列表不能为空")
    outcomes = []
    name = "check"
    for seed in tqdm(seeds, desc="带宽校准", disable=not show_progress, leave=False):
        report = check(seed)
        name = report.check
        outcomes.append(report.passed)
    fraction = sum(outcomes) / len(outcomes)
    failed = [s for s, ok in zip(seeds, outcomes) if not ok]
    return VerifyReport(
        check=f'calibration:{name}',
        statistics={'pass_fraction': fraction, 'n_seeds': len(seeds), 'failed_seeds': failed},
        thresholds={'pass_fraction': required_fraction},
        passed=fraction >= required_fraction,
        provenance={'seeds': [seeds[0], seeds[-1]]},
    )
