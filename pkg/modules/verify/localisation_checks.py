#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
局部化校验模块

职责：
- 局部化条件积分 ∫|D_t(z)·r^{1/α(u+rz) − h} − h(t,z)|^{a,b}dz，其中
  D_t(z) = f(u+rt, u+rz) − f(u, u+rz)，随 r → 0 递减到0
- r^{−h}(Y(u+rt) − Y(u)) 的精确特征函数与切过程特征函数比较：
  被积函数 |Σθ_j D_j(z)|^{α(u+rz)}·r^{1−hα(u+rz)} 与 |Σθ_j h(t_j,z)|^{α(u)} 在同一网格上积分
- 强局部化充分条件 ∫|D_{t,v}(z)·r^{1/α(u+rz) − h}|^{α(u+rz)}dz ≤ c₁|t − v|^{aη} 的诊断
- 所有检查确定性计算（无蒙特卡洛），结论以有限 r 序列上的单调趋势给出
"""

import math
from typing import Dict, List, Optional, Sequence, Tuple
import logging

import numpy as np

from config.settings import settings
from modules.spaces import IndexFunction, QuadratureEngine, QuadratureSpec, RealFunction, check_integrability
from modules.measure import zoomed_layout
from modules.process.kernels import LocalFormSpec, ProcessKernel
from modules.verify.report import VerifyReport, trend_verdict
from modules.utils.exceptions import ValidationError

logger = logging.getLogger(__name__)

# 强局部化比值趋势的相对容限
_RATIO_SLACK = 1e-6


def _check_r_sequence(r_seq: Optional[Sequence[float]]) -> List[float]:
    r_values = [float(r) for r in (settings.R_SEQUENCE if r_seq is None else r_seq)]
    if not r_values:
        raise ValidationError("r 序列不能为空")
    if any(not (0.0 < r <= 1.0) for r in r_values):
        raise ValidationError("r 必须位于 (0, 1]", inequality="0 < r ≤ 1")
    if any(r2 >= r1 for r1, r2 in zip(r_values, r_values[1:])):
        raise ValidationError("r 序列必须严格递减", inequality="r_{k+1} < r_k")
    return r_values


def _resolve(kernel: ProcessKernel, alpha: Optional[IndexFunction], u: float,
             local: Optional[LocalFormSpec]) -> Tuple[IndexFunction, LocalFormSpec]:
    alpha = kernel.alpha if alpha is None else alpha
    if alpha != kernel.alpha:
        raise ValidationError("检查的索引函数必须与核构造时的索引函数一致")
    return alpha, (kernel.local_form(u) if local is None else local)


def _quad(quad: Optional[QuadratureSpec]) -> QuadratureSpec:
    return quad or QuadratureSpec.from_settings()


def condition_integral(kernel: ProcessKernel, alpha: IndexFunction, u: float, h_exp: float,
                       local: LocalFormSpec, t: float, r: float, quad: Optional[QuadratureSpec] = None) -> float:
    """
    ∫|D_t(z)·r^{1/α(u+rz) − h} − h(t,z)|^{a,b}dz

    Args:
        kernel: 过程核
        alpha: 索引函数
        u: 中心点
        h_exp: 局部化指数 h
        local: 局部形式
        t: 探测时刻
        r: 缩放

    Returns:
        float: 条件积分值
    """
    difference = kernel.pullback_difference(u, r, t, 0.0)
    tangent = local.section(t)
    if difference.is_zero and tangent.is_zero:
        return 0.0
    a, b = alpha.a, alpha.b
    for f in (difference, tangent):
        if not f.is_zero:
            check_integrability(f, a, b)

    def evaluate(z: np.ndarray) -> np.ndarray:
        weight = r ** (1.0 / np.asarray(alpha(u + r * z), dtype=float) - h_exp)
        gap = np.abs(difference(z) * weight - tangent(z))
        return np.maximum(gap ** a, gap ** b)

    layout = RealFunction.linear_combination([1.0, 1.0], [difference, tangent]).layout
    result = QuadratureEngine(_quad(quad)).integrate(evaluate, zoomed_layout(layout, alpha, u, r))
    return max(result.scalar(), 0.0)


def localisability_condition_check(kernel: ProcessKernel, alpha: Optional[IndexFunction], u: float,
                                   h_exp: Optional[float] = None, local: Optional[LocalFormSpec] = None,
                                   t_probe: Sequence[float] = (0.5, 1.0), r_seq: Optional[Sequence[float]] = None,
                                   quad: Optional[QuadratureSpec] = None,
                                   final_tolerance: Optional[float] = None) -> VerifyReport:
    """
    局部化条件：条件积分随 r 递减且末值 < final_tolerance

    Args:
        kernel: 过程核
        alpha: 索引函数（默认取核的索引函数）
        u: 中心点
        h_exp: 局部化指数，默认取局部形式的指数
        local: 局部形式，默认取核在 u 处的局部形式
        t_probe: 探测时刻
        r_seq: 严格递减的 r 序列

    Returns:
        VerifyReport: 各 r 下各探测时刻中的最大条件积分
    """
    alpha, local = _resolve(kernel, alpha, u, local)
    h = local.h_exponent if h_exp is None else float(h_exp)
    r_values = _check_r_sequence(r_seq)
    spec = _quad(quad)
    tolerance = settings.FINAL_TOLERANCE if final_tolerance is None else float(final_tolerance)

    values = []
    for r in r_values:
        values.append(max(condition_integral(kernel, alpha, u, h, local, t, r, spec) for t in t_probe))
        logger.debug(f"局部化条件: r={r:g}, 值={values[-1]:.3e}")
    verdict = trend_verdict(values, 10.0 * spec.abs_tol, tolerance)
    return VerifyReport(
        check='localisability_condition',
        statistics={'r_values': r_values, 'values': values, **verdict},
        thresholds={'final_tolerance': tolerance, 'trend_floor': 10.0 * spec.abs_tol},
        passed=verdict['non_increasing'] and verdict['final_small'],
        provenance={'kernel': kernel.to_config(), 'alpha': alpha.to_config(), 'u': u, 'h': h,
                    'local_form': local.name, 't_probe': list(t_probe)},
        notes=["lim_{r→0} 为渐近性质，这里只给出有限 r 序列上的单调趋势诊断"],
    )


def localized_exponents(kernel: ProcessKernel, alpha: IndexFunction, u: float, h_exp: float,
                        local: LocalFormSpec, t_list: Sequence[float], thetas: Sequence[float], r: float,
                        quad: Optional[QuadratureSpec] = None) -> Tuple[float, float]:
    """
    同一网格上的 (缩放指数, 切过程指数)

    缩放指数 ∫|Σθ_j D_j(z)|^{α(u+rz)}·r^{1−hα(u+rz)}dz 对应 r^{−h}(Y(u+rt_j) − Y(u))_j；
    切过程指数 ∫|Σθ_j h(t_j,z)|^{α(u)}dz。
    """
    differences = [kernel.pullback_difference(u, r, t, 0.0) for t in t_list]
    tangents = [local.section(t) for t in t_list]
    combined = RealFunction.linear_combination(list(thetas), differences)
    tangent = RealFunction.linear_combination(list(thetas), tangents)
    if combined.is_zero and tangent.is_zero:
        return 0.0, 0.0
    for f in (combined, tangent):
        if not f.is_zero:
            check_integrability(f, alpha.a, alpha.b)
    frozen = local.frozen_alpha

    def evaluate(z: np.ndarray) -> np.ndarray:
        a_z = np.asarray(alpha(u + r * z), dtype=float)
        scaled = np.abs(combined(z)) ** a_z * r ** (1.0 - h_exp * a_z)
        return np.stack([scaled, np.abs(tangent(z)) ** frozen])

    layout = RealFunction.linear_combination([1.0, 1.0], [combined, tangent]).layout
    result = QuadratureEngine(_quad(quad)).integrate(evaluate, zoomed_layout(layout, alpha, u, r))
    value = np.maximum(np.asarray(result.value), 0.0)
    return float(value[0]), float(value[1])


def localize_cf_check(kernel: ProcessKernel, alpha: Optional[IndexFunction], u: float,
                      h_exp: Optional[float] = None, local: Optional[LocalFormSpec] = None,
                      t_list: Sequence[float] = (0.5, 1.0), theta_list: Optional[Sequence[Sequence[float]]] = None,
                      r_seq: Optional[Sequence[float]] = None, quad: Optional[QuadratureSpec] = None,
                      final_tolerance: Optional[float] = None) -> VerifyReport:
    """
    r^{−h}(Y(u+rt) − Y(u)) 的精确特征函数对比切过程特征函数

    Args:
        kernel: 过程核
        alpha: 索引函数
        u: 中心点
        h_exp: 局部化指数
        local: 局部形式
        t_list: 时刻 t_1..t_k
        theta_list: 形状 (K, k) 的θ向量，默认 {±1, ±2}·(1,…,1)
        r_seq: r 序列

    Returns:
        VerifyReport: 各 r 的sup偏差
    """
    alpha, local = _resolve(kernel, alpha, u, local)
    h = local.h_exponent if h_exp is None else float(h_exp)
    r_values = _check_r_sequence(r_seq)
    spec = _quad(quad)
    tolerance = settings.FINAL_TOLERANCE if final_tolerance is None else float(final_tolerance)
    k = len(t_list)
    if theta_list is None:
        grid = np.outer([-2.0, -1.0, 1.0, 2.0], np.ones(k))
    else:
        grid = np.asarray(theta_list, dtype=float).reshape(-1, k)

    deviations = []
    for r in r_values:
        worst = 0.0
        for row in grid:
            scaled, tangent = localized_exponents(kernel, alpha, u, h, local, t_list, row, r, spec)
            worst = max(worst, abs(math.exp(-scaled) - math.exp(-tangent)))
        deviations.append(worst)
        logger.debug(f"局部化特征函数: r={r:g}, 偏差={worst:.3e}")
    verdict = trend_verdict(deviations, 10.0 * spec.abs_tol, tolerance)
    return VerifyReport(
        check='localize_cf',
        statistics={'r_values': r_values, 'deviations': deviations, **verdict},
        thresholds={'final_tolerance': tolerance, 'trend_floor': 10.0 * spec.abs_tol},
        passed=verdict['non_increasing'] and verdict['final_small'],
        provenance={'kernel': kernel.to_config(), 'alpha': alpha.to_config(), 'u': u, 'h': h,
                    'local_form': local.name, 't_list': list(t_list), 'grid_points': int(grid.shape[0])},
        notes=["特征函数层面的确定性检验，不对缩放路径抽样"],
    )


def strong_condition_integral(kernel: ProcessKernel, alpha: IndexFunction, u: float, h_exp: float,
                              t: float, v: float, r: float, quad: Optional[QuadratureSpec] = None) -> float:
    """∫|D_{t,v}(z)·r^{1/α(u+rz) − h}|^{α(u+rz)}dz"""
    difference = kernel.pullback_difference(u, r, t, v)
    if difference.is_zero:
        return 0.0
    check_integrability(difference, alpha.a, alpha.b)

    def evaluate(z: np.ndarray) -> np.ndarray:
        a_z = np.asarray(alpha(u + r * z), dtype=float)
        return np.abs(difference(z) * r ** (1.0 / a_z - h_exp)) ** a_z

    result = QuadratureEngine(_quad(quad)).integrate(evaluate, zoomed_layout(difference.layout, alpha, u, r))
    return max(result.scalar(), 0.0)


def strong_localisability_diagnostic(kernel: ProcessKernel, alpha: Optional[IndexFunction], u: float,
                                     h_exp: Optional[float], eta: float, r_seq: Optional[Sequence[float]] = None,
                                     quad: Optional[QuadratureSpec] = None,
                                     interval: Sequence[float] = (0.0, 1.0), depth: int = 6) -> VerifyReport:
    """
    强局部化充分条件的诊断：对每个 r 拟合最小的 c₁，要求比值在最细间隔上不增长，
    且各 r 的 c₁ 相差不超过 strong_stability_factor 倍

    Args:
        kernel: 过程核
        alpha: 索引函数
        u: 中心点
        h_exp: 局部化指数，默认取局部形式的指数
        eta: η > 1/a
        r_seq: r 序列
        interval: (t, v) 点对所在区间
        depth: 间隔 δ_k = L·2^{-k} 的层数

    Returns:
        VerifyReport: 各 r 的 c₁ 与比值序列
    """
    alpha = kernel.alpha if alpha is None else alpha
    if alpha != kernel.alpha:
        raise ValidationError("检查的索引函数必须与核构造时的索引函数一致")
    h = kernel.local_form(u).h_exponent if h_exp is None else float(h_exp)
    a = alpha.a
    if not eta > 1.0 / a:
        raise ValidationError(f"η={eta} 必须大于 1/a={1.0 / a:.6g}", inequality="η > 1/a")
    r_values = _check_r_sequence(r_seq)
    spec = _quad(quad)
    lo, hi = float(interval[0]), float(interval[1])
    if not hi > lo:
        raise ValidationError(f"区间无效: [{lo}, {hi}]", inequality="lo < hi")
    exponent = a * eta
    length = hi - lo
    floor = 10.0 * spec.abs_tol

    c1_values: List[float] = []
    ratios: Dict[str, Dict[str, List[float]]] = {}
    trend_ok = True
    for r in r_values:
        per_anchor = {}
        c1 = 0.0
        for s in (lo, lo + 0.5 * length):
            series, slack = [], []
            for k in range(1, depth + 1):
                delta = length * 2.0 ** -k
                value = strong_condition_integral(kernel, alpha, u, h, s + delta, s, r, spec)
                series.append(value / delta ** exponent)
                slack.append(floor / delta ** exponent)
            c1 = max(c1, max(series))
            tail, tol = series[-3:], slack[-3:]
            if any(later > earlier * (1.0 + _RATIO_SLACK) + t for earlier, later, t in zip(tail, tail[1:], tol[1:])):
                trend_ok = False
            per_anchor[f"{s:g}"] = series
        c1_values.append(c1)
        ratios[f"{r:g}"] = per_anchor

    positive = [c for c in c1_values if c > 0]
    spread = max(positive) / min(positive) if positive else 1.0
    stable = math.isfinite(spread) and spread <= settings.STRONG_STABILITY_FACTOR
    notes = ["只诊断充分条件积分，不检验 C(ℝ) 上的分布收敛"]
    if not trend_ok:
        notes.append("比值在最细间隔上增长，c₁ 随细化发散")
    if not stable:
        notes.append(f"各 r 的 c₁ 相差 {spread:.3g} 倍")
    return VerifyReport(
        check='strong_localisability',
        statistics={'r_values': r_values, 'c1': c1_values, 'spread': spread, 'ratios': ratios,
                    'exponent': exponent},
        thresholds={'spread': settings.STRONG_STABILITY_FACTOR, 'ratio_non_increasing': True},
        passed=trend_ok and stable,
        provenance={'kernel': kernel.to_config(), 'alpha': alpha.to_config(), 'u': u, 'h': h, 'eta': eta,
                    'interval': [lo, hi], 'depth': depth},
        notes=notes,
    )
