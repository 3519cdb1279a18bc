#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
函数空间范数模块

职责：
- 计算指数积分 ∫|f(x)|^{α(x)}dx 以及 ∫|f|^{a,b}dx
- 计算 ‖f‖_p 与变指数 Luxemburg 范数 ‖f‖_α
- 对数连续性诊断 sup|α(x+r) − α(x)|·|log r|
- 指数泛函的连续性缺口（族 g_r → k 时 ∫|g_r|^α → ∫|k|^α）
"""

import math
from dataclasses import dataclass, field
from typing import Callable, Dict, List, Optional, Sequence, Tuple
import logging

import numpy as np
from scipy.optimize import bisect

from config.settings import settings
from modules.spaces.index_function import IndexFunction
from modules.spaces.real_function import RealFunction
from modules.spaces.quadrature import QuadratureEngine, QuadratureSpec, MeshLayout
from modules.utils.exceptions import ValidationError, DomainError, NumericError

logger = logging.getLogger(__name__)


def _engine(quad: Optional[QuadratureSpec]) -> QuadratureEngine:
    return QuadratureEngine(quad or QuadratureSpec.from_settings())


def check_integrability(f: RealFunction, lowest: float, highest: float):
    """
    检查 |f|^p 对 p ∈ [lowest, highest] 可积

    Args:
        f: 被检查的函数
        lowest: 指数下界 a
        highest: 指数上界 b

    Raises:
        DomainError: 奇异指数·b ≤ −1 或幂律尾部 rate·a ≤ 1
    """
    for singularity in f.singularities:
        if singularity.exponent < 0 and singularity.exponent * highest <= -1.0:
            raise DomainError(
                f"函数 {f.name} 在 x={singularity.point:g} 处的奇异性不可积 "
                f"(指数 {singularity.exponent:g}, b={highest:g})",
                inequality="exponent·b > −1"
            )
    if f.decay is not None and f.decay.kind == 'power' and f.decay.rate * lowest <= 1.0:
        raise DomainError(
            f"函数 {f.name} 的幂律尾部不可积 (衰减 {f.decay.rate:g}, a={lowest:g})",
            inequality="rate·a > 1"
        )


def power_layout(f: RealFunction, alpha: Optional[IndexFunction] = None) -> MeshLayout:
    """|f|^{α} 的网格布局：合并 α 的断点与特征尺度"""
    layout = f.layout
    if alpha is not None:
        layout = layout.with_sources(alpha.breakpoints).with_feature_scale(alpha.feature_scale)
    return layout


def alpha_power_evaluator(f: RealFunction, alpha: IndexFunction) -> Callable[[np.ndarray], np.ndarray]:
    """x ↦ |f(x)|^{α(x)}"""
    def evaluate(x: np.ndarray) -> np.ndarray:
        return np.abs(f(x)) ** alpha(x)
    return evaluate


def integrate_alpha_power(f: RealFunction, alpha: IndexFunction, quad: Optional[QuadratureSpec] = None) -> float:
    """
    计算 ∫|f(x)|^{α(x)}dx

    Args:
        f: 属于 F_{a,b} 的函数
        alpha: 索引函数
        quad: 积分参数

    Returns:
        float: 非负积分值
    """
    if f.is_zero:
        return 0.0
    check_integrability(f, alpha.a, alpha.b)
    result = _engine(quad).integrate(alpha_power_evaluator(f, alpha), power_layout(f, alpha))
    return max(result.scalar(), 0.0)


def integrate_alpha_powers(functions: Sequence[RealFunction], alpha: IndexFunction,
                           quad: Optional[QuadratureSpec] = None) -> np.ndarray:
    """
    在同一网格上计算多个 ∫|f_j(x)|^{α(x)}dx

    Args:
        functions: 函数列表
        alpha: 索引函数
        quad: 积分参数

    Returns:
        np.ndarray: 各积分值
    """
    active = [f for f in functions if not f.is_zero]
    values = np.zeros(len(functions))
    if not active:
        return values
    layout = None
    for f in active:
        check_integrability(f, alpha.a, alpha.b)
        layout = f.layout if layout is None else layout.merge(f.layout)
    layout = layout.with_sources(alpha.breakpoints).with_feature_scale(alpha.feature_scale)

    def evaluate(x: np.ndarray) -> np.ndarray:
        a_x = alpha(x)
        return np.stack([np.abs(f(x)) ** a_x for f in active])

    result = _engine(quad).integrate(evaluate, layout)
    positions = [i for i, f in enumerate(functions) if not f.is_zero]
    values[positions] = np.maximum(np.asarray(result.value), 0.0)
    return values


def integrate_ab_power(f: RealFunction, a: float, b: float, quad: Optional[QuadratureSpec] = None) -> float:
    """
    计算 ∫|f|^{a,b}dx，其中 |y|^{a,b} = max(|y|^a, |y|^b)

    Args:
        f: 函数
        a: 指数下界
        b: 指数上界

    Returns:
        float: 积分值（有限即属于 F_{a,b}）
    """
    if not (0 < a <= b):
        raise ValidationError(f"指数界限无效: a={a}, b={b}", inequality="0 < a ≤ b")
    if f.is_zero:
        return 0.0
    check_integrability(f, a, b)

    def evaluate(x: np.ndarray) -> np.ndarray:
        y = np.abs(f(x))
        return np.maximum(y ** a, y ** b)

    return max(_engine(quad).integrate(evaluate, f.layout).scalar(), 0.0)


def norm_p(f: RealFunction, p: float, quad: Optional[QuadratureSpec] = None) -> float:
    """
    计算 ‖f‖_p = (∫|f|^p dx)^{1/p}

    Args:
        f: 函数
        p: 指数 p > 0

    Returns:
        float: 非负范数值
    """
    if not p > 0:
        raise ValidationError(f"p 必须为正: {p}", inequality="p > 0")
    if f.is_zero:
        return 0.0
    check_integrability(f, p, p)

    def evaluate(x: np.ndarray) -> np.ndarray:
        return np.abs(f(x)) ** p

    value = max(_engine(quad).integrate(evaluate, f.layout).scalar(), 0.0)
    return value ** (1.0 / p)


def luxemburg_norm(f: RealFunction, alpha: IndexFunction, quad: Optional[QuadratureSpec] = None) -> float:
    """
    变指数 Luxemburg 范数：满足 ρ(λ) = ∫|f/λ|^{α(x)}dx = 1 的唯一 λ

    先从 λ = 1 倍增/减半得到括号，再二分到相对宽度 root_rel_tol。
    f 几乎处处为零时按约定返回 0。

    Args:
        f: 属于 F_{a,b} 的函数
        alpha: 索引函数
        quad: 积分参数

    Returns:
        float: 范数值
    """
    if f.is_zero:
        return 0.0
    check_integrability(f, alpha.a, alpha.b)
    engine = _engine(quad)
    layout = power_layout(f, alpha)

    base = engine.integrate(alpha_power_evaluator(f, alpha), layout)
    if base.scalar() <= 0.0:
        return 0.0
    level = base.level

    def rho(lam: float) -> float:
        def evaluate(x: np.ndarray) -> np.ndarray:
            return np.abs(f(x) / lam) ** alpha(x)
        return engine.integrate(evaluate, layout, level=level).scalar()

    def excess(log_lam: float) -> float:
        return rho(math.exp(log_lam)) - 1.0

    # 在对数尺度上寻找括号
    max_power = settings.LUXEMBURG_MAX_SCALING_POWER
    value_at_one = base.scalar() - 1.0
    if value_at_one == 0.0:
        return 1.0
    step = math.log(2.0) if value_at_one > 0 else -math.log(2.0)
    lo = hi = 0.0
    for _ in range(max_power):
        hi = lo + step
        if (excess(hi) > 0) != (value_at_one > 0):
            break
        lo = hi
    else:
        logger.error(f"Luxemburg范数括号搜索在 2^±{max_power} 内失败")
        raise NumericError(f"Luxemburg范数括号未找到 (2^±{max_power})", estimates=(rho(math.exp(lo)),))

    left, right = min(lo, hi), max(lo, hi)
    # 对数尺度上的绝对宽度即λ的相对宽度
    root = bisect(excess, left, right, xtol=settings.LUXEMBURG_ROOT_REL_TOL, rtol=4 * np.finfo(float).eps,
                  maxiter=200)
    return math.exp(root)


@dataclass
class LogContinuityReport:
    """对数连续性诊断结果（数值诊断，不是证明）"""
    r_values: List[float]
    m_values: List[float]
    interval: Tuple[float, float]
    plausibly_satisfied: bool
    notes: List[str] = field(default_factory=list)

    def to_dict(self) -> Dict:
        return {
            'r_values': self.r_values,
            'm_values': self.m_values,
            'interval': list(self.interval),
            'plausibly_satisfied': self.plausibly_satisfied,
            'notes': self.notes,
        }


def log_continuity_diagnostic(alpha: IndexFunction, interval: Sequence[float],
                              r_values: Sequence[float]) -> LogContinuityReport:
    """
    对数连续性诊断 m(r) = sup_x |α(x + r) − α(x)|·|log r|

    m(r) 沿给定 r 序列单调不增时标记为"可能满足"；末值超过首值的 decay_ratio 倍时
    只在 notes 中提示衰减较慢。

    Args:
        alpha: 索引函数
        interval: 探测区间 [lo, hi]
        r_values: 严格递减、位于 (0, 1) 的 r 序列

    Returns:
        LogContinuityReport: 诊断结果
    """
    r_values = [float(r) for r in r_values]
    if not r_values:
        raise ValidationError("r 序列不能为空")
    if any(not (0.0 < r < 1.0) for r in r_values):
        raise ValidationError("r 必须位于 (0, 1)", inequality="0 < r < 1")
    if any(r2 >= r1 for r1, r2 in zip(r_values[:-1], r_values[1:])):
        raise ValidationError("r 序列必须严格递减", inequality="r_{k+1} < r_k")
    lo, hi = float(interval[0]), float(interval[1])
    if hi <= lo:
        raise ValidationError(f"探测区间无效: [{lo}, {hi}]", inequality="lo < hi")

    grid = np.linspace(lo, hi, settings.LOG_CONTINUITY_PROBE_POINTS)
    base = alpha(grid)
    m_values = [float(np.max(np.abs(alpha(grid + r) - base)) * abs(math.log(r))) for r in r_values]

    satisfied = all(m2 <= m1 for m1, m2 in zip(m_values[:-1], m_values[1:]))
    notes = ["有限 r 序列上的单调趋势诊断；o(1/log r) 是渐近性质，无法数值证明"]
    if m_values[0] > 0.0 and m_values[-1] > settings.LOG_CONTINUITY_DECAY_RATIO * m_values[0]:
        notes.append(f"m(r) 末值与首值之比 {m_values[-1] / m_values[0]:.3g}，衰减较慢")
    if not satisfied:
        logger.warning(f"对数连续性诊断未通过: m(r) = {m_values}")
    return LogContinuityReport(
        r_values=r_values,
        m_values=m_values,
        interval=(lo, hi),
        plausibly_satisfied=satisfied,
        notes=notes,
    )


def exponent_continuity_gap(g_family: Sequence[Tuple[float, RealFunction]], k: RealFunction,
                            alpha: IndexFunction, quad: Optional[QuadratureSpec] = None) -> List[Tuple[float, float, float]]:
    """
    指数泛函的连续性：g_r → k 时比较 ∫|g_r|^α 与 ∫|k|^α

    Args:
        g_family: (r, g_r) 列表
        k: 极限函数
        alpha: 索引函数
        quad: 积分参数

    Returns:
        List[Tuple]: (r, |∫|g_r|^α − ∫|k|^α|, ∫|g_r − k|^{a,b})
    """
    limit = integrate_alpha_power(k, alpha, quad)
    rows = []
    for r, g in g_family:
        value = integrate_alpha_power(g, alpha, quad)
        distance = integrate_ab_power(g - k, alpha.a, alpha.b, quad)
        rows.append((float(r), abs(value - limit), distance))
    return rows
