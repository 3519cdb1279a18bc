#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
数值积分引擎模块

职责：
- 复合16点Gauss-Legendre积分，网格对齐断点与支撑端点
- 在声明的奇异点附近做代数加密，最内层单元几何细分并以幂律外推补偿
- 无界支撑按衰减标签生成几何尾部单元，剩余量低于截断阈值时停止
- 网格逐级加倍直到相邻两级估计之差满足容限
- 支持向量值被积函数：多个积分共享同一网格
"""

import math
from dataclasses import dataclass, field, replace
from typing import Callable, List, Optional, Sequence, Tuple
import logging

import numpy as np

from config.settings import settings
from modules.utils.exceptions import ValidationError, NumericError

logger = logging.getLogger(__name__)

GAUSS_ORDER = 16
_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(GAUSS_ORDER)

# 奇异点处几何细分的最小距离（相对于区段长度）
_INNER_DEPTH = 2.0 ** -40

# 奇异点处最小距离（相对于奇异点坐标，避免位置舍入）
_POSITION_FLOOR = 2.0 ** -36

# 每批生成的尾部单元数
_TAIL_BATCH = 64

# 单次求值的节点数上限
_EVAL_CHUNK = 1 << 20

Evaluator = Callable[[np.ndarray], np.ndarray]


@dataclass(frozen=True)
class QuadratureSpec:
    """积分网格与容限参数"""
    base_cells: int = 16
    grading_exponent: float = 4.0
    abs_tol: float = 1e-9
    rel_tol: float = 1e-9
    truncation_epsilon: float = 1e-12
    max_refinements: int = 12
    max_tail_cells: int = 20000

    def __post_init__(self):
        if self.base_cells < 16:
            raise ValidationError(f"基础单元数过少: {self.base_cells}", inequality="base_cells ≥ 16")
        if self.grading_exponent < 1.0:
            raise ValidationError(f"加密指数无效: {self.grading_exponent}", inequality="grading_exponent ≥ 1")
        for name in ('abs_tol', 'rel_tol', 'truncation_epsilon'):
            if not getattr(self, name) > 0:
                raise ValidationError(f"{name} 必须严格为正", inequality=f"{name} > 0")
        if self.max_refinements < 1 or self.max_tail_cells < 1:
            raise ValidationError("max_refinements 与 max_tail_cells 必须为正整数")

    @classmethod
    def from_settings(cls) -> 'QuadratureSpec':
        """从全局配置构造"""
        return cls(
            base_cells=settings.QUAD_BASE_CELLS,
            grading_exponent=settings.QUAD_GRADING_EXPONENT,
            abs_tol=settings.QUAD_ABS_TOL,
            rel_tol=settings.QUAD_REL_TOL,
            truncation_epsilon=settings.QUAD_TRUNCATION_EPSILON,
            max_refinements=settings.QUAD_MAX_REFINEMENTS,
            max_tail_cells=settings.QUAD_MAX_TAIL_CELLS,
        )

    def with_tolerance(self, tol: float) -> 'QuadratureSpec':
        """同时替换绝对与相对容限"""
        return replace(self, abs_tol=float(tol), rel_tol=float(tol))


@dataclass(frozen=True)
class DecayTag:
    """无界支撑的衰减标签：exponential 为 e^{-rate·d}，power 为 d^{-rate}（针对|f|）"""
    kind: str
    rate: float
    length: float = 1.0

    def __post_init__(self):
        if self.kind not in ('exponential', 'power'):
            raise ValidationError(f"未知的衰减类型: {self.kind}")
        if not (self.rate > 0 and self.length > 0):
            raise ValidationError("衰减速率与长度尺度必须为正", inequality="rate > 0, length > 0")

    def scaled(self, r: float) -> 'DecayTag':
        """坐标 x = u + r·z 下的衰减标签"""
        if self.kind == 'exponential':
            return DecayTag('exponential', self.rate * r, self.length / r)
        return DecayTag('power', self.rate, self.length / r)

    @staticmethod
    def slowest(tags: Sequence[Optional['DecayTag']]) -> Optional['DecayTag']:
        """多个衰减标签中最慢的一个"""
        tags = [t for t in tags if t is not None]
        if not tags:
            return None
        powers = [t for t in tags if t.kind == 'power']
        pool = powers or tags
        return DecayTag(pool[0].kind, min(t.rate for t in pool), max(t.length for t in pool))


@dataclass(frozen=True)
class MeshLayout:
    """网格元数据：支撑、断点、奇异点、衰减与特征尺度"""
    support: Tuple[float, float] = (-math.inf, math.inf)
    breakpoints: Tuple[float, ...] = ()
    singular_points: Tuple[float, ...] = ()
    decay: Optional[DecayTag] = None
    feature_scale: float = math.inf
    breakpoint_sources: Tuple[Callable[[float, float], np.ndarray], ...] = field(default=(), compare=False)

    @property
    def is_bounded(self) -> bool:
        return math.isfinite(self.support[0]) and math.isfinite(self.support[1])

    def merge(self, other: 'MeshLayout') -> 'MeshLayout':
        """合并两个布局（支撑取凸包）"""
        return MeshLayout(
            support=(min(self.support[0], other.support[0]), max(self.support[1], other.support[1])),
            breakpoints=tuple(sorted(set(self.breakpoints) | set(other.breakpoints))),
            singular_points=tuple(sorted(set(self.singular_points) | set(other.singular_points))),
            decay=DecayTag.slowest([self.decay, other.decay]),
            feature_scale=min(self.feature_scale, other.feature_scale),
            breakpoint_sources=self.breakpoint_sources + other.breakpoint_sources,
        )

    def with_sources(self, *sources: Callable[[float, float], np.ndarray]) -> 'MeshLayout':
        return replace(self, breakpoint_sources=self.breakpoint_sources + tuple(sources))

    def with_feature_scale(self, scale: float) -> 'MeshLayout':
        return replace(self, feature_scale=min(self.feature_scale, scale))


@dataclass
class QuadratureResult:
    """积分结果"""
    value: np.ndarray
    error_estimate: np.ndarray
    level: int
    n_evaluations: int
    tail_remainder: np.ndarray

    def scalar(self) -> float:
        return float(np.asarray(self.value).reshape(-1)[0])


@dataclass
class _Segment:
    lo: float
    hi: float
    singular_lo: bool = False
    singular_hi: bool = False

    @property
    def length(self) -> float:
        return self.hi - self.lo


class QuadratureEngine:
    """复合Gauss-Legendre积分引擎"""

    def __init__(self, spec: Optional[QuadratureSpec] = None):
        """
        初始化积分引擎

        Args:
            spec: 积分参数，默认从全局配置读取
        """
        self.spec = spec or QuadratureSpec.from_settings()

    # ------------------------------------------------------------------
    # 公共接口
    # ------------------------------------------------------------------

    def integrate(self, evaluator: Evaluator, layout: MeshLayout, level: Optional[int] = None) -> QuadratureResult:
        """
        计算 ∫F(x)dx，F可为标量或向量值（返回形状 (k, n)）

        Args:
            evaluator: 向量化被积函数
            layout: 网格元数据
            level: 指定网格层级时只在该层级计算一次，否则逐级加倍至收敛

        Returns:
            QuadratureResult: 积分值、误差估计与所用层级
        """
        if not math.isfinite(layout.support[0]) or not math.isfinite(layout.support[1]):
            if layout.decay is None:
                raise ValidationError("无界支撑必须给出衰减标签", inequality="decay tag required")
        if layout.support[1] <= layout.support[0]:
            zero = np.zeros(self._component_count(evaluator, layout.support[0]))
            return QuadratureResult(zero, zero.copy(), 0, 0, zero.copy())

        if level is not None:
            value, n_eval, tail = self._integrate_at_level(evaluator, layout, level)
            return QuadratureResult(value, np.zeros_like(value), level, n_eval, tail)

        previous = None
        history: List[np.ndarray] = []
        total_evals = 0
        for lvl in range(self.spec.max_refinements + 1):
            value, n_eval, tail = self._integrate_at_level(evaluator, layout, lvl)
            total_evals += n_eval
            history.append(value)
            if previous is not None:
                diff = np.abs(value - previous)
                tol = np.maximum(self.spec.abs_tol, self.spec.rel_tol * np.abs(value))
                if np.all(diff <= tol):
                    logger.debug(f"积分收敛: 层级 {lvl}, 求值次数 {total_evals}")
                    return QuadratureResult(value, diff, lvl, total_evals, tail)
            previous = value

        last_two = tuple(float(np.max(h)) for h in history[-2:])
        logger.error(f"积分在 {self.spec.max_refinements} 次加倍后仍未收敛")
        raise NumericError("积分未收敛", estimates=last_two)

    # ------------------------------------------------------------------
    # 网格构造
    # ------------------------------------------------------------------

    def _component_count(self, evaluator: Evaluator, x: float) -> int:
        with np.errstate(all='ignore'):
            probe = np.asarray(evaluator(np.array([x])))
        return 1 if probe.ndim <= 1 else probe.shape[0]

    def _segments(self, layout: MeshLayout) -> Tuple[List[_Segment], Optional[Tuple[float, float]], Optional[Tuple[float, float]]]:
        """切分有限核心区段，并返回左右尾部的起点与初始长度尺度"""
        lo, hi = layout.support
        finite_points = {p for p in layout.breakpoints if lo <= p <= hi and math.isfinite(p)}
        finite_points |= {p for p in layout.singular_points if lo <= p <= hi and math.isfinite(p)}
        finite_points |= {p for p in (lo, hi) if math.isfinite(p)}

        span = layout.decay.length if layout.decay is not None else 1.0
        if not finite_points:
            finite_points = {-span, span}
        core_lo, core_hi = min(finite_points), max(finite_points)

        for source in layout.breakpoint_sources:
            extra = np.asarray(source(core_lo, core_hi), dtype=float)
            finite_points |= {float(p) for p in extra if core_lo < p < core_hi}

        points = sorted(finite_points)
        singular = set(p for p in layout.singular_points if math.isfinite(p))

        segments: List[_Segment] = []
        left_tail = right_tail = None
        if not math.isfinite(lo):
            segments.append(_Segment(core_lo - span, core_lo, False, core_lo in singular))
            left_tail = (core_lo - span, span)
        for left, right in zip(points[:-1], points[1:]):
            if right > left:
                segments.append(_Segment(left, right, left in singular, right in singular))
        if not math.isfinite(hi):
            segments.append(_Segment(core_hi, core_hi + span, core_hi in singular, False))
            right_tail = (core_hi + span, span)
        return segments, left_tail, right_tail

    def _graded_distances(self, point: float, seg_len: float, m: int) -> np.ndarray:
        """
        距奇异点的单元端点距离（升序，不含0）

        代数加密 d_k = L·(k/m)^g，最内层单元再按2倍几何细分到最小距离；
        [0, d_0] 留给幂律外推。
        """
        dist = seg_len * (np.arange(1, m + 1) / m) ** self.spec.grading_exponent
        floor = max(seg_len * _INNER_DEPTH, abs(point) * _POSITION_FLOOR)
        inner = dist[0]
        depth = max(0, int(math.ceil(math.log2(inner / floor)))) if inner > floor else 0
        geometric = inner * 2.0 ** -np.arange(depth, 0, -1, dtype=float)
        return np.concatenate([geometric, dist])

    def _segment_cells(self, segment: _Segment, cells: int) -> Tuple[np.ndarray, List[Tuple[float, int, float]]]:
        """
        区段内的单元端点

        Returns:
            单元端点数组，以及需要幂律外推的 (奇异点, 方向, 外推长度) 列表
        """
        length = segment.length
        if segment.singular_lo and segment.singular_hi:
            mid = 0.5 * (segment.lo + segment.hi)
            half = max(cells // 2, 1)
            d_lo = self._graded_distances(segment.lo, 0.5 * length, half)
            d_hi = self._graded_distances(segment.hi, 0.5 * length, half)
            left = segment.lo + d_lo
            right = (segment.hi - d_hi)[::-1]
            left[-1] = mid
            edges = np.concatenate([left, right[1:]])
            return edges, [(segment.lo, +1, float(d_lo[0])), (segment.hi, -1, float(d_hi[0]))]
        if segment.singular_lo:
            d_lo = self._graded_distances(segment.lo, length, cells)
            edges = segment.lo + d_lo
            edges[-1] = segment.hi
            return edges, [(segment.lo, +1, float(d_lo[0]))]
        if segment.singular_hi:
            d_hi = self._graded_distances(segment.hi, length, cells)
            edges = (segment.hi - d_hi)[::-1]
            edges[0] = segment.lo
            return edges, [(segment.hi, -1, float(d_hi[0]))]
        return np.linspace(segment.lo, segment.hi, cells + 1), []

    # ------------------------------------------------------------------
    # 单层积分
    # ------------------------------------------------------------------

    def _evaluate(self, evaluator: Evaluator, x: np.ndarray) -> np.ndarray:
        """分块求值，输出统一为 (k, n)"""
        pieces = []
        for start in range(0, x.size, _EVAL_CHUNK):
            values = np.asarray(evaluator(x[start:start + _EVAL_CHUNK]), dtype=float)
            pieces.append(np.atleast_2d(values))
        return np.concatenate(pieces, axis=1) if len(pieces) > 1 else pieces[0]

    def _gauss_sum(self, evaluator: Evaluator, left: np.ndarray, right: np.ndarray) -> Tuple[np.ndarray, int]:
        """各单元的Gauss-Legendre贡献，返回 (逐单元贡献 (k, m), 求值数)"""
        half = 0.5 * (right - left)
        centre = 0.5 * (right + left)
        nodes = (centre[:, None] + half[:, None] * _GL_NODES[None, :]).reshape(-1)
        values = self._evaluate(evaluator, nodes)
        k = values.shape[0]
        values = values.reshape(k, left.size, GAUSS_ORDER)
        per_cell = np.sum(values * _GL_WEIGHTS[None, None, :], axis=2) * half[None, :]
        return per_cell, nodes.size

    def _power_remainder(self, evaluator: Evaluator, point: float, direction: int, delta: float) -> Tuple[np.ndarray, int]:
        """[point, point ± delta] 上按幂律 C·y^γ 外推的积分"""
        x = np.array([point + direction * delta, point + direction * 4.0 * delta])
        # 实际距离（浮点舍入后）
        y = np.abs(x - point)
        values = self._evaluate(evaluator, x)
        f1, f2 = values[:, 0], values[:, 1]
        crude = np.where(np.isfinite(f1), f1, 0.0) * delta
        with np.errstate(divide='ignore', invalid='ignore', over='ignore'):
            gamma = np.log(f2 / f1) / np.log(y[1] / y[0])
            fitted = f1 * y[0] / (gamma + 1.0) * (delta / y[0]) ** (gamma + 1.0)
        ok = (f1 > 0) & (f2 > 0) & np.isfinite(gamma) & (gamma > -1.0 + 1e-9) & np.isfinite(fitted)
        return np.where(ok, fitted, crude), 2

    def _tail_cells(self, start_width: float, span: float, decay: DecayTag,
                    feature_scale: float, count: int, distance: float, width: Optional[float]) -> Tuple[np.ndarray, np.ndarray, float, float]:
        """生成下一批尾部单元（距尾部起点的距离）"""
        lefts = np.empty(count)
        rights = np.empty(count)
        for i in range(count):
            d_far = distance + span
            if decay.kind == 'exponential':
                cap = min(feature_scale, 4.0 / decay.rate)
            else:
                cap = max(min(feature_scale, d_far / 4.0), d_far / 64.0)
            width = min(start_width, cap) if width is None else min(2.0 * width, cap)
            lefts[i] = distance
            rights[i] = distance + width
            distance += width
        return lefts, rights, distance, width

    def _tail(self, evaluator: Evaluator, start: float, direction: int, span: float,
              decay: DecayTag, feature_scale: float, level: int, k: int) -> Tuple[np.ndarray, np.ndarray, int]:
        """几何尾部：逐批生成单元直到外推剩余量低于截断阈值"""
        start_width = span / (self.spec.base_cells * 2.0 ** level)
        distance, width = 0.0, None
        total = np.zeros(k)
        contributions: List[float] = []
        n_eval = 0

        while True:
            if len(contributions) >= self.spec.max_tail_cells:
                logger.error(f"尾部单元数超过上限 {self.spec.max_tail_cells}")
                raise NumericError("尾部积分未截断：单元数超过上限", estimates=(float(np.max(total)),))
            d_l, d_r, distance, width = self._tail_cells(
                start_width, span, decay, feature_scale, _TAIL_BATCH, distance, width
            )
            if not math.isfinite(start + direction * distance) or distance > 1e300:
                logger.error("尾部积分超出浮点范围仍未截断")
                raise NumericError("尾部积分未截断：衰减过慢", estimates=(float(np.max(total)),))

            if direction > 0:
                a_, b_ = start + d_l, start + d_r
            else:
                a_, b_ = start - d_r, start - d_l
            per_cell, evals = self._gauss_sum(evaluator, a_, b_)
            n_eval += evals

            for j in range(per_cell.shape[1]):
                cell = per_cell[:, j]
                total = total + cell
                contributions.append(float(np.max(np.abs(cell))))
                remainder = self._tail_remainder(contributions, cell)
                if remainder is not None:
                    return total + remainder, remainder, n_eval

    def _tail_remainder(self, contributions: List[float], cell: np.ndarray) -> Optional[np.ndarray]:
        """最近单元贡献呈几何衰减且外推剩余量低于阈值时返回剩余量"""
        if len(contributions) < 4:
            return None
        recent = contributions[-4:]
        if all(c == 0.0 for c in recent[-3:]):
            return np.zeros_like(cell)
        if any(c == 0.0 for c in recent):
            return None
        q = max(recent[i + 1] / recent[i] for i in range(3))
        if q >= 1.0:
            return None
        remainder = cell * q / (1.0 - q)
        if np.max(np.abs(remainder)) <= self.spec.truncation_epsilon:
            return remainder
        return None

    def _integrate_at_level(self, evaluator: Evaluator, layout: MeshLayout, level: int) -> Tuple[np.ndarray, int, np.ndarray]:
        segments, left_tail, right_tail = self._segments(layout)
        total_length = sum(s.length for s in segments)

        edges_left, edges_right = [], []
        corrections: List[Tuple[float, int, float]] = []
        for segment in segments:
            cells = max(2, int(math.ceil(self.spec.base_cells * segment.length / total_length)))
            if math.isfinite(layout.feature_scale):
                cells = max(cells, int(math.ceil(segment.length / layout.feature_scale)))
            edges, singular_ends = self._segment_cells(segment, cells * 2 ** level)
            edges_left.append(edges[:-1])
            edges_right.append(edges[1:])
            corrections.extend(singular_ends)

        per_cell, n_eval = self._gauss_sum(evaluator, np.concatenate(edges_left), np.concatenate(edges_right))
        total = np.sum(per_cell, axis=1)
        k = total.shape[0]
        for point, direction, delta in corrections:
            remainder, evals = self._power_remainder(evaluator, point, direction, delta)
            total = total + remainder
            n_eval += evals

        tail_total = np.zeros(k)
        for tail, direction in ((left_tail, -1), (right_tail, +1)):
            if tail is None:
                continue
            start, span = tail
            tail_value, remainder, evals = self._tail(
                evaluator, start, direction, span, layout.decay, layout.feature_scale, level, k
            )
            total = total + tail_value
            tail_total = tail_total + remainder
            n_eval += evals
        return total, n_eval, tail_total


def integrate(evaluator: Evaluator, layout: MeshLayout, quad: Optional[QuadratureSpec] = None) -> QuadratureResult:
    """
    便捷函数：计算 ∫F(x)dx

    Args:
        evaluator: 向量化被积函数
        layout: 网格元数据
        quad: 积分参数

    Returns:
        QuadratureResult: 积分结果
    """
    return QuadratureEngine(quad).integrate(evaluator, layout)
