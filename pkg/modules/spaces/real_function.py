#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
实函数模块

职责：
- 表示带元数据的向量化实函数 f：支撑、断点、奇异点、衰减标签
- 提供线性组合、缩放与拉回 z ↦ f(u + r·z)，元数据随之变换
- 表示半开区间的有限并集（可测集 A），并生成其示性函数
"""

import math
from dataclasses import dataclass, replace
from typing import Any, Callable, Dict, Iterable, Iterator, List, Optional, Sequence, Tuple, Union
import logging

import numpy as np

from modules.spaces.quadrature import DecayTag, MeshLayout
from modules.utils.exceptions import ValidationError

logger = logging.getLogger(__name__)

ArrayLike = Union[float, np.ndarray]


@dataclass(frozen=True)
class Singularity:
    """奇异点：在 point 附近 |f(x)| ~ |x − point|^exponent"""
    point: float
    exponent: float

    def scaled(self, u: float, r: float) -> 'Singularity':
        return Singularity((self.point - u) / r, self.exponent)


class IntervalSet:
    """半开区间 [lo, hi) 的有限不交并"""

    def __init__(self, intervals: Iterable[Sequence[float]] = ()):
        pieces = []
        for item in intervals:
            lo, hi = float(item[0]), float(item[1])
            if not (math.isfinite(lo) and math.isfinite(hi)):
                raise ValidationError(f"集合必须有界: [{lo}, {hi})", inequality="-∞ < lo ≤ hi < ∞")
            if hi < lo:
                raise ValidationError(f"区间端点顺序错误: [{lo}, {hi})", inequality="lo ≤ hi")
            if hi > lo:
                pieces.append((lo, hi))
        pieces.sort()

        merged: List[Tuple[float, float]] = []
        for lo, hi in pieces:
            if merged and lo <= merged[-1][1]:
                merged[-1] = (merged[-1][0], max(merged[-1][1], hi))
            else:
                merged.append((lo, hi))
        self._intervals: Tuple[Tuple[float, float], ...] = tuple(merged)

    @classmethod
    def from_config(cls, config: Any) -> 'IntervalSet':
        """从 [[lo, hi], ...] 或 {"intervals": [[lo, hi], ...]} 构造"""
        if isinstance(config, IntervalSet):
            return config
        if isinstance(config, dict):
            config = config.get('intervals', [])
        return cls(config)

    @property
    def intervals(self) -> Tuple[Tuple[float, float], ...]:
        return self._intervals

    @property
    def is_empty(self) -> bool:
        return not self._intervals

    @property
    def measure(self) -> float:
        """Lebesgue测度"""
        return float(sum(hi - lo for lo, hi in self._intervals))

    @property
    def bounds(self) -> Tuple[float, float]:
        if self.is_empty:
            return (0.0, 0.0)
        return (self._intervals[0][0], self._intervals[-1][1])

    @property
    def edges(self) -> np.ndarray:
        return np.asarray([x for pair in self._intervals for x in pair], dtype=float)

    def overlap_length(self, other: 'IntervalSet') -> float:
        """两集合交集的长度"""
        total = 0.0
        for lo1, hi1 in self._intervals:
            for lo2, hi2 in other._intervals:
                total += max(0.0, min(hi1, hi2) - max(lo1, lo2))
        return total

    def union(self, other: 'IntervalSet') -> 'IntervalSet':
        return IntervalSet(self._intervals + other._intervals)

    def contains(self, x: np.ndarray) -> np.ndarray:
        """逐点判断 x ∈ A"""
        if self.is_empty:
            return np.zeros(np.shape(x), dtype=bool)
        idx = np.searchsorted(self.edges, x, side='right')
        return (idx % 2) == 1

    def indicator(self, value: float = 1.0) -> 'RealFunction':
        """示性函数 value·1_A"""
        return RealFunction.indicator(self, value)

    def to_config(self) -> List[List[float]]:
        return [[lo, hi] for lo, hi in self._intervals]

    def __iter__(self) -> Iterator[Tuple[float, float]]:
        return iter(self._intervals)

    def __len__(self) -> int:
        return len(self._intervals)

    def __eq__(self, other: object) -> bool:
        return isinstance(other, IntervalSet) and self._intervals == other._intervals

    def __repr__(self) -> str:
        inner = " ∪ ".join(f"[{lo:g}, {hi:g})" for lo, hi in self._intervals) or "∅"
        return f"IntervalSet({inner})"


@dataclass(frozen=True)
class RealFunction:
    """带支撑与奇异性元数据的实函数"""
    evaluator: Callable[[np.ndarray], np.ndarray]
    support: Tuple[float, float] = (-math.inf, math.inf)
    breakpoints: Tuple[float, ...] = ()
    singularities: Tuple[Singularity, ...] = ()
    decay: Optional[DecayTag] = None
    feature_scale: float = math.inf
    name: str = "f"
    is_zero: bool = False

    def __post_init__(self):
        lo, hi = self.support
        if hi < lo:
            raise ValidationError(f"支撑区间无效: [{lo}, {hi}]", inequality="x_lo ≤ x_hi")
        if not self.is_zero and not (math.isfinite(lo) and math.isfinite(hi)) and self.decay is None:
            raise ValidationError(f"函数 {self.name} 的支撑无界但未给出衰减标签", inequality="decay tag required")

    # ------------------------------------------------------------------
    # 构造
    # ------------------------------------------------------------------

    @classmethod
    def zero(cls) -> 'RealFunction':
        """恒零函数"""
        return cls(lambda x: np.zeros(np.shape(x)), (0.0, 0.0), name="0", is_zero=True)

    @classmethod
    def indicator(cls, intervals: Union[IntervalSet, Iterable[Sequence[float]]], value: float = 1.0) -> 'RealFunction':
        """
        示性函数 value·1_A，A为半开区间并集

        Args:
            intervals: 区间集合
            value: 取值

        Returns:
            RealFunction: 示性函数
        """
        intervals = intervals if isinstance(intervals, IntervalSet) else IntervalSet(intervals)
        value = float(value)
        if intervals.is_empty or value == 0.0:
            return cls.zero()

        def evaluate(x: np.ndarray) -> np.ndarray:
            return np.where(intervals.contains(x), value, 0.0)

        return cls(evaluate, intervals.bounds, tuple(intervals.edges.tolist()), name=f"{value:g}·1_{intervals!r}")

    @classmethod
    def exponential(cls, start: float, rate: float, scale: float = 1.0) -> 'RealFunction':
        """scale·e^{−rate(x − start)}·1_[start, ∞)"""
        if rate <= 0:
            raise ValidationError(f"指数衰减速率必须为正: {rate}", inequality="rate > 0")

        def evaluate(x: np.ndarray) -> np.ndarray:
            return scale * np.exp(-rate * (x - start))

        return cls(evaluate, (float(start), math.inf), (float(start),),
                   decay=DecayTag('exponential', rate, 1.0 / rate), name=f"exp(-{rate:g}(x-{start:g}))")

    @classmethod
    def power(cls, point: float, exponent: float, length: float, scale: float = 1.0) -> 'RealFunction':
        """scale·(x − point)^exponent 在 (point, point + length] 上，exponent 可为负（端点奇异）"""
        if length <= 0:
            raise ValidationError(f"幂函数支撑长度必须为正: {length}", inequality="length > 0")

        def evaluate(x: np.ndarray) -> np.ndarray:
            y = np.maximum(x - point, 0.0)
            with np.errstate(divide='ignore'):
                return np.where(y > 0, scale * y ** exponent, 0.0)

        return cls(evaluate, (float(point), float(point + length)),
                   singularities=(Singularity(float(point), float(exponent)),),
                   name=f"(x-{point:g})^{exponent:g}")

    @classmethod
    def from_callable(cls, fn: Callable[[np.ndarray], np.ndarray], lo: float, hi: float,
                      breakpoints: Sequence[float] = (), name: str = "f") -> 'RealFunction':
        """由任意向量化函数与有界支撑构造"""
        return cls(fn, (float(lo), float(hi)), tuple(float(b) for b in breakpoints), name=name)

    @classmethod
    def from_config(cls, config: Dict[str, Any]) -> 'RealFunction':
        """
        从声明式配置构造

        Args:
            config: {"family": "indicator", "intervals": [[0, 1]], "scale": 2}、
                    {"family": "exponential", "start": 0, "rate": 1} 或 {"family": "zero"}

        Returns:
            RealFunction: 实函数
        """
        family = config.get('family', 'indicator')
        scale = float(config.get('scale', 1.0))
        if family == 'indicator':
            return cls.indicator(IntervalSet.from_config(config.get('intervals', [])), scale)
        if family == 'exponential':
            return cls.exponential(float(config.get('start', 0.0)), float(config['rate']), scale)
        if family == 'power':
            return cls.power(float(config['point']), float(config['exponent']), float(config['length']), scale)
        if family == 'zero':
            return cls.zero()
        raise ValidationError(f"未知的实函数族: {family}", reference="可选: indicator, exponential, power, zero")

    # ------------------------------------------------------------------
    # 求值
    # ------------------------------------------------------------------

    def __call__(self, x: ArrayLike) -> ArrayLike:
        """求值 f(x)，支撑外为0"""
        arr = np.asarray(x, dtype=float)
        out = np.zeros(arr.shape)
        if not self.is_zero:
            lo, hi = self.support
            inside = (arr >= lo) & (arr <= hi)
            if np.any(inside):
                out[inside] = self.evaluator(arr[inside])
        if np.ndim(x) == 0:
            return float(out)
        return out

    @property
    def layout(self) -> MeshLayout:
        """积分网格元数据"""
        lo, hi = self.support
        points = set(self.breakpoints)
        points |= {p for p in (lo, hi) if math.isfinite(p)}
        return MeshLayout(
            support=self.support,
            breakpoints=tuple(sorted(points)),
            singular_points=tuple(sorted({s.point for s in self.singularities})),
            decay=self.decay,
            feature_scale=self.feature_scale,
        )

    @property
    def worst_singular_exponent(self) -> Optional[float]:
        """最负的奇异指数"""
        if not self.singularities:
            return None
        return min(s.exponent for s in self.singularities)

    # ------------------------------------------------------------------
    # 代数运算
    # ------------------------------------------------------------------

    def scaled(self, c: float) -> 'RealFunction':
        """c·f"""
        c = float(c)
        if c == 0.0 or self.is_zero:
            return RealFunction.zero()
        base = self.evaluator
        return replace(self, evaluator=lambda x: c * base(x), name=f"{c:g}·{self.name}")

    def __mul__(self, c: float) -> 'RealFunction':
        return self.scaled(c)

    __rmul__ = __mul__

    def __neg__(self) -> 'RealFunction':
        return self.scaled(-1.0)

    def __add__(self, other: 'RealFunction') -> 'RealFunction':
        return RealFunction.linear_combination([1.0, 1.0], [self, other])

    def __sub__(self, other: 'RealFunction') -> 'RealFunction':
        return RealFunction.linear_combination([1.0, -1.0], [self, other])

    @staticmethod
    def linear_combination(coefficients: Sequence[float], functions: Sequence['RealFunction']) -> 'RealFunction':
        """
        线性组合 Σ c_j·f_j

        Args:
            coefficients: 系数
            functions: 函数

        Returns:
            RealFunction: 组合函数，元数据取各分量的并
        """
        if len(coefficients) != len(functions):
            raise ValidationError("系数与函数个数不一致", inequality="len(coefficients) = len(functions)")
        terms = [(float(c), f) for c, f in zip(coefficients, functions) if c != 0.0 and not f.is_zero]
        if not terms:
            return RealFunction.zero()
        if len(terms) == 1 and terms[0][0] == 1.0:
            return terms[0][1]

        lo = min(f.support[0] for _, f in terms)
        hi = max(f.support[1] for _, f in terms)
        breakpoints = set()
        for _, f in terms:
            breakpoints |= set(f.breakpoints)
            breakpoints |= {p for p in f.support if math.isfinite(p)}
        worst = {}
        for _, f in terms:
            for s in f.singularities:
                worst[s.point] = min(worst.get(s.point, s.exponent), s.exponent)

        def evaluate(x: np.ndarray) -> np.ndarray:
            total = np.zeros(np.shape(x))
            for c, f in terms:
                total = total + c * f(x)
            return total

        return RealFunction(
            evaluate,
            (lo, hi),
            tuple(sorted(breakpoints)),
            tuple(Singularity(p, e) for p, e in sorted(worst.items())),
            DecayTag.slowest([f.decay for _, f in terms]),
            min(f.feature_scale for _, f in terms),
            name=" + ".join(f"{c:g}·{f.name}" for c, f in terms),
        )

    def restricted(self, lo: float, hi: float) -> 'RealFunction':
        """限制到 [lo, hi]，区间外为0"""
        new_lo, new_hi = max(lo, self.support[0]), min(hi, self.support[1])
        if self.is_zero or new_hi <= new_lo:
            return RealFunction.zero()
        return replace(self, support=(new_lo, new_hi))

    def pullback(self, u: float, r: float) -> 'RealFunction':
        """
        拉回 g(z) = f(u + r·z)

        Args:
            u: 平移
            r: 缩放（r > 0）

        Returns:
            RealFunction: z坐标下的函数
        """
        if r <= 0:
            raise ValidationError(f"缩放因子必须为正: {r}", inequality="r > 0")
        if self.is_zero:
            return self
        base = self.evaluator
        lo, hi = self.support
        return RealFunction(
            lambda z: base(u + r * z),
            ((lo - u) / r, (hi - u) / r),
            tuple((p - u) / r for p in self.breakpoints),
            tuple(s.scaled(u, r) for s in self.singularities),
            self.decay.scaled(r) if self.decay is not None else None,
            self.feature_scale / r,
            name=f"{self.name}∘({u:g}+{r:g}z)",
        )
