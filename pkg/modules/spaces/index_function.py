#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
索引函数模块

职责：
- 表示随位置变化的稳定指数 α(x)，带上下界 [a, b] ⊆ (0, 2]
- 支持常数、仿射截断、正弦、分段常数、表格线性插值五个族
- 派生二进离散化 α_n（取单元左端点的值）与平移 β(x) = α(u + x)
- 构造时在探测网格上检查界限，求值时越界即报错
"""

import math
from dataclasses import dataclass, field
from typing import Any, Dict, Optional, Tuple, Union
import logging

import numpy as np

from config.settings import settings
from modules.utils.exceptions import ValidationError, ResourceLimitError

logger = logging.getLogger(__name__)

FAMILIES = (
    'constant',
    'affine-clamped',
    'sinusoidal',
    'piecewise-constant',
    'tabulated-linear-interp',
    'dyadic',
    'shifted',
)

# 求值时允许的界限误差
_BOUND_SLACK = 1e-12

# 单次请求返回的二进断点数上限
_MAX_DYADIC_BREAKPOINTS = 1 << 22

ArrayLike = Union[float, np.ndarray]


@dataclass(frozen=True)
class IndexFunction:
    """稳定指数函数 α(x)，a ≤ α(x) ≤ b"""
    family: str
    params: Dict[str, Any] = field(default_factory=dict)
    a: float = 1.0
    b: float = 1.0

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise ValidationError(f"未知的索引函数族: {self.family}", reference=f"可选: {', '.join(FAMILIES)}")
        if not (0.0 < self.a <= self.b <= 2.0):
            raise ValidationError(
                f"索引函数界限无效: a={self.a}, b={self.b}",
                inequality="0 < a ≤ b ≤ 2"
            )
        self._validate_params()
        self._probe_bounds()

    # ------------------------------------------------------------------
    # 构造
    # ------------------------------------------------------------------

    @classmethod
    def constant(cls, value: float) -> 'IndexFunction':
        """常数指数 α ≡ value"""
        return cls('constant', {'value': float(value)}, float(value), float(value))

    @classmethod
    def affine_clamped(cls, intercept: float, slope: float, a: float, b: float) -> 'IndexFunction':
        """仿射截断 α(x) = clip(intercept + slope·x, a, b)"""
        return cls('affine-clamped', {'intercept': float(intercept), 'slope': float(slope)}, float(a), float(b))

    @classmethod
    def sinusoidal(cls, mid: float, amp: float, period: float, a: float, b: float,
                   phase: float = 0.0) -> 'IndexFunction':
        """正弦 α(x) = mid + amp·sin(2πx/period + phase)"""
        return cls('sinusoidal', {'mid': float(mid), 'amp': float(amp), 'period': float(period),
                                  'phase': float(phase)}, float(a), float(b))

    @classmethod
    def piecewise_constant(cls, breaks, values, a: Optional[float] = None,
                           b: Optional[float] = None) -> 'IndexFunction':
        """分段常数：values[k] 作用于 [breaks[k-1], breaks[k])，两端常数外推"""
        values = [float(v) for v in values]
        return cls('piecewise-constant', {'breaks': [float(x) for x in breaks], 'values': values},
                   float(min(values) if a is None else a), float(max(values) if b is None else b))

    @classmethod
    def tabulated(cls, xs, alphas, a: Optional[float] = None, b: Optional[float] = None) -> 'IndexFunction':
        """表格线性插值，表外常数外推"""
        alphas = [float(v) for v in alphas]
        return cls('tabulated-linear-interp', {'xs': [float(x) for x in xs], 'alphas': alphas},
                   float(min(alphas) if a is None else a), float(max(alphas) if b is None else b))

    @classmethod
    def from_config(cls, config: Dict[str, Any]) -> 'IndexFunction':
        """
        从声明式配置构造

        Args:
            config: 如 {"family": "sinusoidal", "params": {"mid": 1.5, "amp": 0.3, "period": 2.0},
                    "a": 1.2, "b": 1.8}；表格族可直接给出 "xs" 与 "alphas"

        Returns:
            IndexFunction: 索引函数
        """
        if not isinstance(config, dict) or 'family' not in config:
            raise ValidationError("索引函数配置必须是包含family字段的对象")
        family = config['family']
        params = dict(config.get('params') or {})
        for key in ('xs', 'alphas', 'breaks', 'values', 'value'):
            if key in config and key not in params:
                params[key] = config[key]

        if family == 'constant':
            value = float(params['value'])
            return cls('constant', {'value': value}, float(config.get('a', value)), float(config.get('b', value)))
        if family == 'dyadic':
            base = params['base']
            base = base if isinstance(base, IndexFunction) else cls.from_config(base)
            return base.dyadic(int(params['level']))
        if family == 'shifted':
            base = params['base']
            base = base if isinstance(base, IndexFunction) else cls.from_config(base)
            return base.shifted(float(params['u']))
        if family == 'piecewise-constant':
            return cls.piecewise_constant(params['breaks'], params['values'], config.get('a'), config.get('b'))
        if family == 'tabulated-linear-interp':
            return cls.tabulated(params['xs'], params['alphas'], config.get('a'), config.get('b'))
        if 'a' not in config or 'b' not in config:
            raise ValidationError(f"非常数索引函数族 {family} 必须给出界限 a, b")
        return cls(family, {k: float(v) for k, v in params.items()}, float(config['a']), float(config['b']))

    def to_config(self) -> Dict[str, Any]:
        """导出为声明式配置"""
        params = dict(self.params)
        if 'base' in params:
            params['base'] = params['base'].to_config()
        return {'family': self.family, 'params': params, 'a': self.a, 'b': self.b}

    def dyadic(self, level: int) -> 'IndexFunction':
        """二进离散化 α_n(x) = α(r2^{-n})，x ∈ [r2^{-n}, (r+1)2^{-n})"""
        if level < 0:
            raise ValidationError(f"层级必须非负: {level}", inequality="n ≥ 0")
        return IndexFunction('dyadic', {'base': self, 'level': int(level)}, self.a, self.b)

    def shifted(self, u: float) -> 'IndexFunction':
        """平移 β(x) = α(u + x)"""
        return IndexFunction('shifted', {'base': self, 'u': float(u)}, self.a, self.b)

    # ------------------------------------------------------------------
    # 校验
    # ------------------------------------------------------------------

    def _validate_params(self):
        p = self.params
        try:
            if self.family == 'constant':
                value = float(p['value'])
                if not (0.0 < value <= 2.0):
                    raise ValidationError(f"常数指数超出范围: {value}", inequality="0 < α ≤ 2")
            elif self.family == 'affine-clamped':
                float(p['intercept']), float(p['slope'])
            elif self.family == 'sinusoidal':
                if float(p['period']) <= 0:
                    raise ValidationError("正弦周期必须为正", inequality="period > 0")
                float(p['mid']), float(p['amp'])
            elif self.family == 'piecewise-constant':
                breaks = np.asarray(p['breaks'], dtype=float)
                if len(p['values']) != len(breaks) + 1:
                    raise ValidationError("分段常数的取值个数必须比断点多一个",
                                          inequality="len(values) = len(breaks) + 1")
                if breaks.size and np.any(np.diff(breaks) <= 0):
                    raise ValidationError("分段断点必须严格递增")
            elif self.family == 'tabulated-linear-interp':
                xs = np.asarray(p['xs'], dtype=float)
                if xs.size < 2 or xs.size != len(p['alphas']):
                    raise ValidationError("表格需要至少两个节点且xs与alphas等长")
                if np.any(np.diff(xs) <= 0):
                    raise ValidationError("表格节点必须严格递增")
            elif self.family in ('dyadic', 'shifted'):
                if not isinstance(p.get('base'), IndexFunction):
                    raise ValidationError(f"{self.family} 族需要基础索引函数")
        except KeyError as e:
            raise ValidationError(f"索引函数族 {self.family} 缺少参数: {e}")

    def _probe_window(self) -> Tuple[float, float]:
        lo, hi = settings.INDEX_PROBE_WINDOW
        p = self.params
        if self.family == 'piecewise-constant' and p['breaks']:
            lo, hi = min(lo, p['breaks'][0] - 1.0), max(hi, p['breaks'][-1] + 1.0)
        elif self.family == 'tabulated-linear-interp':
            lo, hi = min(lo, p['xs'][0]), max(hi, p['xs'][-1])
        return lo, hi

    def _probe_bounds(self):
        """在探测网格上检查 a ≤ α(x) ≤ b"""
        lo, hi = self._probe_window()
        grid = np.linspace(lo, hi, settings.INDEX_PROBE_POINTS)
        if self.family == 'piecewise-constant':
            grid = np.concatenate([grid, np.asarray(self.params['breaks'], dtype=float)])
        elif self.family == 'tabulated-linear-interp':
            grid = np.concatenate([grid, np.asarray(self.params['xs'], dtype=float)])
        values = self._evaluate(grid)
        self._check_bounds(values, grid)

    def _check_bounds(self, values: np.ndarray, x: np.ndarray):
        bad = (values < self.a - _BOUND_SLACK) | (values > self.b + _BOUND_SLACK) | ~np.isfinite(values)
        if np.any(bad):
            idx = int(np.argmax(bad))
            x_bad = float(np.broadcast_to(x, values.shape).flat[idx])
            raise ValidationError(
                f"索引函数 {self.family} 在 x={x_bad:.6g} 处取值 {float(values.flat[idx]):.6g} 超出 [{self.a}, {self.b}]",
                inequality="a ≤ α(x) ≤ b"
            )

    # ------------------------------------------------------------------
    # 求值
    # ------------------------------------------------------------------

    def _evaluate(self, x: np.ndarray) -> np.ndarray:
        p = self.params
        if self.family == 'constant':
            return np.full(x.shape, p['value'], dtype=float)
        if self.family == 'affine-clamped':
            return np.clip(p['intercept'] + p['slope'] * x, self.a, self.b)
        if self.family == 'sinusoidal':
            return p['mid'] + p['amp'] * np.sin(2.0 * np.pi * x / p['period'] + p.get('phase', 0.0))
        if self.family == 'piecewise-constant':
            values = np.asarray(p['values'], dtype=float)
            return values[np.searchsorted(np.asarray(p['breaks'], dtype=float), x, side='right')]
        if self.family == 'tabulated-linear-interp':
            return np.interp(x, np.asarray(p['xs'], dtype=float), np.asarray(p['alphas'], dtype=float))
        if self.family == 'dyadic':
            scale = float(2 ** p['level'])
            return p['base']._evaluate(np.floor(x * scale) / scale)
        if self.family == 'shifted':
            return p['base']._evaluate(x + p['u'])
        raise ValidationError(f"未知的索引函数族: {self.family}")

    def __call__(self, x: ArrayLike) -> ArrayLike:
        """
        求值 α(x)

        Args:
            x: 标量或数组

        Returns:
            与输入形状相同的指数值
        """
        arr = np.asarray(x, dtype=float)
        values = self._evaluate(arr)
        self._check_bounds(values, arr)
        if np.ndim(x) == 0:
            return float(values)
        return values

    # ------------------------------------------------------------------
    # 网格元数据
    # ------------------------------------------------------------------

    @property
    def is_constant(self) -> bool:
        if self.family in ('dyadic', 'shifted'):
            return self.params['base'].is_constant
        return self.family == 'constant' or self.a == self.b

    @property
    def constant_value(self) -> Optional[float]:
        """常数指数的取值，非常数返回None"""
        if not self.is_constant:
            return None
        return float(self(0.0))

    @property
    def feature_scale(self) -> float:
        """积分网格单元宽度的上限提示"""
        if self.family == 'sinusoidal':
            return self.params['period'] / 16.0
        if self.family == 'shifted':
            return self.params['base'].feature_scale
        if self.family == 'dyadic':
            return self.params['base'].feature_scale
        return math.inf

    def breakpoints(self, lo: float, hi: float) -> np.ndarray:
        """
        [lo, hi] 内的跳跃点与折点

        Args:
            lo: 区间左端（有限）
            hi: 区间右端（有限）

        Returns:
            np.ndarray: 升序断点
        """
        if not (np.isfinite(lo) and np.isfinite(hi)) or hi <= lo:
            return np.empty(0)
        p = self.params
        if self.family == 'affine-clamped':
            points = []
            if p['slope'] != 0.0:
                points = [(self.a - p['intercept']) / p['slope'], (self.b - p['intercept']) / p['slope']]
            pts = np.asarray(points, dtype=float)
        elif self.family == 'piecewise-constant':
            pts = np.asarray(p['breaks'], dtype=float)
        elif self.family == 'tabulated-linear-interp':
            pts = np.asarray(p['xs'], dtype=float)
        elif self.family == 'dyadic':
            scale = float(2 ** p['level'])
            k_lo, k_hi = math.ceil(lo * scale), math.floor(hi * scale)
            count = k_hi - k_lo + 1
            if count > _MAX_DYADIC_BREAKPOINTS:
                raise ResourceLimitError(f"二进断点过多: {count} (层级 {p['level']}, 区间 [{lo}, {hi}])")
            pts = np.arange(k_lo, k_hi + 1, dtype=float) / scale
        elif self.family == 'shifted':
            pts = p['base'].breakpoints(lo + p['u'], hi + p['u']) - p['u']
        else:
            pts = np.empty(0)
        return np.unique(pts[(pts > lo) & (pts < hi)])

    def __str__(self) -> str:
        if self.family == 'constant':
            return f"IndexFunction(constant {self.params['value']})"
        return f"IndexFunction({self.family}, a={self.a}, b={self.b})"
