#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
过程核模块

职责：
- 表示 Y(t) = ∫f(t,x)dM_α(x) 的核 f(t,x)：加权多稳定Lévy运动、多稳定反向OU运动、
  线性分数多稳定运动（LFMM）以及自定义核
- 构造时按各自的参数假设校验，错误信息给出被违反的不等式
- 截面 x ↦ f(t,x) 作为带奇异性与衰减元数据的 RealFunction
- 在 z 坐标下精确计算 f(u+rt, u+rz) − f(u+rv, u+rz)（LFMM中 (−x) 项精确抵消）
- 给出各核在 u 处的局部形式（切过程核与指数 h）
"""

import math
from dataclasses import dataclass, field
from typing import Any, Callable, Dict, Optional, Tuple
import logging

import numpy as np

from modules.spaces import DecayTag, IndexFunction, IntervalSet, RealFunction, Singularity
from modules.utils.exceptions import ValidationError

logger = logging.getLogger(__name__)

KERNEL_KINDS = ('weighted_levy', 'reverse_ou', 'lfmm', 'custom')

_KIND_ALIASES = {
    'levy': 'weighted_levy',
    'weighted-levy': 'weighted_levy',
    'rou': 'reverse_ou',
    'reverse-ou': 'reverse_ou',
    'ou': 'reverse_ou',
}

# 反向OU要求 α 连续
_DISCONTINUOUS_FAMILIES = ('piecewise-constant', 'dyadic')


def _pos_pow(y: np.ndarray, exponent: np.ndarray) -> np.ndarray:
    """(y)_+^H，约定 H = 0 时为 1_{y>0}"""
    y = np.asarray(y, dtype=float)
    exponent = np.broadcast_to(np.asarray(exponent, dtype=float), y.shape)
    out = np.zeros(y.shape)
    mask = y > 0
    out[mask] = y[mask] ** exponent[mask]
    return out


def signed_indicator(t: float, value: float = 1.0) -> RealFunction:
    """value·1_[0,t)，t < 0 时取 −value·1_[t,0)"""
    t = float(t)
    if t == 0.0 or value == 0.0:
        return RealFunction.zero()
    if t > 0:
        return RealFunction.indicator(IntervalSet([(0.0, t)]), value)
    return RealFunction.indicator(IntervalSet([(t, 0.0)]), -value)


@dataclass(frozen=True)
class WeightFunction:
    """加权Lévy运动的连续权函数 w(x)"""
    kind: str = 'constant'
    params: Dict[str, float] = field(default_factory=lambda: {'value': 1.0})

    def __post_init__(self):
        required = {'constant': ('value',), 'affine': ('intercept', 'slope'),
                    'sinusoidal': ('mid', 'amp', 'period')}
        if self.kind not in required:
            raise ValidationError(f"未知的权函数类型: {self.kind}", reference="可选: constant, affine, sinusoidal")
        missing = [k for k in required[self.kind] if k not in self.params]
        if missing:
            raise ValidationError(f"权函数缺少参数: {missing}")
        if self.kind == 'sinusoidal' and not self.params['period'] > 0:
            raise ValidationError("权函数周期必须为正", inequality="period > 0")

    @classmethod
    def from_config(cls, config: Optional[Dict[str, Any]]) -> 'WeightFunction':
        if not config:
            return cls()
        params = {k: float(v) for k, v in config.items() if k not in ('kind', 'family')}
        return cls(config.get('kind', config.get('family', 'constant')), params)

    def to_config(self) -> Dict[str, Any]:
        return {'kind': self.kind, **self.params}

    def __call__(self, x: np.ndarray) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        p = self.params
        if self.kind == 'constant':
            return np.full(x.shape, p['value'])
        if self.kind == 'affine':
            return p['intercept'] + p['slope'] * x
        return p['mid'] + p['amp'] * np.sin(2.0 * np.pi * x / p['period'])

    @property
    def feature_scale(self) -> float:
        if self.kind == 'sinusoidal':
            return self.params['period'] / 16.0
        return math.inf


@dataclass(frozen=True)
class LocalFormSpec:
    """局部形式：指数 h、切过程核 z ↦ h(t,z) 与冻结指数 α(u)"""
    h_exponent: float
    local_kernel: Callable[[float], RealFunction]
    frozen_alpha: float
    name: str = "local"

    def section(self, t: float) -> RealFunction:
        return self.local_kernel(float(t))


class ProcessKernel:
    """
    过程核基类

    子类实现 section(t)；pullback_difference 默认由两个截面的拉回相减得到。
    """

    kind = 'custom'

    def __init__(self, alpha: IndexFunction):
        self.alpha = alpha

    def section(self, t: float) -> RealFunction:
        raise NotImplementedError

    def __call__(self, t: float, x: np.ndarray) -> np.ndarray:
        return self.section(t)(x)

    def pullback_difference(self, u: float, r: float, t: float, v: float) -> RealFunction:
        """
        z 坐标下的增量 z ↦ f(u+rt, u+rz) − f(u+rv, u+rz)

        Args:
            u: 中心点
            r: 缩放 r > 0
            t, v: 两个时间（z 坐标）

        Returns:
            RealFunction: z 坐标下的函数
        """
        if not r > 0:
            raise ValidationError(f"缩放因子必须为正: {r}", inequality="r > 0")
        return RealFunction.linear_combination(
            [1.0, -1.0],
            [self.section(u + r * t).pullback(u, r), self.section(u + r * v).pullback(u, r)],
        )

    def local_form(self, u: float) -> LocalFormSpec:
        raise ValidationError(f"核 {self.kind} 没有已知的局部形式")

    def to_config(self) -> Dict[str, Any]:
        return {'kind': self.kind}

    def __repr__(self) -> str:
        return f"{type(self).__name__}({self.to_config()})"


class WeightedLevyKernel(ProcessKernel):
    """加权多稳定Lévy运动 f(t,x) = w(x)·1_[0,t](x)，t < 0 时取 −w(x)·1_[t,0](x)"""

    kind = 'weighted_levy'

    def __init__(self, alpha: IndexFunction, weight: Optional[WeightFunction] = None):
        super().__init__(alpha)
        self.weight = weight or WeightFunction()

    def section(self, t: float) -> RealFunction:
        t = float(t)
        if t == 0.0:
            return RealFunction.zero()
        sign = 1.0 if t > 0 else -1.0
        weight = self.weight
        lo, hi = min(0.0, t), max(0.0, t)
        return RealFunction(lambda x: sign * weight(x), (lo, hi), (lo, hi),
                            feature_scale=weight.feature_scale, name=f"w·1[0,{t:g}]")

    def pullback_difference(self, u: float, r: float, t: float, v: float) -> RealFunction:
        """w(u+rz)·sign(t−v)·1_[min(t,v), max(t,v)](z)"""
        if not r > 0:
            raise ValidationError(f"缩放因子必须为正: {r}", inequality="r > 0")
        t, v = float(t), float(v)
        if t == v:
            return RealFunction.zero()
        sign = 1.0 if t > v else -1.0
        weight = self.weight
        lo, hi = min(t, v), max(t, v)
        return RealFunction(lambda z: sign * weight(u + r * z), (lo, hi), (lo, hi),
                            feature_scale=weight.feature_scale / r, name=f"Δlevy[{v:g},{t:g}]")

    def local_form(self, u: float) -> LocalFormSpec:
        """w(u)·1_[0,t]，h = 1/α(u)"""
        frozen = float(self.alpha(u))
        w_u = float(self.weight(np.asarray([u]))[0])
        if w_u == 0.0:
            logger.warning(f"权函数在 u={u} 处为0，局部形式退化")
        return LocalFormSpec(1.0 / frozen, lambda t: signed_indicator(t, w_u), frozen, name="w(u)·1[0,t]")

    def to_config(self) -> Dict[str, Any]:
        return {'kind': self.kind, 'weight': self.weight.to_config()}


class ReverseOUKernel(ProcessKernel):
    """多稳定反向OU运动 f(t,x) = exp(−λ(x − t))·1_[t,∞)(x)"""

    kind = 'reverse_ou'

    def __init__(self, alpha: IndexFunction, rate: float):
        super().__init__(alpha)
        rate = float(rate)
        if not rate > 0:
            raise ValidationError(f"OU速率必须为正: {rate}", inequality="λ > 0")
        a, b = alpha.a, alpha.b
        if not (1.0 < math.sqrt(b) < a <= b <= 2.0):
            raise ValidationError(
                f"反向OU运动的指数界不满足条件: a={a}, b={b}, √b={math.sqrt(b):.6g}",
                inequality="1 < √b < a ≤ b ≤ 2",
            )
        if alpha.family in _DISCONTINUOUS_FAMILIES and not alpha.is_constant:
            raise ValidationError(f"反向OU运动要求 α 连续，当前族: {alpha.family}", inequality="α continuous")
        self.rate = rate

    def section(self, t: float) -> RealFunction:
        return RealFunction.exponential(float(t), self.rate)

    def pullback_difference(self, u: float, r: float, t: float, v: float) -> RealFunction:
        """e^{−λr(z−t)}·1_{z≥t} − e^{−λr(z−v)}·1_{z≥v}"""
        if not r > 0:
            raise ValidationError(f"缩放因子必须为正: {r}", inequality="r > 0")
        t, v = float(t), float(v)
        if t == v:
            return RealFunction.zero()
        k = self.rate * r

        def evaluate(z: np.ndarray) -> np.ndarray:
            z = np.asarray(z, dtype=float)
            first = np.where(z >= t, np.exp(-k * np.maximum(z - t, 0.0)), 0.0)
            second = np.where(z >= v, np.exp(-k * np.maximum(z - v, 0.0)), 0.0)
            return first - second

        lo = min(t, v)
        return RealFunction(evaluate, (lo, math.inf), (t, v) if t < v else (v, t),
                            decay=DecayTag('exponential', k, 1.0 / k), name=f"Δou[{v:g},{t:g}]")

    def local_form(self, u: float) -> LocalFormSpec:
        """−1_[0,t)，h = 1/α(u)"""
        frozen = float(self.alpha(u))
        return LocalFormSpec(1.0 / frozen, lambda t: signed_indicator(t, -1.0), frozen, name="-1[0,t]")

    def to_config(self) -> Dict[str, Any]:
        return {'kind': self.kind, 'rate': self.rate}


class LfmmKernel(ProcessKernel):
    """
    线性分数多稳定运动

    f(t,x) = b⁺[(t−x)_+^H − (−x)_+^H] + b⁻[(t−x)_-^H − (−x)_-^H]，H = h − 1/α(x)；
    H = 0 时按约定退化为 (b⁺ − b⁻)·(±1_[0,t])。
    """

    kind = 'lfmm'

    def __init__(self, alpha: IndexFunction, h: float, b_plus: float = 1.0, b_minus: float = 0.0):
        super().__init__(alpha)
        h, b_plus, b_minus = float(h), float(b_plus), float(b_minus)
        a, b = alpha.a, alpha.b
        lower, upper = 1.0 / a - 1.0 / b, 1.0 + 1.0 / b - 1.0 / a
        if not (lower < h < upper):
            raise ValidationError(
                f"LFMM的 h={h} 不在允许范围 ({lower:.6g}, {upper:.6g}) 内 (a={a}, b={b})",
                inequality="1/a − 1/b < h < 1 + 1/b − 1/a",
            )
        if b_plus == 0.0 and b_minus == 0.0:
            raise ValidationError("b⁺ 与 b⁻ 不能同时为0", inequality="(b⁺, b⁻) ≠ (0, 0)")
        self.h = h
        self.b_plus = b_plus
        self.b_minus = b_minus

    @property
    def singular_exponent(self) -> float:
        """|f| 在 x = t 与 x = 0 附近的最坏指数 h − 1/a"""
        return self.h - 1.0 / self.alpha.a

    @property
    def decay_rate(self) -> float:
        """|f(t,x)| ~ |x|^{−(1 + 1/b − h)}"""
        return 1.0 + 1.0 / self.alpha.b - self.h

    def _exponent(self, x: np.ndarray) -> np.ndarray:
        return self.h - 1.0 / np.asarray(self.alpha(x), dtype=float)

    def _support(self, *points: float) -> Tuple[float, float]:
        """b⁻ = 0 时在 max(points) 右侧为零，b⁺ = 0 时在 min(points) 左侧为零"""
        lo = min(points) if self.b_plus == 0.0 else -math.inf
        hi = max(points) if self.b_minus == 0.0 else math.inf
        return lo, hi

    def section(self, t: float) -> RealFunction:
        t = float(t)
        if t == 0.0:
            return RealFunction.zero()
        b_plus, b_minus = self.b_plus, self.b_minus

        def evaluate(x: np.ndarray) -> np.ndarray:
            x = np.asarray(x, dtype=float)
            H = self._exponent(x)
            out = np.zeros(x.shape)
            if b_plus != 0.0:
                out += b_plus * (_pos_pow(t - x, H) - _pos_pow(-x, H))
            if b_minus != 0.0:
                out += b_minus * (_pos_pow(x - t, H) - _pos_pow(x, H))
            return out

        points = tuple(sorted({0.0, t}))
        return RealFunction(
            evaluate, self._support(0.0, t), points,
            tuple(Singularity(p, self.singular_exponent) for p in points),
            DecayTag('power', self.decay_rate, max(abs(t), 1.0)),
            self.alpha.feature_scale,
            name=f"lfmm(t={t:g})",
        )

    def pullback_difference(self, u: float, r: float, t: float, v: float) -> RealFunction:
        """r^H·{b⁺[(t−z)_+^H − (v−z)_+^H] + b⁻[(t−z)_-^H − (v−z)_-^H]}，H = h − 1/α(u+rz)"""
        if not r > 0:
            raise ValidationError(f"缩放因子必须为正: {r}", inequality="r > 0")
        t, v = float(t), float(v)
        if t == v:
            return RealFunction.zero()
        b_plus, b_minus = self.b_plus, self.b_minus

        def evaluate(z: np.ndarray) -> np.ndarray:
            z = np.asarray(z, dtype=float)
            H = self._exponent(u + r * z)
            out = np.zeros(z.shape)
            if b_plus != 0.0:
                out += b_plus * (_pos_pow(t - z, H) - _pos_pow(v - z, H))
            if b_minus != 0.0:
                out += b_minus * (_pos_pow(z - t, H) - _pos_pow(z - v, H))
            return out * r ** H

        points = tuple(sorted({t, v}))
        return RealFunction(
            evaluate, self._support(t, v), points,
            tuple(Singularity(p, self.singular_exponent) for p in points),
            DecayTag('power', self.decay_rate, max(abs(t), abs(v), 1.0)),
            self.alpha.feature_scale / r,
            name=f"Δlfmm[{v:g},{t:g}]",
        )

    def local_form(self, u: float) -> LocalFormSpec:
        """ρ_{α(u),h}(b⁺, b⁻, t, ·)，指数 h"""
        frozen = float(self.alpha(u))
        tangent = LfmmKernel(IndexFunction.constant(frozen), self.h, self.b_plus, self.b_minus)
        return LocalFormSpec(self.h, tangent.section, frozen, name=f"lfmm(α={frozen:g})")

    def to_config(self) -> Dict[str, Any]:
        return {'kind': self.kind, 'h': self.h, 'b_plus': self.b_plus, 'b_minus': self.b_minus}


class CustomKernel(ProcessKernel):
    """由截面工厂 t ↦ f(t,·) 给出的自定义核"""

    kind = 'custom'

    def __init__(self, alpha: IndexFunction, section_factory: Callable[[float], RealFunction],
                 local_form_factory: Optional[Callable[[float], LocalFormSpec]] = None, name: str = "custom"):
        super().__init__(alpha)
        if not callable(section_factory):
            raise ValidationError("自定义核需要可调用的截面工厂 section")
        self._section_factory = section_factory
        self._local_form_factory = local_form_factory
        self.name = name

    def section(self, t: float) -> RealFunction:
        return self._section_factory(float(t))

    def local_form(self, u: float) -> LocalFormSpec:
        if self._local_form_factory is None:
            return super().local_form(u)
        return self._local_form_factory(u)

    def to_config(self) -> Dict[str, Any]:
        return {'kind': self.kind, 'name': self.name}


def normalize_kind(kind: str) -> str:
    kind = str(kind).strip().lower()
    kind = _KIND_ALIASES.get(kind, kind)
    if kind not in KERNEL_KINDS:
        raise ValidationError(f"未知的过程核类型: {kind}", reference=f"可选: {', '.join(KERNEL_KINDS)}")
    return kind


def make_kernel(kind: str, params: Optional[Dict[str, Any]], alpha: IndexFunction) -> ProcessKernel:
    """
    构造并校验过程核

    Args:
        kind: weighted_levy | reverse_ou | lfmm | custom（接受 levy、rou 等别名）
        params: 核参数，如 {"h": 0.7, "b_plus": 1, "b_minus": 0}、{"rate": 1.0}、
                {"weight": {"kind": "constant", "value": 1}}、{"section": callable}
        alpha: 索引函数

    Returns:
        ProcessKernel: 已校验的核
    """
    params = dict(params or {})
    kind = normalize_kind(kind)
    if kind == 'weighted_levy':
        kernel = WeightedLevyKernel(alpha, WeightFunction.from_config(params.get('weight')))
    elif kind == 'reverse_ou':
        kernel = ReverseOUKernel(alpha, params.get('rate', params.get('lambda', 1.0)))
    elif kind == 'lfmm':
        if 'h' not in params:
            raise ValidationError("LFMM需要参数 h")
        kernel = LfmmKernel(alpha, params['h'], params.get('b_plus', 1.0), params.get('b_minus', 0.0))
    else:
        kernel = CustomKernel(alpha, params.get('section'), params.get('local_form'), params.get('name', 'custom'))
    logger.info(f"构造过程核: {kernel!r}, α={alpha}")
    return kernel
