#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
特征函数模块

职责：
- 多稳定积分的联合特征函数 exp(−∫|Σθ_j f_j(x)|^{α(x)}dx)
- 缩放测度 T_{u,r}^# 的特征函数：换元 x = u + r·z 后的被积函数
  |Σθ_j f_j(z)|^{α(u+rz)}·r^{1 − α(u+rz)/α(u)}
- 缩放指数与冻结指数 α(u) 的指数积分在同一网格上计算
"""

import math
from dataclasses import dataclass
from typing import Any, Dict, List, Optional, Sequence, Tuple
import logging

import numpy as np

from modules.spaces import (
    IndexFunction,
    RealFunction,
    QuadratureEngine,
    QuadratureSpec,
    MeshLayout,
    integrate_alpha_power,
    check_integrability,
)
from modules.utils.exceptions import ValidationError

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class CfSpec:
    """一次联合特征函数求值：函数 f_1..f_d、参数 θ_1..θ_d 与索引函数"""
    functions: Tuple[RealFunction, ...]
    thetas: Tuple[float, ...]
    alpha: IndexFunction

    def __post_init__(self):
        if len(self.functions) == 0:
            raise ValidationError("CfSpec至少需要一个函数", inequality="d ≥ 1")
        if len(self.functions) != len(self.thetas):
            raise ValidationError(
                f"函数个数 {len(self.functions)} 与θ个数 {len(self.thetas)} 不一致",
                inequality="len(functions) = len(thetas)"
            )
        object.__setattr__(self, 'functions', tuple(self.functions))
        object.__setattr__(self, 'thetas', tuple(float(t) for t in self.thetas))

    @property
    def dimension(self) -> int:
        return len(self.functions)

    def combination(self) -> RealFunction:
        """Σθ_j f_j"""
        return RealFunction.linear_combination(self.thetas, self.functions)

    def with_thetas(self, thetas: Sequence[float]) -> 'CfSpec':
        return CfSpec(self.functions, tuple(thetas), self.alpha)

    def with_alpha(self, alpha: IndexFunction) -> 'CfSpec':
        return CfSpec(self.functions, self.thetas, alpha)

    @classmethod
    def from_config(cls, config: Dict[str, Any]) -> 'CfSpec':
        """从 {"functions": [...], "thetas": [...], "alpha": {...}} 构造"""
        functions = [RealFunction.from_config(f) for f in config.get('functions', [])]
        return cls(tuple(functions), tuple(config.get('thetas', [])), IndexFunction.from_config(config['alpha']))


def cf_joint(spec: CfSpec, quad: Optional[QuadratureSpec] = None) -> float:
    """
    联合特征函数 E exp(iΣθ_j I(f_j)) = exp(−∫|Σθ_j f_j(x)|^{α(x)}dx)

    Args:
        spec: 特征函数参数
        quad: 积分参数

    Returns:
        float: (0, 1] 内的实数
    """
    combination = spec.combination()
    if combination.is_zero:
        return 1.0
    exponent = integrate_alpha_power(combination, spec.alpha, quad)
    return math.exp(-exponent)


def _scaled_evaluator(combination: RealFunction, alpha: IndexFunction, u: float, r: float, frozen: float):
    def evaluate(z: np.ndarray) -> np.ndarray:
        a_z = alpha(u + r * z)
        return np.abs(combination(z)) ** a_z * r ** (1.0 - a_z / frozen)
    return evaluate


def zoomed_layout(layout: MeshLayout, alpha: IndexFunction, u: float, r: float) -> MeshLayout:
    """z坐标网格：加入 α(u + r·z) 的断点与特征尺度"""
    def alpha_breakpoints(lo: float, hi: float) -> np.ndarray:
        return (alpha.breakpoints(u + r * lo, u + r * hi) - u) / r
    return layout.with_sources(alpha_breakpoints).with_feature_scale(alpha.feature_scale / r)


def scaled_exponents(spec: CfSpec, u: float, r: float,
                     quad: Optional[QuadratureSpec] = None) -> Tuple[float, float]:
    """
    同一网格上计算缩放指数与冻结指数

    Args:
        spec: 特征函数参数（函数须紧支撑）
        u: 中心点
        r: 缩放因子 r > 0

    Returns:
        Tuple[float, float]: (∫|Σθf|^{α(u+rz)}·r^{1−α(u+rz)/α(u)}dz, ∫|Σθf|^{α(u)}dz)
    """
    if not r > 0:
        raise ValidationError(f"缩放因子必须为正: {r}", inequality="r > 0")
    for f in spec.functions:
        if not f.is_zero and not f.layout.is_bounded:
            raise ValidationError(f"缩放特征函数要求紧支撑函数: {f.name}", inequality="supp f bounded")
    combination = spec.combination()
    if combination.is_zero:
        return 0.0, 0.0
    check_integrability(combination, spec.alpha.a, spec.alpha.b)
    frozen = float(spec.alpha(u))
    scaled = _scaled_evaluator(combination, spec.alpha, u, r, frozen)

    def evaluate(z: np.ndarray) -> np.ndarray:
        return np.stack([scaled(z), np.abs(combination(z)) ** frozen])

    result = QuadratureEngine(quad).integrate(evaluate, zoomed_layout(combination.layout, spec.alpha, u, r))
    value = np.maximum(np.asarray(result.value), 0.0)
    return float(value[0]), float(value[1])


def scaled_cf(spec: CfSpec, u: float, r: float, quad: Optional[QuadratureSpec] = None) -> float:
    """
    (r^{−1/α(u)}∫f_j d(T_{u,r}^# M_α))_j 在 (θ_j) 处的特征函数

    Args:
        spec: 特征函数参数（函数须紧支撑）
        u: 中心点
        r: 缩放因子 r > 0
        quad: 积分参数

    Returns:
        float: 特征函数值
    """
    if not r > 0:
        raise ValidationError(f"缩放因子必须为正: {r}", inequality="r > 0")
    for f in spec.functions:
        if not f.is_zero and not f.layout.is_bounded:
            raise ValidationError(f"缩放特征函数要求紧支撑函数: {f.name}", inequality="supp f bounded")
    combination = spec.combination()
    if combination.is_zero:
        return 1.0
    check_integrability(combination, spec.alpha.a, spec.alpha.b)
    frozen = float(spec.alpha(u))
    result = QuadratureEngine(quad).integrate(
        _scaled_evaluator(combination, spec.alpha, u, r, frozen),
        zoomed_layout(combination.layout, spec.alpha, u, r),
    )
    return math.exp(-max(result.scalar(), 0.0))


def cf_on_grid(spec: CfSpec, theta_grid: Sequence[Sequence[float]],
               quad: Optional[QuadratureSpec] = None) -> np.ndarray:
    """
    在θ网格上逐点求联合特征函数

    Args:
        spec: 特征函数参数（θ被网格覆盖）
        theta_grid: 形状 (K, d) 的θ向量

    Returns:
        np.ndarray: K个特征函数值
    """
    grid = np.atleast_2d(np.asarray(theta_grid, dtype=float))
    if grid.shape[1] != spec.dimension:
        grid = grid.reshape(-1, spec.dimension)
    return np.asarray([cf_joint(spec.with_thetas(row), quad) for row in grid])
