#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
spaces模块 - 函数空间与数值积分

负责索引函数 α(x)、带元数据的实函数、复合Gauss-Legendre积分引擎，以及 ‖·‖_p、
Luxemburg范数 ‖·‖_α 和 |f|^{a,b} 泛函，是其余所有模块的数值基础。
"""

from .quadrature import QuadratureSpec, QuadratureEngine, QuadratureResult, MeshLayout, DecayTag, integrate
from .index_function import IndexFunction
from .real_function import RealFunction, Singularity, IntervalSet
from .norms import (
    integrate_alpha_power,
    integrate_alpha_powers,
    integrate_ab_power,
    norm_p,
    luxemburg_norm,
    log_continuity_diagnostic,
    LogContinuityReport,
    exponent_continuity_gap,
    check_integrability,
)

__all__ = [
    # 数值积分
    'QuadratureSpec',
    'QuadratureEngine',
    'QuadratureResult',
    'MeshLayout',
    'DecayTag',
    'integrate',

    # 函数
    'IndexFunction',
    'RealFunction',
    'Singularity',
    'IntervalSet',

    # 范数与诊断
    'integrate_alpha_power',
    'integrate_alpha_powers',
    'integrate_ab_power',
    'norm_p',
    'luxemburg_norm',
    'log_continuity_diagnostic',
    'LogContinuityReport',
    'exponent_continuity_gap',
    'check_integrability'
]
