#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
verify模块 - 数值校验

负责经验特征函数、测度性质（独立散布、可加性、收敛、缩放）、尾部与矩界，
以及过程局部化条件的校验，统一输出 VerifyReport。
"""

from .report import VerifyReport, merge_reports, trend_verdict
from .ecf import EcfEstimate, ecf, theta_grid
from .measure_checks import (
    independence_check,
    additivity_check,
    cf_convergence_check,
    measure_scaling_check,
    sampler_law_check,
    calibrate_band,
    set_measure_samples,
)
from .moment_checks import (
    derive_tail_constant,
    derive_moment_constant,
    stable_absolute_moment,
    tail_bound_check,
    moment_bound_check,
)
from .localisation_checks import (
    condition_integral,
    localisability_condition_check,
    localized_exponents,
    localize_cf_check,
    strong_condition_integral,
    strong_localisability_diagnostic,
)
from modules.process.kernels import LocalFormSpec

__all__ = [
    # 报告
    'VerifyReport',
    'merge_reports',
    'trend_verdict',

    # 经验特征函数
    'EcfEstimate',
    'ecf',
    'theta_grid',

    # 测度校验
    'independence_check',
    'additivity_check',
    'cf_convergence_check',
    'measure_scaling_check',
    'sampler_law_check',
    'calibrate_band',
    'set_measure_samples',

    # 尾部与矩界
    'derive_tail_constant',
    'derive_moment_constant',
    'stable_absolute_moment',
    'tail_bound_check',
    'moment_bound_check',

    # 局部化
    'LocalFormSpec',
    'condition_integral',
    'localisability_condition_check',
    'localized_exponents',
    'localize_cf_check',
    'strong_condition_integral',
    'strong_localisability_diagnostic'
]
