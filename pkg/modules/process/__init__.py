#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
process模块 - 多稳定过程

负责过程核 f(t,x)（加权Lévy、反向OU、LFMM、自定义）及其参数校验、局部形式，
以及共享增量实现下的路径模拟、边际特征函数与连续模检查。
"""

from .kernels import (
    KERNEL_KINDS,
    ProcessKernel,
    WeightedLevyKernel,
    ReverseOUKernel,
    LfmmKernel,
    CustomKernel,
    WeightFunction,
    LocalFormSpec,
    make_kernel,
    normalize_kind,
    signed_indicator,
)
from .paths import (
    PathSample,
    sample_path,
    sample_paths,
    simulation_window,
    marginal_cf,
    increment_exponent,
    continuity_modulus_check,
)

__all__ = [
    # 过程核
    'KERNEL_KINDS',
    'ProcessKernel',
    'WeightedLevyKernel',
    'ReverseOUKernel',
    'LfmmKernel',
    'CustomKernel',
    'WeightFunction',
    'LocalFormSpec',
    'make_kernel',
    'normalize_kind',
    'signed_indicator',

    # 路径
    'PathSample',
    'sample_path',
    'sample_paths',
    'simulation_window',
    'marginal_cf',
    'increment_exponent',
    'continuity_modulus_check'
]
