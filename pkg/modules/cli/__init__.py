#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
cli模块 - 命令行入口

负责配置解析与合并（默认值 ← JSON ← 参数），以及 sample-path、cf、verify、norm、localize 命令的实现。
"""

from .config_parser import (
    COMMANDS,
    SUITES,
    DEFAULTS,
    ExperimentConfig,
    build_parser,
    load_config,
    alpha_config,
    parse_alpha,
    parse_bounds,
    parse_function,
    parse_interval_set,
    parse_time_grid,
    parse_weight,
    parse_float_list,
)
from .commands import (
    cmd_sample_path,
    cmd_cf,
    cmd_verify,
    cmd_norm,
    cmd_localize,
    run_command,
)

__all__ = [
    # 配置
    'COMMANDS',
    'SUITES',
    'DEFAULTS',
    'ExperimentConfig',
    'build_parser',
    'load_config',
    'alpha_config',
    'parse_alpha',
    'parse_bounds',
    'parse_function',
    'parse_interval_set',
    'parse_time_grid',
    'parse_weight',
    'parse_float_list',

    # 命令
    'cmd_sample_path',
    'cmd_cf',
    'cmd_verify',
    'cmd_norm',
    'cmd_localize',
    'run_command'
]
