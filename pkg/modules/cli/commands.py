#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
命令实现模块

职责：
- sample-path：生成路径，每条路径一个CSV (t, value)，另附JSON说明
- cf：在θ网格上计算测度积分或过程边际的特征函数，写出CSV (theta, cf)
- verify / localize：运行校验套件，写出带配置哈希的 VerifyReport JSON
- norm：向标准输出打印 Luxemburg 范数或 L^p 范数
- 输出只依赖 (配置, 种子)，不含时间戳
"""

from pathlib import Path
from typing import Callable, Dict, List
import logging

import numpy as np
import pandas as pd

from config.settings import settings
from modules.measure import CfSpec, cf_on_grid, save_increments, simulate_increments
from modules.process import marginal_cf, sample_paths
from modules.spaces import luxemburg_norm, norm_p
from modules.verify import (
    VerifyReport,
    additivity_check,
    cf_convergence_check,
    independence_check,
    localisability_condition_check,
    localize_cf_check,
    measure_scaling_check,
    merge_reports,
    moment_bound_check,
    sampler_law_check,
    strong_localisability_diagnostic,
    tail_bound_check,
    theta_grid,
)
from modules.utils.exceptions import ValidationError
from modules.utils.file_manager import FileManager
from modules.cli.config_parser import ExperimentConfig, parse_float_list

logger = logging.getLogger(__name__)

# 蒙特卡洛套件未给出 --samples 时的实现次数
MONTE_CARLO_SAMPLES = 10000


def _file_manager(config: ExperimentConfig) -> FileManager:
    out = config['out']
    return FileManager(Path(out).resolve() if out is not None else settings.OUTPUT_DIR)


def _theta_rows(config: ExperimentConfig, dimension: int) -> np.ndarray:
    return theta_grid(dimension, config['theta_span'], config['theta_points'])


def _exit_code(passed: bool, expect_fail: bool) -> int:
    if expect_fail:
        return 0 if not passed else 1
    return 0 if passed else 1


# ----------------------------------------------------------------------
# sample-path
# ----------------------------------------------------------------------

def cmd_sample_path(config: ExperimentConfig) -> int:
    """生成路径并写出CSV与JSON说明"""
    alpha = config.index_function()
    kernel = config.kernel(alpha)
    quad = config.quadrature()
    stream = config.stream()
    n_paths = config.samples()

    paths = sample_paths(kernel, config.times(), alpha, config.level, stream, n_paths, quad,
                         config['max_window'])

    file_manager = _file_manager(config)
    outputs = file_manager.create_output_structure('sample-path', config.to_dict())
    records = []
    for i, path in enumerate(paths):
        name = f"path_{i:04d}.csv"
        file_manager.save_csv(path.to_frame(), outputs['output_dir'] / name)
        record = {'file': name, **path.sidecar()}
        if config['dump_increments']:
            increments = simulate_increments(alpha, path.level, path.window, path.stream)
            increments_name = f"increments_{i:04d}.csv"
            save_increments(increments, outputs['output_dir'] / increments_name, file_manager)
            record['increments_file'] = increments_name
        records.append(record)

    file_manager.save_json({
        'command': 'sample-path',
        'config': config.to_dict(),
        'config_hash': config.config_hash,
        'seed': stream.seed,
        'paths': records,
    }, outputs['json'])
    logger.info(f"路径已写出: {n_paths} 条 -> {outputs['output_dir']}")
    return 0


# ----------------------------------------------------------------------
# cf
# ----------------------------------------------------------------------

def cmd_cf(config: ExperimentConfig) -> int:
    """θ网格上的特征函数"""
    alpha = config.index_function()
    quad = config.quadrature()

    if config['target'] == 'process':
        kernel = config.kernel(alpha)
        times = config.times()
        grid = _theta_rows(config, times.size)
        values = np.asarray([marginal_cf(kernel, times, row, alpha, quad) for row in grid])
        extra = {'times': times}
    else:
        functions = config.functions()
        grid = _theta_rows(config, len(functions))
        values = cf_on_grid(CfSpec(tuple(functions), tuple(grid[0]), alpha), grid, quad)
        extra = {'functions': [f.name for f in functions]}

    if grid.shape[1] == 1:
        columns = {'theta': grid[:, 0]}
    else:
        columns = {f"theta_{j + 1}": grid[:, j] for j in range(grid.shape[1])}
    frame = pd.DataFrame({**columns, 'cf': values})

    file_manager = _file_manager(config)
    outputs = file_manager.create_output_structure('cf', config.to_dict())
    file_manager.save_csv(frame, outputs['csv'])
    file_manager.save_json({
        'command': 'cf',
        'config': config.to_dict(),
        'config_hash': config.config_hash,
        'target': config['target'],
        'grid_points': int(grid.shape[0]),
        **extra,
    }, outputs['json'])
    return 0


# ----------------------------------------------------------------------
# norm
# ----------------------------------------------------------------------

def cmd_norm(config: ExperimentConfig) -> int:
    """向标准输出打印每个函数的范数"""
    quad = config.quadrature()
    functions = config.functions()
    if config['norm_p'] is not None:
        p = float(config['norm_p'])
        for f in functions:
            print(f"norm_p\t{f.name}\t{norm_p(f, p, quad)!r}")
    else:
        alpha = config.index_function()
        for f in functions:
            print(f"luxemburg_norm\t{f.name}\t{luxemburg_norm(f, alpha, quad)!r}")
    return 0


# ----------------------------------------------------------------------
# verify
# ----------------------------------------------------------------------

def _suite_independence(config: ExperimentConfig) -> VerifyReport:
    sets = config.sets()
    return independence_check(config.index_function(), sets, config.level, config.samples(MONTE_CARLO_SAMPLES),
                              config.stream(), config.quadrature(), _theta_rows(config, len(sets)),
                              show_progress=True)


def _suite_additivity(config: ExperimentConfig) -> VerifyReport:
    return additivity_check(config.index_function(), config.sets(), config.level,
                            config.samples(MONTE_CARLO_SAMPLES), config.stream(), config.quadrature(),
                            show_progress=True)


def _suite_convergence(config: ExperimentConfig) -> VerifyReport:
    alpha = config.index_function()
    levels = [int(n) for n in parse_float_list(config['levels'])]
    functions = config.functions()
    return cf_convergence_check([alpha.dyadic(n) for n in levels], alpha, functions,
                                _theta_rows(config, len(functions)), config.quadrature())


def _suite_tails(config: ExperimentConfig) -> VerifyReport:
    return tail_bound_check(config.functions()[0], config.index_function(), parse_float_list(config['lambdas']),
                            config.level, config.samples(MONTE_CARLO_SAMPLES), config.stream(),
                            config.quadrature(), float(config['constant_scale']))


def _suite_moments(config: ExperimentConfig) -> VerifyReport:
    alpha = config.index_function()
    p = alpha.a / 2.0 if config['p'] is None else float(config['p'])
    return moment_bound_check(config.functions()[0], alpha, p, config.level,
                              config.samples(MONTE_CARLO_SAMPLES), config.stream(), config.quadrature(),
                              float(config['constant_scale']))


def _localize_reports(config: ExperimentConfig) -> List[VerifyReport]:
    alpha = config.index_function()
    kernel = config.kernel(alpha)
    quad = config.quadrature()
    u = float(config['u'])
    h = None if config['h_local'] is None else float(config['h_local'])
    return [
        localisability_condition_check(kernel, alpha, u, h, r_seq=config.r_sequence, quad=quad),
        localize_cf_check(kernel, alpha, u, h, r_seq=config.r_sequence, quad=quad),
    ]


def _suite_localize(config: ExperimentConfig) -> VerifyReport:
    return merge_reports(_localize_reports(config), check='localize')


def _suite_scaling(config: ExperimentConfig) -> VerifyReport:
    functions = config.functions()
    return measure_scaling_check(config.index_function(), float(config['u']), functions,
                                 _theta_rows(config, len(functions)), config.r_sequence, config.quadrature())


def _suite_strong(config: ExperimentConfig) -> VerifyReport:
    alpha = config.index_function()
    kernel = config.kernel(alpha)
    eta = (1.0 / alpha.a + 1.0) / 2.0 if config['eta'] is None else float(config['eta'])
    h = None if config['h_local'] is None else float(config['h_local'])
    return strong_localisability_diagnostic(kernel, alpha, float(config['u']), h, eta,
                                            config.r_sequence, config.quadrature())


def _suite_sampler(config: ExperimentConfig) -> VerifyReport:
    alpha = config.index_function()
    if not alpha.is_constant:
        raise ValidationError("sampler 套件需要常数 α", reference="示例: --alpha const:1.5")
    return sampler_law_check(alpha.constant_value, float(config['scale']), config.samples(MONTE_CARLO_SAMPLES),
                             config.stream())


SUITE_RUNNERS: Dict[str, Callable[[ExperimentConfig], VerifyReport]] = {
    'independence': _suite_independence,
    'additivity': _suite_additivity,
    'convergence': _suite_convergence,
    'tails': _suite_tails,
    'moments': _suite_moments,
    'localize': _suite_localize,
    'scaling': _suite_scaling,
    'strong': _suite_strong,
    'sampler': _suite_sampler,
}


def _save_report(config: ExperimentConfig, report: VerifyReport, run_name: str) -> Path:
    report.with_config_hash(config.config_hash)
    if report.seed is None:
        report.seed = int(config['seed'])
    file_manager = _file_manager(config)
    outputs = file_manager.create_output_structure(run_name, config.to_dict())
    return file_manager.save_json(report.to_dict(), outputs['json'])


def cmd_verify(config: ExperimentConfig) -> int:
    """运行一个校验套件；全部通过时退出码为0（--expect-fail 时相反）"""
    suite = config['suite']
    logger.info(f"运行校验套件: {suite}")
    report = SUITE_RUNNERS[suite](config)
    path = _save_report(config, report, f"verify-{suite}")
    logger.info(f"校验报告已写出: {path}")
    return _exit_code(report.passed, bool(config['expect_fail']))


def cmd_localize(config: ExperimentConfig) -> int:
    """局部化条件积分与切过程特征函数两项检查，各写一个报告"""
    reports = _localize_reports(config)
    for report in reports:
        _save_report(config, report, f"localize-{report.check}")
    merged = merge_reports(reports, check='localize')
    _save_report(config, merged, 'localize')
    return _exit_code(merged.passed, bool(config['expect_fail']))


COMMAND_RUNNERS: Dict[str, Callable[[ExperimentConfig], int]] = {
    'sample-path': cmd_sample_path,
    'cf': cmd_cf,
    'verify': cmd_verify,
    'norm': cmd_norm,
    'localize': cmd_localize,
}


def run_command(config: ExperimentConfig) -> int:
    """按命令名分派"""
    return COMMAND_RUNNERS[config.command](config)
