#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
多稳定随机测度工具 - 系统设置文件
System Settings for the Multistable Toolkit

包含路径配置、数值积分配置、模拟配置、验证配置、日志配置等系统级设置
"""

import os
import sys
from pathlib import Path
from typing import Dict, Any, Optional
import yaml
import logging
from logging.handlers import RotatingFileHandler


class Settings:
    """系统设置管理类"""

    def __init__(self, config_path: Optional[str] = None):
        """
        初始化设置

        Args:
            config_path: 配置文件路径，默认读取环境变量 MULTISTABLE_CONFIG，
                         否则为项目根目录下的config/simulation_config.yaml
        """
        self.project_root = Path(__file__).parent.parent
        self.config_path = Path(
            config_path
            or os.getenv('MULTISTABLE_CONFIG')
            or self.project_root / "config" / "simulation_config.yaml"
        )

        # 加载模拟配置
        self.simulation_config = self._load_simulation_config()

        # 初始化环境变量（日志级别依赖DEBUG_MODE）
        self._init_env_vars()

        # 初始化路径设置
        self._init_paths()

        # 初始化数值设置
        self._init_numerics()

        # 初始化日志设置
        self._init_logging()

    def _load_simulation_config(self) -> Dict[str, Any]:
        """加载模拟配置文件"""
        try:
            with open(self.config_path, 'r', encoding='utf-8') as f:
                config = yaml.safe_load(f)
            return config or {}
        except FileNotFoundError:
            print(f"警告: 配置文件 {self.config_path} 不存在，使用默认配置", file=sys.stderr)
            return {}
        except yaml.YAMLError as e:
            print(f"警告: 配置文件解析失败: {e}，使用默认配置", file=sys.stderr)
            return {}

    def _init_env_vars(self):
        """初始化环境变量"""
        self.PYTHONPATH = os.getenv('PYTHONPATH', str(self.project_root))

        # 调试模式（强制DEBUG日志级别）
        self.DEBUG_MODE = os.getenv('DEBUG_MODE', 'False').lower() == 'true'

    def _init_paths(self):
        """初始化路径配置"""
        # 基础路径
        self.PROJECT_ROOT = self.project_root
        self.CONFIG_DIR = self.project_root / "config"
        self.DATA_DIR = self.project_root / "data"
        self.TESTS_DIR = self.project_root / "tests"
        self.MODULES_DIR = self.project_root / "modules"
        self.LOGS_DIR = self.project_root / "logs"

        # 输出路径
        output_dir = self.get_section('output', 'output_dir', 'data/output')
        self.OUTPUT_DIR = self.project_root / output_dir

        # 确保目录存在
        self._ensure_directories()

    def _ensure_directories(self):
        """确保必要的目录存在"""
        directories = [
            self.DATA_DIR,
            self.OUTPUT_DIR,
            self.LOGS_DIR,
        ]

        for directory in directories:
            directory.mkdir(parents=True, exist_ok=True)

    def _init_numerics(self):
        """初始化数值积分、模拟与验证的默认值"""
        quadrature = self.get_section('quadrature')
        self.QUAD_BASE_CELLS = int(quadrature.get('base_cells', 16))
        self.QUAD_GRADING_EXPONENT = float(quadrature.get('grading_exponent', 4.0))
        self.QUAD_ABS_TOL = float(quadrature.get('abs_tol', 1e-9))
        self.QUAD_REL_TOL = float(quadrature.get('rel_tol', 1e-9))
        self.QUAD_TRUNCATION_EPSILON = float(quadrature.get('truncation_epsilon', 1e-12))
        self.QUAD_MAX_REFINEMENTS = int(quadrature.get('max_refinements', 12))
        self.QUAD_MAX_TAIL_CELLS = int(quadrature.get('max_tail_cells', 20000))

        luxemburg = self.get_section('luxemburg')
        self.LUXEMBURG_ROOT_REL_TOL = float(luxemburg.get('root_rel_tol', 1e-10))
        self.LUXEMBURG_MAX_SCALING_POWER = int(luxemburg.get('max_scaling_power', 64))

        index_function = self.get_section('index_function')
        self.INDEX_PROBE_POINTS = int(index_function.get('probe_points', 4096))
        self.INDEX_PROBE_WINDOW = tuple(float(v) for v in index_function.get('probe_window', [-10.0, 10.0]))

        simulation = self.get_section('simulation')
        self.DEFAULT_LEVEL = int(simulation.get('default_level', 12))
        self.MAX_CELLS = int(simulation.get('max_cells', 2 ** 24))
        self.MAX_WINDOW = float(simulation.get('max_window', 64.0))
        self.CHUNK_SIZE = int(simulation.get('chunk_size', 256))
        self.DEFAULT_PATHS = int(simulation.get('default_paths', 1))

        verify = self.get_section('verify')
        self.R_SEQUENCE = [float(r) for r in verify.get('r_sequence', [1e-1, 1e-2, 1e-3, 1e-4])]
        self.THETA_SPAN = float(verify.get('theta_span', 3.0))
        self.THETA_POINTS = int(verify.get('theta_points', 21))
        self.SAMPLER_THETA_SPAN = float(verify.get('sampler_theta_span', 5.0))
        self.SAMPLER_THETA_POINTS = int(verify.get('sampler_theta_points', 41))
        self.BAND_FACTOR = float(verify.get('band_factor', 4.0))
        self.FINAL_TOLERANCE = float(verify.get('final_tolerance', 1e-3))
        self.LOG_CONTINUITY_PROBE_POINTS = int(verify.get('log_continuity_probe_points', 4097))
        self.LOG_CONTINUITY_DECAY_RATIO = float(verify.get('log_continuity_decay_ratio', 0.5))
        self.BOOTSTRAP_RESAMPLES = int(verify.get('bootstrap_resamples', 200))
        self.STRONG_STABILITY_FACTOR = float(verify.get('strong_stability_factor', 10.0))

        output = self.get_section('output')
        self.CSV_SIGNIFICANT_DIGITS = int(output.get('csv_significant_digits', 17))

    def _init_logging(self):
        """初始化日志配置"""
        # 从配置文件获取日志设置
        logging_config = self.simulation_config.get('development', {}).get('logging', {})

        # 日志级别
        level_str = 'DEBUG' if self.DEBUG_MODE else logging_config.get('level', 'INFO')
        self.LOG_LEVEL = getattr(logging, level_str.upper(), logging.INFO)

        # 日志格式
        self.LOG_FORMAT = logging_config.get(
            'format',
            '%(asctime)s - %(name)s - %(levelname)s - %(message)s'
        )

        # 日志文件路径
        log_file_name = logging_config.get('file_path', 'multistable.log')
        # 确保文件名不包含路径
        log_file_name = Path(log_file_name).name
        self.LOG_FILE_PATH = self.LOGS_DIR / log_file_name

        # 是否启用控制台输出
        self.LOG_CONSOLE_OUTPUT = logging_config.get('console_output', True)

        # 日志文件设置
        self.LOG_MAX_FILE_SIZE = logging_config.get('max_file_size', 100) * 1024 * 1024  # MB to bytes
        self.LOG_BACKUP_COUNT = logging_config.get('backup_count', 5)

        # 配置根日志记录器
        self._setup_logging()

    def _setup_logging(self):
        """设置日志系统"""
        # 创建根日志记录器
        logger = logging.getLogger()
        logger.setLevel(self.LOG_LEVEL)

        # 清除现有处理器
        for handler in logger.handlers[:]:
            logger.removeHandler(handler)

        # 创建格式化器
        formatter = logging.Formatter(self.LOG_FORMAT)

        # 文件处理器
        file_handler = RotatingFileHandler(
            self.LOG_FILE_PATH,
            maxBytes=self.LOG_MAX_FILE_SIZE,
            backupCount=self.LOG_BACKUP_COUNT,
            encoding='utf-8'
        )
        file_handler.setLevel(self.LOG_LEVEL)
        file_handler.setFormatter(formatter)
        logger.addHandler(file_handler)

        # 控制台处理器（stdout留给norm命令的结果）
        if self.LOG_CONSOLE_OUTPUT:
            console_handler = logging.StreamHandler(sys.stderr)
            console_handler.setLevel(self.LOG_LEVEL)
            console_handler.setFormatter(formatter)
            logger.addHandler(console_handler)

    def get_section(self, section: str, key: str = None, default: Any = None) -> Any:
        """
        获取配置段

        Args:
            section: 配置段名 (quadrature, simulation, verify等)
            key: 配置键，如果为None则返回整个配置段
            default: 默认值

        Returns:
            配置值
        """
        section_config = self.simulation_config.get(section) or {}

        if key is None:
            return section_config

        return section_config.get(key, default)

    def __str__(self) -> str:
        """返回设置的字符串表示"""
        return f"Settings(project_root={self.PROJECT_ROOT}, config={self.config_path})"

    def __repr__(self) -> str:
        """返回设置的详细表示"""
        return self.__str__()


# 创建全局设置实例
settings = Settings()

# 导出常用设置
__all__ = [
    'Settings',
    'settings',
    # 路径常量
    'PROJECT_ROOT',
    'DATA_DIR',
    'OUTPUT_DIR',
    'LOGS_DIR',
    # 数值常量
    'QUAD_ABS_TOL',
    'QUAD_REL_TOL',
    'DEFAULT_LEVEL',
    'MAX_CELLS',
    'BAND_FACTOR',
    # 日志常量
    'LOG_LEVEL',
    'LOG_FORMAT',
]

# 动态添加路径常量到模块命名空间
for attr in dir(settings):
    if attr.isupper() and not attr.startswith('_'):
        globals()[attr] = getattr(settings, attr)
