#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
命令行配置解析模块

职责：
- 解析 α 的小语言（const: / affine: / sin: / table: / piecewise:）与函数、区间、时间网格写法
- 默认值 ← --config JSON ← 命令行参数 逐层合并，参数优先
- 在任何计算之前构造并校验索引函数、过程核与积分参数
"""

import argparse
import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence, Tuple
import logging

import numpy as np

from config.settings import settings
from modules.spaces import IndexFunction, IntervalSet, QuadratureSpec, RealFunction
from modules.stable import RngStream
from modules.process import ProcessKernel, make_kernel
from modules.utils.exceptions import ValidationError
from modules.utils.file_manager import config_hash

logger = logging.getLogger(__name__)

COMMANDS = ('sample-path', 'cf', 'verify', 'norm', 'localize')
SUITES = ('independence', 'additivity', 'convergence', 'tails', 'moments',
          'localize', 'scaling', 'strong', 'sampler')

# JSON 配置键与命令行参数一一对应（参数名中的 '-' 换成 '_'）
DEFAULTS: Dict[str, Any] = {
    'alpha': 'const:1.5',
    'bounds': None,
    'process': 'lfmm',
    'h': None,
    'h_local': None,
    'b_plus': 1.0,
    'b_minus': 0.0,
    'rate': 1.0,
    'weight': 'const:1',
    't': '0:1:65',
    'level': None,
    'seed': 0,
    'samples': None,
    'out': None,
    'quad_tol': None,
    'max_window': None,
    'function': ['ind:0,1'],
    'theta_span': None,
    'theta_points': None,
    'target': 'measure',
    'suite': None,
    'expect_fail': False,
    'dump_increments': False,
    'u': 0.0,
    'p': None,
    'eta': None,
    'lambdas': '1,2,4,8',
    'r_seq': None,
    'sets': ['0,0.5', '0.5,1'],
    'levels': '2,4,6,8',
    'scale': 1.0,
    'constant_scale': 1.0,
    'norm_p': None,
}


# ----------------------------------------------------------------------
# 小语言
# ----------------------------------------------------------------------

def parse_float_list(text: Any) -> List[float]:
    """'1,2,4' 或 JSON 列表 -> [1.0, 2.0, 4.0]"""
    if text is None:
        return []
    if isinstance(text, (list, tuple)):
        return [float(v) for v in text]
    try:
        return [float(v) for v in str(text).replace('|', ',').split(',') if v.strip()]
    except ValueError:
        raise ValidationError(f"无法解析数值列表: {text!r}", reference="示例: 1,2,4")


def parse_bounds(text: Any) -> Optional[Tuple[float, float]]:
    """'a,b' -> (a, b)"""
    if text is None:
        return None
    values = parse_float_list(text)
    if len(values) != 2:
        raise ValidationError(f"--bounds 需要两个数: {text!r}", reference="示例: --bounds 1.2,1.8")
    return values[0], values[1]


def _key_values(body: str) -> Dict[str, str]:
    pairs = {}
    for part in body.split(','):
        if not part.strip():
            continue
        if '=' not in part:
            raise ValidationError(f"参数应写成 key=value: {part!r}")
        key, value = part.split('=', 1)
        pairs[key.strip()] = value.strip()
    return pairs


def alpha_config(text: Any, bounds: Optional[Tuple[float, float]] = None,
                 base_dir: Optional[Path] = None) -> Dict[str, Any]:
    """
    α 小语言 -> IndexFunction 的声明式配置

    Args:
        text: const:1.5 | affine:1.2,0.3 | sin:mid=1.5,amp=0.3,period=2[,phase=0] |
              table:file.json | piecewise:breaks=0.5,values=1.2|1.8；也可直接给出配置对象
        bounds: 非常数族必须给出的 (a, b)
        base_dir: table 文件的相对路径基准

    Returns:
        Dict[str, Any]: 供 IndexFunction.from_config 使用的配置
    """
    if isinstance(text, dict):
        config = dict(text)
    else:
        text = str(text).strip()
        if ':' not in text:
            raise ValidationError(f"无法解析的 α 写法: {text!r}", reference="示例: const:1.5, sin:mid=1.5,amp=0.3,period=2")
        family, body = text.split(':', 1)
        family = family.strip().lower()
        try:
            if family == 'const':
                config = {'family': 'constant', 'params': {'value': float(body)}}
            elif family == 'affine':
                intercept, slope = parse_float_list(body)
                config = {'family': 'affine-clamped', 'params': {'intercept': intercept, 'slope': slope}}
            elif family == 'sin':
                pairs = _key_values(body)
                params = {k: float(pairs[k]) for k in ('mid', 'amp', 'period')}
                params['phase'] = float(pairs.get('phase', 0.0))
                config = {'family': 'sinusoidal', 'params': params}
            elif family == 'table':
                path = Path(body)
                if not path.is_absolute() and base_dir is not None and not path.exists():
                    path = base_dir / path
                with open(path, 'r', encoding='utf-8') as f:
                    table = json.load(f)
                config = {'family': 'tabulated-linear-interp',
                          'params': {'xs': [float(x) for x in table['xs']],
                                     'alphas': [float(v) for v in table['alphas']]}}
            elif family == 'piecewise':
                pairs = {}
                for part in body.split(','):
                    key, value = part.split('=', 1)
                    pairs[key.strip()] = value
                config = {'family': 'piecewise-constant',
                          'params': {'breaks': parse_float_list(pairs.get('breaks', '')),
                                     'values': parse_float_list(pairs['values'])}}
            else:
                raise ValidationError(f"未知的 α 族: {family}", reference="可选: const, affine, sin, table, piecewise")
        except ValidationError:
            raise
        except (KeyError, ValueError, OSError) as e:
            raise ValidationError(f"α 写法 {text!r} 无法解析: {e}")

    if bounds is not None:
        config['a'], config['b'] = bounds
    if config['family'] != 'constant' and ('a' not in config or 'b' not in config):
        raise ValidationError(f"非常数 α 族 {config['family']} 必须给出 --bounds a,b", inequality="a ≤ α(x) ≤ b")
    return config


def parse_alpha(text: Any, bounds: Any = None, base_dir: Optional[Path] = None) -> IndexFunction:
    """α 小语言 -> IndexFunction"""
    return IndexFunction.from_config(alpha_config(text, parse_bounds(bounds), base_dir))


def parse_interval_set(text: Any) -> IntervalSet:
    """'0,0.5;1,2' -> [0,0.5) ∪ [1,2)"""
    if isinstance(text, (list, tuple)) and text and isinstance(text[0], (list, tuple)):
        return IntervalSet(text)
    if isinstance(text, (list, tuple)):
        return IntervalSet([parse_float_list(text)])
    pieces = [parse_float_list(p) for p in str(text).split(';') if p.strip()]
    if any(len(p) != 2 for p in pieces):
        raise ValidationError(f"区间写法应为 lo,hi[;lo,hi]: {text!r}")
    return IntervalSet(pieces)


def parse_function(text: Any) -> RealFunction:
    """
    函数写法 -> RealFunction

    ind:lo,hi[;lo,hi][@scale] | exp:start,rate[@scale] | pow:point,exponent,length[@scale] | zero，
    或 RealFunction.from_config 的配置对象
    """
    if isinstance(text, dict):
        return RealFunction.from_config(text)
    text = str(text).strip()
    if text == 'zero':
        return RealFunction.zero()
    body, scale = text, 1.0
    if '@' in text:
        body, scale_text = text.rsplit('@', 1)
        scale = parse_float_list(scale_text)[0]
    if ':' not in body:
        raise ValidationError(f"无法解析的函数写法: {text!r}", reference="示例: ind:0,1, exp:0,1, pow:0,-0.3,1")
    family, args = body.split(':', 1)
    family = family.strip().lower()
    if family == 'ind':
        return RealFunction.indicator(parse_interval_set(args), scale)
    values = parse_float_list(args)
    if family == 'exp' and len(values) == 2:
        return RealFunction.exponential(values[0], values[1], scale)
    if family == 'pow' and len(values) == 3:
        return RealFunction.power(values[0], values[1], values[2], scale)
    raise ValidationError(f"无法解析的函数写法: {text!r}", reference="可选: ind, exp, pow, zero")


def parse_weight(text: Any) -> Dict[str, Any]:
    """权函数写法 const:1 | affine:intercept,slope | sin:mid=..,amp=..,period=.."""
    if isinstance(text, dict):
        return dict(text)
    text = str(text).strip()
    family, _, body = text.partition(':')
    family = family.strip().lower()
    try:
        if family == 'const':
            return {'kind': 'constant', 'value': float(body)}
        if family == 'affine':
            intercept, slope = parse_float_list(body)
            return {'kind': 'affine', 'intercept': intercept, 'slope': slope}
        if family == 'sin':
            pairs = _key_values(body)
            return {'kind': 'sinusoidal', **{k: float(pairs[k]) for k in ('mid', 'amp', 'period')}}
    except (KeyError, ValueError) as e:
        raise ValidationError(f"权函数写法 {text!r} 无法解析: {e}")
    raise ValidationError(f"未知的权函数写法: {text!r}", reference="可选: const, affine, sin")


def parse_time_grid(text: Any) -> np.ndarray:
    """'start:stop:count' -> 等距时间网格；也接受数值列表"""
    if isinstance(text, (list, tuple)):
        return np.asarray(text, dtype=float)
    parts = str(text).split(':')
    if len(parts) != 3:
        raise ValidationError(f"时间网格应写成 start:stop:count: {text!r}", reference="示例: --t 0:1:256")
    try:
        start, stop, count = float(parts[0]), float(parts[1]), int(parts[2])
    except ValueError:
        raise ValidationError(f"时间网格无法解析: {text!r}")
    if count < 1:
        raise ValidationError(f"时间点数必须为正: {count}", inequality="count ≥ 1")
    return np.linspace(start, stop, count)


# ----------------------------------------------------------------------
# 实验配置
# ----------------------------------------------------------------------

@dataclass
class ExperimentConfig:
    """合并后的实验配置"""
    command: str
    values: Dict[str, Any] = field(default_factory=dict)
    base_dir: Optional[Path] = None

    def __post_init__(self):
        if self.command not in COMMANDS:
            raise ValidationError(f"未知的命令: {self.command}", reference=f"可选: {', '.join(COMMANDS)}")
        unknown = sorted(set(self.values) - set(DEFAULTS))
        if unknown:
            raise ValidationError(f"未知的配置键: {unknown}", reference="配置键与命令行参数一一对应")
        suite = self.values.get('suite')
        if self.command == 'verify' and suite not in SUITES:
            raise ValidationError(f"未知的校验套件: {suite}", reference=f"可选: {', '.join(SUITES)}")

    def __getitem__(self, key: str) -> Any:
        return self.values[key]

    def to_dict(self) -> Dict[str, Any]:
        """可哈希的完整配置（不含输出目录）"""
        data = {k: v for k, v in self.values.items() if k != 'out'}
        data['command'] = self.command
        return data

    @property
    def config_hash(self) -> str:
        return config_hash(self.to_dict())

    # ------------------------------------------------------------------
    # 对象构造
    # ------------------------------------------------------------------

    def index_function(self) -> IndexFunction:
        return parse_alpha(self['alpha'], self['bounds'], self.base_dir)

    def kernel(self, alpha: Optional[IndexFunction] = None) -> ProcessKernel:
        alpha = self.index_function() if alpha is None else alpha
        params: Dict[str, Any] = {'b_plus': float(self['b_plus']), 'b_minus': float(self['b_minus']),
                                  'rate': float(self['rate']), 'weight': parse_weight(self['weight'])}
        if self['h'] is not None:
            params['h'] = float(self['h'])
        return make_kernel(self['process'], params, alpha)

    def quadrature(self) -> QuadratureSpec:
        spec = QuadratureSpec.from_settings()
        return spec if self['quad_tol'] is None else spec.with_tolerance(float(self['quad_tol']))

    def stream(self) -> RngStream:
        return RngStream.from_seed(int(self['seed']))

    def times(self) -> np.ndarray:
        return parse_time_grid(self['t'])

    def functions(self) -> List[RealFunction]:
        specs = self['function']
        specs = specs if isinstance(specs, (list, tuple)) else [specs]
        if not specs:
            raise ValidationError("至少需要一个函数 --function")
        return [parse_function(s) for s in specs]

    def sets(self) -> List[IntervalSet]:
        specs = self['sets']
        specs = specs if isinstance(specs, (list, tuple)) else [specs]
        return [parse_interval_set(s) for s in specs]

    @property
    def level(self) -> int:
        return settings.DEFAULT_LEVEL if self['level'] is None else int(self['level'])

    def samples(self, default: Optional[int] = None) -> int:
        if self['samples'] is not None:
            return int(self['samples'])
        return settings.DEFAULT_PATHS if default is None else int(default)

    @property
    def r_sequence(self) -> Optional[List[float]]:
        return None if self['r_seq'] is None else parse_float_list(self['r_seq'])

    def validate(self) -> 'ExperimentConfig':
        """在计算之前构造所有对象，使前提条件错误尽早暴露"""
        alpha = self.index_function()
        self.quadrature()
        self.stream()
        needs_kernel = (self.command in ('sample-path', 'localize')
                        or (self.command == 'cf' and self['target'] == 'process')
                        or (self.command == 'verify' and self['suite'] in ('localize', 'strong')))
        if needs_kernel:
            self.kernel(alpha)
        if self.command == 'sample-path':
            self.times()
        if self.command in ('cf', 'norm'):
            self.functions()
        logger.info(f"配置已校验: {self.command}, hash={self.config_hash[:12]}")
        return self


# ----------------------------------------------------------------------
# argparse
# ----------------------------------------------------------------------

def _common_arguments(parser: argparse.ArgumentParser):
    parser.add_argument("--config", type=str, help="JSON 配置文件，参数优先于文件")
    parser.add_argument("--alpha", type=str, help="α 写法，如 const:1.5 或 sin:mid=1.5,amp=0.3,period=2")
    parser.add_argument("--bounds", type=str, help="非常数 α 的界 a,b")
    parser.add_argument("--process", type=str, help="过程核: lfmm | levy | rou")
    parser.add_argument("--h", type=float, help="LFMM 的 h")
    parser.add_argument("--b-plus", dest="b_plus", type=float, help="LFMM 的 b⁺")
    parser.add_argument("--b-minus", dest="b_minus", type=float, help="LFMM 的 b⁻")
    parser.add_argument("--rate", type=float, help="反向OU 的衰减率 λ")
    parser.add_argument("--weight", type=str, help="加权Lévy 的权函数，如 const:1")
    parser.add_argument("--level", type=int, help="二进层级 n")
    parser.add_argument("--seed", type=int, help="64位随机种子")
    parser.add_argument("--samples", type=int, help="路径或实现次数")
    parser.add_argument("--out", type=str, help="输出目录")
    parser.add_argument("--quad-tol", dest="quad_tol", type=float, help="积分容限")
    parser.add_argument("--max-window", dest="max_window", type=float, help="模拟窗口长度上限")


def build_parser() -> argparse.ArgumentParser:
    """构造命令行解析器；未给出的参数不出现在结果中"""
    parser = argparse.ArgumentParser(description="多稳定随机测度、积分与过程的模拟和校验")
    subparsers = parser.add_subparsers(dest="command", required=True)

    sample = subparsers.add_parser("sample-path", help="生成过程路径", argument_default=argparse.SUPPRESS)
    _common_arguments(sample)
    sample.add_argument("--t", type=str, help="时间网格 start:stop:count")
    sample.add_argument("--dump-increments", dest="dump_increments", action="store_true", help="同时写出测度增量CSV")

    cf = subparsers.add_parser("cf", help="计算特征函数", argument_default=argparse.SUPPRESS)
    _common_arguments(cf)
    cf.add_argument("--target", choices=["measure", "process"], help="测度积分或过程边际")
    cf.add_argument("--function", action="append", help="函数写法，可重复，如 ind:0,1")
    cf.add_argument("--t", type=str, help="过程边际的时刻 start:stop:count")
    cf.add_argument("--theta-span", dest="theta_span", type=float, help="θ 取值范围 [−span, span]")
    cf.add_argument("--theta-points", dest="theta_points", type=int, help="θ 网格点数")

    verify = subparsers.add_parser("verify", help="运行校验套件", argument_default=argparse.SUPPRESS)
    _common_arguments(verify)
    verify.add_argument("--suite", choices=list(SUITES), help="校验套件")
    verify.add_argument("--expect-fail", dest="expect_fail", action="store_true", help="反例对照：失败时退出码为0")
    verify.add_argument("--function", action="append", help="函数写法，可重复")
    verify.add_argument("--sets", action="append", help="区间集合 lo,hi[;lo,hi]，可重复")
    verify.add_argument("--levels", type=str, help="收敛检查的层级列表")
    verify.add_argument("--lambdas", type=str, help="尾部检查的 λ 列表")
    verify.add_argument("--p", type=float, help="矩阶 p")
    verify.add_argument("--u", type=float, help="局部化中心点")
    verify.add_argument("--eta", type=float, help="强局部化的 η")
    verify.add_argument("--h-local", dest="h_local", type=float, help="局部化指数，默认取切过程的指数")
    verify.add_argument("--r-seq", dest="r_seq", type=str, help="r 序列，如 0.1,0.01,0.001")
    verify.add_argument("--scale", type=float, help="采样器检查的尺度 σ")
    verify.add_argument("--constant-scale", dest="constant_scale", type=float, help="界常数的乘数")
    verify.add_argument("--theta-span", dest="theta_span", type=float, help="θ 取值范围")
    verify.add_argument("--theta-points", dest="theta_points", type=int, help="θ 网格点数")

    norm = subparsers.add_parser("norm", help="计算函数范数", argument_default=argparse.SUPPRESS)
    _common_arguments(norm)
    norm.add_argument("--function", action="append", help="函数写法")
    norm.add_argument("--norm-p", dest="norm_p", type=float, help="给出时计算常指数 L^p 范数")

    localize = subparsers.add_parser("localize", help="过程局部化检查", argument_default=argparse.SUPPRESS)
    _common_arguments(localize)
    localize.add_argument("--u", type=float, help="局部化中心点")
    localize.add_argument("--h-local", dest="h_local", type=float, help="局部化指数，默认取切过程的指数")
    localize.add_argument("--r-seq", dest="r_seq", type=str, help="r 序列")
    localize.add_argument("--expect-fail", dest="expect_fail", action="store_true", help="反例对照")
    return parser


def load_config(argv: Optional[Sequence[str]] = None) -> ExperimentConfig:
    """
    解析命令行并合并配置

    Args:
        argv: 参数列表，默认取 sys.argv

    Returns:
        ExperimentConfig: 默认值 ← --config 文件 ← 命令行参数
    """
    args = vars(build_parser().parse_args(argv))
    command = args.pop('command')
    values = dict(DEFAULTS)
    base_dir = None

    config_path = args.pop('config', None)
    if config_path:
        path = Path(config_path)
        try:
            with open(path, 'r', encoding='utf-8') as f:
                from_file = json.load(f)
        except (OSError, json.JSONDecodeError) as e:
            raise ValidationError(f"无法读取配置文件 {path}: {e}")
        if not isinstance(from_file, dict):
            raise ValidationError(f"配置文件必须是JSON对象: {path}")
        from_file.pop('command', None)
        values.update(from_file)
        base_dir = path.resolve().parent

    values.update(args)
    return ExperimentConfig(command, values, base_dir)
