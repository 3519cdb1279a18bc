#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
校验报告模块

职责：
- 统一的校验结果结构：统计量、阈值、是否通过与来源信息
- 按检查名称确定性地合并多个报告
- 通过/失败日志：失败记为WARNING
"""

from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Sequence
import logging

import numpy as np

logger = logging.getLogger(__name__)


def _plain(value: Any) -> Any:
    """numpy 标量与数组转为可JSON序列化的Python对象"""
    if isinstance(value, np.ndarray):
        return value.tolist()
    if isinstance(value, np.generic):
        return value.item()
    if isinstance(value, dict):
        return {str(k): _plain(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_plain(v) for v in value]
    return value


@dataclass
class VerifyReport:
    """一次校验的结果"""
    check: str
    statistics: Dict[str, Any]
    thresholds: Dict[str, Any]
    passed: bool
    seed: Optional[int] = None
    config_hash: Optional[str] = None
    provenance: Dict[str, Any] = field(default_factory=dict)
    notes: List[str] = field(default_factory=list)

    def __post_init__(self):
        self.passed = bool(self.passed)
        status = "通过" if self.passed else "未通过"
        if self.passed:
            logger.info(f"校验 {self.check}: {status}")
        else:
            logger.warning(f"校验 {self.check}: {status}")

    def to_dict(self) -> Dict[str, Any]:
        return {
            'check': self.check,
            'statistics': _plain(self.statistics),
            'thresholds': _plain(self.thresholds),
            'pass': self.passed,
            'seed': self.seed,
            'config_hash': self.config_hash,
            'provenance': _plain(self.provenance),
            'notes': list(self.notes),
        }

    def with_config_hash(self, digest: str) -> 'VerifyReport':
        self.config_hash = digest
        return self


def trend_verdict(values: Sequence[float], floor: float, final_tolerance: float) -> Dict[str, bool]:
    """
    有限序列上的单调趋势判定

    Args:
        values: 按 r 递减（或层级递增）排列的偏差
        floor: 允许的数值噪声 v_{k+1} ≤ v_k + floor
        final_tolerance: 末值上限

    Returns:
        Dict[str, bool]: non_increasing, final_small
    """
    values = [float(v) for v in values]
    non_increasing = all(later <= earlier + floor for earlier, later in zip(values, values[1:]))
    final_small = bool(values) and values[-1] < final_tolerance
    return {'non_increasing': non_increasing, 'final_small': final_small}


def merge_reports(reports: Sequence[VerifyReport], check: str = "suite") -> VerifyReport:
    """
    合并多个报告，子报告按检查名称排序

    Args:
        reports: 子报告
        check: 合并后的名称

    Returns:
        VerifyReport: 全部通过时才通过
    """
    ordered = sorted(reports, key=lambda r: r.check)
    names = [r.check for r in ordered]
    keys = [name if names.count(name) == 1 else f"{name}[{names[:i].count(name)}]"
            for i, name in enumerate(names)]
    seeds = {r.seed for r in ordered if r.seed is not None}
    return VerifyReport(
        check=check,
        statistics={k: r.to_dict()['statistics'] for k, r in zip(keys, ordered)},
        thresholds={k: r.to_dict()['thresholds'] for k, r in zip(keys, ordered)},
        passed=all(r.passed for r in ordered),
        seed=seeds.pop() if len(seeds) == 1 else None,
        provenance={'reports': keys,
                    'passed': {k: r.passed for k, r in zip(keys, ordered)}},
        notes=[f"{k}: {n}" for k, r in zip(keys, ordered) for n in r.notes],
    )
