#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
异常定义模块

职责：
- 定义工具库统一的异常层次
- 为参数校验错误携带被违反的不等式
- 为数值不收敛错误携带最后两次估计值
"""

from typing import Optional, Tuple


class MultistableError(RuntimeError):
    """工具库所有错误的基类"""


class ValidationError(MultistableError, ValueError):
    """参数或前提条件校验失败"""

    def __init__(self, message: str, inequality: Optional[str] = None, reference: Optional[str] = None):
        self.inequality = inequality
        self.reference = reference
        detail = message
        if inequality:
            detail = f"{detail} [违反: {inequality}]"
        if reference:
            detail = f"{detail} ({reference})"
        super().__init__(detail)


class DomainError(ValidationError):
    """被积函数不可积（奇异点或尾部衰减不足）"""


class ResourceLimitError(MultistableError):
    """超出配置的资源上限（单元数、窗口长度等）"""


class NumericError(MultistableError):
    """数值计算失败：积分不收敛或求根括号未找到"""

    def __init__(self, message: str, estimates: Optional[Tuple[float, ...]] = None):
        self.estimates = tuple(estimates) if estimates is not None else ()
        detail = message
        if self.estimates:
            detail = f"{detail} (最后估计值: {', '.join(repr(float(v)) for v in self.estimates)})"
        super().__init__(detail)
