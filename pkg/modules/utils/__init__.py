#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
工具模块

提供项目中使用的异常定义与文件持久化工具
"""

from .exceptions import MultistableError, ValidationError, DomainError, ResourceLimitError, NumericError
from .file_manager import FileManager, config_hash, canonical_json

__all__ = [
    # 异常
    'MultistableError',
    'ValidationError',
    'DomainError',
    'ResourceLimitError',
    'NumericError',

    # 文件管理
    'FileManager',
    'config_hash',
    'canonical_json'
]
