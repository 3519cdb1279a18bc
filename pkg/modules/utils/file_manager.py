#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
文件管理模块

职责：
- 保存路径、特征函数和验证报告为CSV和JSON格式
- 所有写入均为原子操作（临时文件 + os.replace）
- 计算配置哈希，保证输出可追溯
"""

import hashlib
import json
import os
import tempfile
from pathlib import Path
from typing import Any, Dict, Optional, Union
import logging

import pandas as pd

# 导入配置
from config.settings import settings

logger = logging.getLogger(__name__)


def canonical_json(data: Any) -> str:
    """规范化JSON文本（键排序、无多余空白）"""
    return json.dumps(data, sort_keys=True, separators=(',', ':'), ensure_ascii=False, default=_json_default)


def config_hash(config: Dict[str, Any]) -> str:
    """
    计算配置哈希

    Args:
        config: 已解析的完整配置

    Returns:
        str: 规范化JSON的SHA-256十六进制摘要
    """
    return hashlib.sha256(canonical_json(config).encode('utf-8')).hexdigest()


def _json_default(value: Any) -> Any:
    """numpy标量与路径的JSON序列化"""
    if hasattr(value, 'item'):
        return value.item()
    if hasattr(value, 'tolist'):
        return value.tolist()
    if isinstance(value, Path):
        return str(value)
    raise TypeError(f"无法序列化的类型: {type(value).__name__}")


class FileManager:
    """文件管理服务"""

    def __init__(self, output_dir: Optional[Union[str, Path]] = None):
        """
        初始化文件管理器

        Args:
            output_dir: 输出目录，默认为配置中的OUTPUT_DIR
        """
        self.supported_formats = ['json', 'csv']
        self.output_dir = Path(output_dir) if output_dir is not None else settings.OUTPUT_DIR
        self.float_format = f"%.{settings.CSV_SIGNIFICANT_DIGITS}g"

    def get_output_dir(self) -> Path:
        """获取输出目录"""
        self.output_dir.mkdir(parents=True, exist_ok=True)
        return self.output_dir

    def resolve(self, name: Union[str, Path]) -> Path:
        """将相对文件名解析到输出目录下"""
        path = Path(name)
        return path if path.is_absolute() else self.get_output_dir() / path

    def _atomic_write(self, output_path: Path, text: str) -> None:
        """写入临时文件后原子替换目标文件"""
        output_path.parent.mkdir(parents=True, exist_ok=True)
        fd, tmp_name = tempfile.mkstemp(dir=str(output_path.parent), prefix=f".{output_path.name}.", suffix=".tmp")
        try:
            with os.fdopen(fd, 'w', encoding='utf-8', newline='') as f:
                f.write(text)
            os.replace(tmp_name, output_path)
        except BaseException:
            if os.path.exists(tmp_name):
                os.unlink(tmp_name)
            raise

    def save_json(self, data: Dict[str, Any], output_path: Union[str, Path]) -> Path:
        """
        保存JSON文件

        Args:
            data: 数据字典
            output_path: 输出文件路径（相对路径放在输出目录下）

        Returns:
            Path: 实际写入的路径
        """
        path = self.resolve(output_path)
        try:
            text = json.dumps(data, ensure_ascii=False, indent=2, sort_keys=True, default=_json_default) + "\n"
            self._atomic_write(path, text)
            logger.info(f"JSON文件已保存: {path}")
            return path
        except Exception as e:
            logger.error(f"保存JSON文件失败: {str(e)}")
            raise RuntimeError(f"保存JSON文件失败: {str(e)}")

    def load_json(self, file_path: Union[str, Path]) -> Dict[str, Any]:
        """
        加载JSON文件

        Args:
            file_path: 文件路径

        Returns:
            数据字典
        """
        with open(file_path, 'r', encoding='utf-8') as f:
            return json.load(f)

    def save_csv(self, frame: pd.DataFrame, output_path: Union[str, Path]) -> Path:
        """
        保存CSV文件（'.'小数点、无索引、17位有效数字）

        Args:
            frame: 数据表
            output_path: 输出文件路径

        Returns:
            Path: 实际写入的路径
        """
        path = self.resolve(output_path)
        try:
            text = frame.to_csv(index=False, float_format=self.float_format, lineterminator="\n")
            self._atomic_write(path, text)
            logger.info(f"CSV文件已保存: {path} ({len(frame)} 行)")
            return path
        except Exception as e:
            logger.error(f"保存CSV文件失败: {str(e)}")
            raise RuntimeError(f"保存CSV文件失败: {str(e)}")

    def load_csv(self, file_path: Union[str, Path]) -> pd.DataFrame:
        """加载CSV文件"""
        return pd.read_csv(file_path, float_precision='round_trip')

    def create_output_structure(self, run_name: str, config: Dict[str, Any]) -> Dict[str, Path]:
        """
        创建输出目录结构

        Args:
            run_name: 运行名称（命令名）
            config: 已解析的配置，用于生成确定性的目录名

        Returns:
            Dict[str, Path]: 各类输出文件的路径
        """
        digest = config_hash(config)[:12]
        output_dir = self.get_output_dir() / f"{run_name}_{digest}"
        output_dir.mkdir(parents=True, exist_ok=True)

        return {
            "output_dir": output_dir,
            "json": output_dir / f"{run_name}.json",
            "csv": output_dir / f"{run_name}.csv",
        }
