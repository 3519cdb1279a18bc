#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
多稳定随机测度工具 - 主处理入口

负责解析命令行与配置文件，分派到各命令，并把错误映射为退出码：
0 通过，1 校验未通过或未预期错误，2 参数/前提条件错误，3 资源上限，4 数值失败
"""

import os
import sys
import logging
from typing import Optional, Sequence

# 添加项目根目录到Python路径
sys.path.append(os.path.dirname(os.path.abspath(__file__)))

from modules.cli import load_config, run_command
from modules.utils.exceptions import NumericError, ResourceLimitError, ValidationError

logger = logging.getLogger("main")

EXIT_VALIDATION = 2
EXIT_RESOURCE = 3
EXIT_NUMERIC = 4


def main(argv: Optional[Sequence[str]] = None) -> int:
    """主处理函数 - 解析配置、校验并执行命令"""
    try:
        config = load_config(argv).validate()
        return run_command(config)
    except ValidationError as e:
        logger.error(f"参数校验失败: {e}")
        print(f"错误：{e}", file=sys.stderr)
        return EXIT_VALIDATION
    except ResourceLimitError as e:
        logger.error(f"超出资源上限: {e}")
        print(f"错误：{e}", file=sys.stderr)
        return EXIT_RESOURCE
    except NumericError as e:
        logger.error(f"数值计算失败: {e}")
        print(f"错误：{e}", file=sys.stderr)
        return EXIT_NUMERIC
    except Exception as e:
        logger.error(f"处理过程中发生错误: {str(e)}")
        print(f"处理过程中发生错误: {str(e)}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    exit_code = main()
    sys.exit(exit_code)
