#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
测试运行器
按模块依赖分阶段运行测试文件：数值基础 → 核心模块 → 校验与命令行

用法：
    python run_tests.py                 # 全部阶段
    python run_tests.py verify cli      # 只运行名称中含关键字的文件
"""

import sys
import subprocess
import time
from pathlib import Path
from typing import Dict, List, Sequence, Tuple

# 添加项目根目录到Python路径
project_root = Path(__file__).parent.parent
sys.path.insert(0, str(project_root))

# 后一阶段依赖前一阶段的模块
TEST_STAGES: Dict[str, List[str]] = {
    "数值基础": ["test_function_spaces.py", "test_stable_rng.py"],
    "核心模块": ["test_multistable_core.py", "test_processes.py"],
    "校验与命令行": ["test_verify.py", "test_cli.py"],
}

# 失败时打印的 unittest 输出尾部长度
_TAIL_CHARS = 2000


def select_test_files(keywords: Sequence[str] = ()) -> List[Tuple[str, str]]:
    """
    按阶段顺序选出要运行的文件

    Args:
        keywords: 文件名关键字，为空时选出全部

    Returns:
        List[Tuple[str, str]]: (阶段名, 文件名)
    """
    selected = []
    for stage, files in TEST_STAGES.items():
        for test_file in files:
            if not keywords or any(k in test_file for k in keywords):
                selected.append((stage, test_file))
    return selected


def run_test_file(test_file: str) -> Tuple[bool, float]:
    """在子进程中运行单个测试文件，返回 (是否通过, 耗时)"""
    start_time = time.time()
    try:
        result = subprocess.run(
            [sys.executable, test_file],
            capture_output=True,
            text=True,
            cwd=str(Path(__file__).parent)
        )
    except OSError as e:
        print(f"❌ 无法启动 {test_file}: {e}")
        return False, time.time() - start_time

    duration = time.time() - start_time
    # unittest 的结果写在 stderr
    summary = result.stderr.strip().splitlines()[-1] if result.stderr.strip() else ""
    if result.returncode == 0:
        print(f"  ✅ {test_file}  {summary}  ({duration:.1f}秒)")
    else:
        print(f"  ❌ {test_file}  {summary}  ({duration:.1f}秒)")
        print(result.stderr[-_TAIL_CHARS:])
    return result.returncode == 0, duration


def main(argv: Sequence[str] = ()) -> int:
    """主函数"""
    selected = select_test_files(argv)
    if not selected:
        print(f"⚠️  没有匹配 {list(argv)} 的测试文件")
        return 1

    tests_dir = Path(__file__).parent
    results: Dict[str, List[bool]] = {}
    total_time = 0.0
    current_stage = None
    for stage, test_file in selected:
        if stage != current_stage:
            print(f"\n== {stage} ==")
            current_stage = stage
        if not (tests_dir / test_file).exists():
            print(f"  ⚠️  测试文件不存在: {test_file}")
            results.setdefault(stage, []).append(False)
            continue
        passed, duration = run_test_file(test_file)
        total_time += duration
        results.setdefault(stage, []).append(passed)

    print(f"\n{'=' * 60}")
    for stage, outcomes in results.items():
        print(f"{stage}: {sum(outcomes)}/{len(outcomes)} 通过")
    failed = sum(not ok for outcomes in results.values() for ok in outcomes)
    print(f"总耗时 {total_time:.1f}秒")
    if failed:
        print(f"⚠️  {failed} 个测试文件失败")
        return 1
    print("全部测试文件通过")
    return 0


if __name__ == "__main__":
    sys.exit(main(sys.argv[1:]))
