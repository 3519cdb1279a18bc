#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
稳定分布随机数模块测试

测试计数器型生成器与对称稳定采样：
- Philox4x32-10 已知答案向量
- 随机流的确定性、派生与前进
- 按单元向量化采样与逐个采样一致
- 采样分布（特征函数、方差、四分位距）
"""

import os
import sys
import unittest

import numpy as np

# 添加项目根目录到Python路径
sys.path.append(os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

from modules.stable import (
    philox4x32,
    words_to_uniform,
    RngStream,
    derive_stream,
    StableParams,
    cms_transform,
    sample_stable,
    sample_stable_array,
    sample_stable_cells,
)
from modules.utils.exceptions import ValidationError


def _words(*values):
    return np.asarray(values, dtype=np.uint64)


class TestPhilox(unittest.TestCase):
    """Philox 已知答案测试类"""

    def test_zero_vector(self):
        out = philox4x32(_words(0, 0, 0, 0), _words(0, 0))
        self.assertEqual([int(w) for w in out], [0x6627e8d5, 0xe169c58d, 0xbc57ac4c, 0x9b00dbd8])

    def test_all_ones_vector(self):
        ones = 0xFFFFFFFF
        out = philox4x32(_words(ones, ones, ones, ones), _words(ones, ones))
        self.assertEqual([int(w) for w in out], [0x408f276d, 0x41c83b0e, 0xa20bc7c6, 0x6d5451fd])

    def test_pi_digits_vector(self):
        out = philox4x32(_words(0x243f6a88, 0x85a308d3, 0x13198a2e, 0x03707344), _words(0xa4093822, 0x299f31d0))
        self.assertEqual([int(w) for w in out], [0xd16cfe09, 0x94fdcceb, 0x5001e420, 0x24126ea1])

    def test_vectorised_matches_scalar(self):
        counters = np.stack([np.arange(5, dtype=np.uint64), np.zeros(5, dtype=np.uint64),
                             np.full(5, 7, dtype=np.uint64), np.zeros(5, dtype=np.uint64)])
        batch = philox4x32(counters, _words(11, 13))
        for i in range(5):
            single = philox4x32(_words(i, 0, 7, 0), _words(11, 13))
            np.testing.assert_array_equal(batch[:, i], single)

    def test_uniform_open_interval(self):
        u = words_to_uniform(_words(0, 0xFFFFFFFF), _words(0, 0xFFFFFFFF))
        self.assertTrue(np.all(u > 0.0))
        self.assertTrue(np.all(u < 1.0))


class TestRngStream(unittest.TestCase):
    """随机流测试类"""

    def test_seed_determinism(self):
        a = RngStream.from_seed(42).uniforms(8)
        b = RngStream.from_seed(42).uniforms(8)
        c = RngStream.from_seed(43).uniforms(8)
        np.testing.assert_array_equal(a, b)
        self.assertFalse(np.array_equal(a, c))

    def test_seed_range(self):
        with self.assertRaises(ValidationError):
            RngStream.from_seed(-1)
        with self.assertRaises(ValidationError):
            RngStream.from_seed(2 ** 64)

    def test_advance_matches_blocks(self):
        stream = RngStream.from_seed(7)
        blocks = stream.blocks(4)
        np.testing.assert_array_equal(stream.advance(3).blocks(1)[:, 0], blocks[:, 3])

    def test_derive_determinism(self):
        master = RngStream.from_seed(5)
        first = derive_stream(master, 3, 5)
        second = derive_stream(master, 3, 5)
        self.assertEqual(first, second)
        params = StableParams(1.5)
        self.assertEqual(sample_stable(params, first), sample_stable(params, second))
        self.assertEqual(first.substream, ((3, 5),))

    def test_derive_distinct_cells(self):
        master = RngStream.from_seed(5)
        self.assertNotEqual(derive_stream(master, 3, 5).key, derive_stream(master, 3, 6).key)
        self.assertNotEqual(derive_stream(master, 3, 5).key, derive_stream(master, 4, 5).key)

    def test_derive_keeps_counter(self):
        master = RngStream.from_seed(5).advance(9)
        self.assertEqual(derive_stream(master, 2, -3).counter, 9)


class TestSampler(unittest.TestCase):
    """对称稳定采样测试类"""

    def test_params_validation(self):
        with self.assertRaises(ValidationError):
            StableParams(0.0)
        with self.assertRaises(ValidationError):
            StableParams(1.5, -1.0)

    def test_cauchy_is_tangent(self):
        u1 = np.array([0.1, 0.4, 0.9])
        np.testing.assert_allclose(cms_transform(1.0, u1, np.full(3, 0.5)), np.tan(np.pi * (u1 - 0.5)))

    def test_scale_pathwise(self):
        stream = RngStream.from_seed(11)
        unit = sample_stable_array(StableParams(1.5, 1.0), stream, 50)
        doubled = sample_stable_array(StableParams(1.5, 2.0), stream, 50)
        np.testing.assert_array_equal(doubled, 2.0 * unit)

    def test_array_matches_single(self):
        stream = RngStream.from_seed(3)
        params = StableParams(0.8, 0.5)
        batch = sample_stable_array(params, stream, 6)
        for i in range(6):
            self.assertEqual(sample_stable(params, stream.advance(i)), batch[i])

    def test_cells_match_derived_streams(self):
        stream = RngStream.from_seed(21)
        cells = np.array([-2, 0, 5])
        alphas = np.array([0.7, 1.0, 2.0])
        scales = np.array([0.5, 1.0, 2.0])
        draws = sample_stable_cells(alphas, scales, stream, 4, cells, n=3)
        for i in range(3):
            for j, cell in enumerate(cells):
                child = derive_stream(stream.advance(i), 4, int(cell))
                expected = sample_stable(StableParams(alphas[j], scales[j]), child)
                self.assertEqual(draws[i, j], expected)

    def test_cells_independent(self):
        stream = RngStream.from_seed(8)
        draws = sample_stable_cells(np.array([2.0, 2.0]), np.array([1.0, 1.0]), stream, 3,
                                    np.array([5, 6]), n=20000)
        correlation = np.corrcoef(draws[:, 0], draws[:, 1])[0, 1]
        self.assertLess(abs(correlation), 0.03)

    def test_characteristic_function(self):
        n = 20000
        band = 4.0 / np.sqrt(n)
        thetas = np.array([0.5, 1.0, 2.0])
        for alpha, scale in [(0.6, 1.0), (1.0, 0.5), (1.5, 1.0), (1.8, 2.0), (2.0, 0.5)]:
            params = StableParams(alpha, scale)
            samples = sample_stable_array(params, RngStream.from_seed(100), n)
            phase = thetas[:, None] * samples[None, :]
            re = np.cos(phase).mean(axis=1)
            im = np.sin(phase).mean(axis=1)
            self.assertTrue(np.all(np.abs(re - params.cf(thetas)) <= band), f"α={alpha}, σ={scale}")
            self.assertTrue(np.all(np.abs(im) <= band), f"α={alpha}, σ={scale}")

    def test_gaussian_variance(self):
        samples = sample_stable_array(StableParams(2.0, 1.0), RngStream.from_seed(1), 200000)
        self.assertAlmostEqual(np.var(samples) / 2.0, 1.0, delta=0.02)

    def test_cauchy_interquartile_range(self):
        samples = sample_stable_array(StableParams(1.0, 1.0), RngStream.from_seed(2), 200000)
        q1, q3 = np.percentile(samples, [25, 75])
        self.assertAlmostEqual((q3 - q1) / 2.0, 1.0, delta=0.02)


if __name__ == "__main__":
    unittest.main()
