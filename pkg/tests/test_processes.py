#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
多稳定过程模块测试

测试过程核与路径模拟：
- 各核的参数假设校验
- 边际特征函数的闭式例子
- 路径确定性、批量与单条一致、Y(0) = 0
- 增量指数 D(t,v) 与连续模检查
"""

import math
import os
import sys
import unittest
from unittest import mock

import numpy as np

# 添加项目根目录到Python路径
sys.path.append(os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

from modules.spaces import IndexFunction, QuadratureSpec
from modules.stable import RngStream
from modules.process import (
    LfmmKernel,
    ReverseOUKernel,
    WeightedLevyKernel,
    WeightFunction,
    make_kernel,
    normalize_kind,
    sample_path,
    sample_paths,
    simulation_window,
    marginal_cf,
    increment_exponent,
    continuity_modulus_check,
)
from modules.verify import ecf, theta_grid
from modules.utils.exceptions import ValidationError


class TestKernelValidation(unittest.TestCase):
    """过程核参数校验测试类"""

    def test_reverse_ou_bounds(self):
        # √1.5 ≈ 1.2247 > a = 1.2
        alpha = IndexFunction.sinusoidal(1.35, 0.15, 2.0, 1.2, 1.5)
        with self.assertRaises(ValidationError) as ctx:
            ReverseOUKernel(alpha, 1.0)
        self.assertIn("√b", ctx.exception.inequality)
        accepted = IndexFunction.sinusoidal(1.875, 0.075, 2.0, 1.8, 1.95)
        self.assertEqual(ReverseOUKernel(accepted, 0.5).rate, 0.5)

    def test_reverse_ou_rate_and_continuity(self):
        alpha = IndexFunction.constant(1.8)
        with self.assertRaises(ValidationError):
            ReverseOUKernel(alpha, 0.0)
        with self.assertRaises(ValidationError):
            ReverseOUKernel(IndexFunction.piecewise_constant([0.5], [1.6, 1.7]), 1.0)

    def test_lfmm_h_range(self):
        alpha = IndexFunction.sinusoidal(1.5, 0.3, 2.0, 1.2, 1.8)
        with self.assertRaises(ValidationError):
            LfmmKernel(alpha, 0.2)
        with self.assertRaises(ValidationError):
            LfmmKernel(alpha, 1.0)
        self.assertEqual(LfmmKernel(IndexFunction.constant(1.5), 0.5).h, 0.5)

    def test_lfmm_needs_nonzero_coefficients(self):
        with self.assertRaises(ValidationError):
            LfmmKernel(IndexFunction.constant(1.5), 0.5, 0.0, 0.0)

    def test_make_kernel(self):
        alpha = IndexFunction.constant(1.8)
        self.assertIsInstance(make_kernel('levy', {}, alpha), WeightedLevyKernel)
        self.assertIsInstance(make_kernel('rou', {'rate': 2.0}, alpha), ReverseOUKernel)
        self.assertIsInstance(make_kernel('lfmm', {'h': 0.7}, alpha), LfmmKernel)
        with self.assertRaises(ValidationError):
            make_kernel('lfmm', {}, alpha)
        with self.assertRaises(ValidationError):
            normalize_kind('brownian')

    def test_weight_function(self):
        weight = WeightFunction.from_config({'kind': 'affine', 'intercept': 1.0, 'slope': 2.0})
        np.testing.assert_allclose(weight(np.array([0.0, 0.5])), [1.0, 2.0])
        with self.assertRaises(ValidationError):
            WeightFunction('sinusoidal', {'mid': 1.0, 'amp': 0.5})


class TestKernelSections(unittest.TestCase):
    """截面与局部形式测试类"""

    def test_levy_negative_time(self):
        kernel = WeightedLevyKernel(IndexFunction.constant(1.5))
        np.testing.assert_array_equal(kernel(-1.0, np.array([-0.5, 0.5])), [-1.0, 0.0])

    def test_lfmm_zero_exponent_convention(self):
        # h = 1/α 时 f(t,·) = 1_[0,t)
        kernel = LfmmKernel(IndexFunction.constant(1.5), 1.0 / 1.5)
        np.testing.assert_allclose(kernel(1.0, np.array([-0.5, 0.5, 1.5])), [0.0, 1.0, 0.0], atol=1e-12)

    def test_lfmm_pullback_difference(self):
        alpha = IndexFunction.sinusoidal(1.5, 0.3, 2.0, 1.2, 1.8)
        kernel = LfmmKernel(alpha, 0.7)
        u, r = 0.3, 0.5
        z = np.array([-2.0, 0.1, 0.4, 3.0])
        expected = kernel(u + r * 1.0, u + r * z) - kernel(u + r * 0.25, u + r * z)
        np.testing.assert_allclose(kernel.pullback_difference(u, r, 1.0, 0.25)(z), expected, rtol=1e-10, atol=1e-12)

    def test_lfmm_one_sided_support(self):
        alpha = IndexFunction.constant(1.5)
        causal = LfmmKernel(alpha, 0.7)
        self.assertEqual(causal.section(1.0).support, (-math.inf, 1.0))
        self.assertEqual(causal.section(-0.5).support, (-math.inf, 0.0))
        anticausal = LfmmKernel(alpha, 0.7, 0.0, 1.0)
        self.assertEqual(anticausal.section(1.0).support, (0.0, math.inf))
        self.assertEqual(LfmmKernel(alpha, 0.7, 1.0, 1.0).section(1.0).support, (-math.inf, math.inf))
        np.testing.assert_array_equal(causal(1.0, np.array([1.5, 4.0])), [0.0, 0.0])
        self.assertEqual(causal.pullback_difference(0.3, 0.5, 1.0, 0.25).support, (-math.inf, 1.0))

    def test_local_forms(self):
        alpha = IndexFunction.sinusoidal(1.5, 0.3, 2.0, 1.2, 1.8)
        levy = WeightedLevyKernel(alpha, WeightFunction('constant', {'value': 2.0})).local_form(0.5)
        self.assertAlmostEqual(levy.h_exponent, 1.0 / 1.8, places=12)
        self.assertEqual(levy.section(1.0)(np.array([0.5]))[0], 2.0)
        lfmm = LfmmKernel(alpha, 0.7).local_form(0.5)
        self.assertEqual(lfmm.h_exponent, 0.7)
        self.assertAlmostEqual(lfmm.frozen_alpha, 1.8, places=12)


class TestMarginalCf(unittest.TestCase):
    """边际特征函数测试类"""

    @classmethod
    def setUpClass(cls):
        cls.quad = QuadratureSpec()

    def test_zero_theta(self):
        kernel = LfmmKernel(IndexFunction.sinusoidal(1.5, 0.3, 2.0, 1.2, 1.8), 0.7)
        self.assertEqual(marginal_cf(kernel, [0.5, 1.0], [0.0, 0.0], quad=self.quad), 1.0)

    def test_levy_cauchy(self):
        kernel = WeightedLevyKernel(IndexFunction.constant(1.0))
        self.assertAlmostEqual(marginal_cf(kernel, [2.0], [1.0], quad=self.quad), math.exp(-2.0), places=9)

    def test_reverse_ou_gaussian(self):
        # ∫_0^∞ e^{−2x}dx = 1/2
        kernel = ReverseOUKernel(IndexFunction.constant(2.0), 1.0)
        self.assertAlmostEqual(marginal_cf(kernel, [0.0], [1.0], quad=self.quad), math.exp(-0.5), places=9)

    def test_length_mismatch(self):
        kernel = WeightedLevyKernel(IndexFunction.constant(1.5))
        with self.assertRaises(ValidationError):
            marginal_cf(kernel, [1.0, 2.0], [1.0])

    def test_alpha_must_match_kernel(self):
        kernel = WeightedLevyKernel(IndexFunction.constant(1.5))
        with self.assertRaises(ValidationError):
            marginal_cf(kernel, [1.0], [1.0], IndexFunction.constant(1.4))


class TestIncrementExponent(unittest.TestCase):
    """增量指数与连续模测试类"""

    @classmethod
    def setUpClass(cls):
        cls.quad = QuadratureSpec()

    def test_levy_length(self):
        kernel = WeightedLevyKernel(IndexFunction.sinusoidal(1.5, 0.3, 2.0, 1.2, 1.8))
        self.assertAlmostEqual(increment_exponent(kernel, 0.75, 0.25, quad=self.quad), 0.5, places=9)
        self.assertEqual(increment_exponent(kernel, 0.4, 0.4, quad=self.quad), 0.0)

    def test_lfmm_self_similar(self):
        # 常数 α 时 D(δ, 0) = δ^{hα}·D(1, 0)
        kernel = LfmmKernel(IndexFunction.constant(1.5), 0.7)
        whole = increment_exponent(kernel, 1.0, 0.0, quad=self.quad)
        half = increment_exponent(kernel, 0.5, 0.0, quad=self.quad)
        self.assertAlmostEqual(half / whole, 0.5 ** (0.7 * 1.5), delta=1e-4)

    def test_continuity_modulus_levy(self):
        kernel = WeightedLevyKernel(IndexFunction.constant(1.5))
        report = continuity_modulus_check(kernel, None, (0.0, 1.0), 1.0 / 1.5, self.quad)
        self.assertTrue(report.passed)
        self.assertAlmostEqual(report.statistics['c1'], 1.0, places=6)

    def test_continuity_modulus_rejects_eta(self):
        kernel = WeightedLevyKernel(IndexFunction.constant(1.5))
        with self.assertRaises(ValidationError):
            continuity_modulus_check(kernel, None, (0.0, 1.0), 0.5, self.quad)
        with self.assertRaises(ValidationError):
            continuity_modulus_check(WeightedLevyKernel(IndexFunction.constant(1.0)), None, (0.0, 1.0), 1.0,
                                     self.quad)


class TestPaths(unittest.TestCase):
    """路径模拟测试类"""

    @classmethod
    def setUpClass(cls):
        cls.quad = QuadratureSpec()
        cls.alpha = IndexFunction.sinusoidal(1.5, 0.3, 2.0, 1.2, 1.8)
        cls.stream = RngStream.from_seed(314)
        cls.times = np.linspace(0.0, 1.0, 9)

    def test_start_at_zero(self):
        for kernel in (WeightedLevyKernel(self.alpha), LfmmKernel(self.alpha, 0.7)):
            path = sample_path(kernel, self.times, level=6, stream=self.stream, quad=self.quad, max_window=8.0)
            self.assertEqual(path.values[0], 0.0)

    def test_levy_endpoint_is_total_mass(self):
        kernel = WeightedLevyKernel(self.alpha)
        path = sample_path(kernel, self.times, level=5, stream=self.stream, quad=self.quad)
        self.assertEqual(path.window, (0.0, 1.0))
        self.assertEqual(path.truncated_mass.max(), 0.0)
        self.assertGreater(abs(path.values[-1]), 0.0)

    def test_determinism(self):
        kernel = LfmmKernel(self.alpha, 0.7)
        first = sample_path(kernel, self.times, level=6, stream=self.stream, quad=self.quad, max_window=8.0)
        second = sample_path(kernel, self.times, level=6, stream=self.stream, quad=self.quad, max_window=8.0)
        np.testing.assert_array_equal(first.values, second.values)

    def test_batch_matches_single(self):
        kernel = WeightedLevyKernel(self.alpha, WeightFunction('affine', {'intercept': 1.0, 'slope': 0.5}))
        paths = sample_paths(kernel, self.times, level=6, stream=self.stream, n_paths=4, quad=self.quad,
                             chunk_size=3, show_progress=False)
        for i, path in enumerate(paths):
            single = sample_path(kernel, self.times, level=6, stream=self.stream.advance(i), quad=self.quad)
            np.testing.assert_array_equal(path.values, single.values)
            self.assertEqual(path.stream, self.stream.advance(i))

    def test_reverse_ou_window(self):
        kernel = ReverseOUKernel(IndexFunction.constant(1.8), 1.0)
        window, deficit = simulation_window(kernel, [0.0, 1.0], self.quad)
        self.assertEqual(window[0], 0.0)
        self.assertLessEqual(deficit, self.quad.truncation_epsilon)
        capped, capped_deficit = simulation_window(kernel, [0.0, 1.0], self.quad, max_window=4.0)
        self.assertLessEqual(capped[1] - capped[0], 4.0)
        self.assertGreater(capped_deficit, self.quad.truncation_epsilon)

    def test_lfmm_window_pads_left_only(self):
        kernel = LfmmKernel(IndexFunction.constant(1.5), 0.7)
        window, _ = simulation_window(kernel, [0.0, 1.0], self.quad, max_window=8.0)
        self.assertEqual(window[1], 1.0)
        self.assertLess(window[0], 0.0)
        self.assertAlmostEqual(window[1] - window[0], 8.0)

    def test_uncached_weights_bit_identical(self):
        kernel = LfmmKernel(self.alpha, 0.7)
        single = sample_path(kernel, self.times, level=6, stream=self.stream, quad=self.quad, max_window=8.0)
        batch = sample_paths(kernel, self.times, level=6, stream=self.stream, n_paths=5, quad=self.quad,
                             max_window=8.0, chunk_size=2, show_progress=False)
        with mock.patch("modules.process.paths._WEIGHT_CACHE_ELEMENTS", 0):
            single_uncached = sample_path(kernel, self.times, level=6, stream=self.stream, quad=self.quad,
                                          max_window=8.0)
            batch_uncached = sample_paths(kernel, self.times, level=6, stream=self.stream, n_paths=5,
                                          quad=self.quad, max_window=8.0, chunk_size=2, show_progress=False)
        np.testing.assert_array_equal(single.values, single_uncached.values)
        for cached, uncached in zip(batch, batch_uncached):
            np.testing.assert_array_equal(cached.values, uncached.values)

    def test_frame_and_sidecar(self):
        kernel = WeightedLevyKernel(self.alpha)
        path = sample_path(kernel, self.times, level=4, stream=self.stream, quad=self.quad)
        frame = path.to_frame()
        self.assertEqual(list(frame.columns), ['t', 'value'])
        sidecar = path.sidecar()
        self.assertEqual(sidecar['level'], 4)
        self.assertEqual(sidecar['kernel']['kind'], 'weighted_levy')

    def test_times_must_increase(self):
        kernel = WeightedLevyKernel(self.alpha)
        with self.assertRaises(ValidationError):
            sample_path(kernel, [1.0, 0.5], level=4, stream=self.stream)
        with self.assertRaises(ValidationError):
            sample_path(kernel, self.times, level=4)


class TestPathLaws(unittest.TestCase):
    """路径有限维分布测试类（蒙特卡洛）"""

    @classmethod
    def setUpClass(cls):
        cls.quad = QuadratureSpec()
        cls.n = 10000

    def _values(self, kernel, times, seed, level, max_window=None):
        paths = sample_paths(kernel, times, level=level, stream=RngStream.from_seed(seed), n_paths=self.n,
                             quad=self.quad, max_window=max_window, show_progress=False)
        return np.vstack([path.values for path in paths])

    def test_lfmm_stationary_increments(self):
        # 常数 α 时 Y(2δ) − Y(δ) 与 Y(δ) − Y(0) 同分布
        kernel = LfmmKernel(IndexFunction.constant(1.5), 0.7)
        delta = 0.25
        values = self._values(kernel, [0.0, delta, 2.0 * delta], 27, level=6, max_window=16.0)
        grid = theta_grid(1, 3.0, 13)
        first = ecf(values[:, 1] - values[:, 0], grid)
        second = ecf(values[:, 2] - values[:, 1], grid)
        gap = max(np.max(np.abs(first.re - second.re)), np.max(np.abs(first.im - second.im)))
        self.assertLessEqual(gap, 2.0 * first.band)

    def test_levy_independent_increments(self):
        # (Y(t₂) − Y(t₁), Y(t₁)) 的联合特征函数等于边际之积
        kernel = WeightedLevyKernel(IndexFunction.sinusoidal(1.5, 0.3, 2.0, 1.2, 1.8))
        values = self._values(kernel, [0.0, 0.5, 1.0], 28, level=6)
        pair = np.column_stack([values[:, 2] - values[:, 1], values[:, 1]])
        grid = theta_grid(2, 2.0, 25)
        joint = ecf(pair, grid)
        left = ecf(pair[:, 0], grid[:, 0])
        right = ecf(pair[:, 1], grid[:, 1])
        product = (left.re + 1j * left.im) * (right.re + 1j * right.im)
        gap = np.max(np.abs(joint.re + 1j * joint.im - product))
        self.assertLessEqual(gap, 2.0 * joint.band)


if __name__ == "__main__":
    unittest.main()
