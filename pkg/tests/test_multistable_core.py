#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
多稳定测度核心模块测试

测试特征函数、二进近似模拟与样本积分：
- 联合特征函数的闭式例子
- 左端点指数、网格对齐、单元上限
- 批量与单次模拟逐位一致
- 样本积分、集合测度、截断质量
- 缩放特征函数
"""

import math
import os
import sys
import tempfile
import unittest

import numpy as np

# 添加项目根目录到Python路径
sys.path.append(os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

from modules.spaces import IndexFunction, IntervalSet, QuadratureSpec, RealFunction
from modules.stable import RngStream, StableParams, derive_stream, sample_stable
from modules.measure import (
    CfSpec,
    cf_joint,
    cf_on_grid,
    scaled_cf,
    scaled_exponents,
    aligned_cells,
    simulate_increments,
    simulate_increment_batch,
    iter_increment_chunks,
    save_increments,
    load_increments,
    integrate_sample,
    measure_of_set,
    coverage_deficit,
    function_weights,
    set_weights,
    weighted_sum,
)
from modules.verify import ecf
from modules.utils.exceptions import ResourceLimitError, ValidationError
from modules.utils.file_manager import FileManager


class TestCharacteristicFunction(unittest.TestCase):
    """特征函数测试类"""

    @classmethod
    def setUpClass(cls):
        cls.quad = QuadratureSpec()
        cls.unit = RealFunction.indicator([[0.0, 1.0]])
        cls.sinusoidal = IndexFunction.sinusoidal(1.5, 0.3, 2.0, 1.2, 1.8)

    def test_zero_theta(self):
        spec = CfSpec((self.unit, RealFunction.indicator([[1.0, 2.0]])), (0.0, 0.0), self.sinusoidal)
        self.assertEqual(cf_joint(spec, self.quad), 1.0)

    def test_gaussian_unit_indicator(self):
        spec = CfSpec((self.unit,), (1.0,), IndexFunction.constant(2.0))
        self.assertAlmostEqual(cf_joint(spec, self.quad), math.exp(-1.0), places=9)

    def test_disjoint_supports(self):
        alpha = IndexFunction.piecewise_constant([1.0], [1.0, 2.0])
        spec = CfSpec((self.unit, RealFunction.indicator([[1.0, 2.0]])), (1.0, 2.0), alpha)
        self.assertAlmostEqual(cf_joint(spec, self.quad), math.exp(-5.0), delta=1e-11)

    def test_length_mismatch(self):
        with self.assertRaises(ValidationError):
            CfSpec((self.unit,), (1.0, 2.0), self.sinusoidal)

    def test_grid(self):
        spec = CfSpec((self.unit,), (0.0,), IndexFunction.constant(2.0))
        grid = np.array([[-1.0], [0.0], [2.0]])
        np.testing.assert_allclose(cf_on_grid(spec, grid, self.quad), np.exp(-grid[:, 0] ** 2), atol=1e-9)

    def test_dyadic_alpha_close_to_limit(self):
        spec = CfSpec((self.unit,), (1.5,), self.sinusoidal)
        exact = cf_joint(spec, self.quad)
        coarse = cf_joint(spec.with_alpha(self.sinusoidal.dyadic(2)), self.quad)
        fine = cf_joint(spec.with_alpha(self.sinusoidal.dyadic(8)), self.quad)
        self.assertLess(abs(fine - exact), abs(coarse - exact))
        self.assertLess(abs(fine - exact), 1e-3)


class TestScaledCf(unittest.TestCase):
    """缩放特征函数测试类"""

    @classmethod
    def setUpClass(cls):
        cls.quad = QuadratureSpec()
        cls.functions = (RealFunction.indicator([[0.0, 1.0]]), RealFunction.indicator([[-0.5, 0.5]]))
        cls.sinusoidal = IndexFunction.sinusoidal(1.5, 0.3, 2.0, 1.2, 1.8)

    def test_constant_alpha(self):
        alpha = IndexFunction.constant(1.4)
        spec = CfSpec(self.functions, (1.0, -0.5), alpha)
        for r in (1.0, 0.1, 1e-3):
            self.assertAlmostEqual(scaled_cf(spec, 0.3, r, self.quad), cf_joint(spec, self.quad), delta=1e-9)

    def test_identity_scaling(self):
        spec = CfSpec(self.functions, (1.0, 0.7), self.sinusoidal)
        self.assertAlmostEqual(scaled_cf(spec, 0.0, 1.0, self.quad), cf_joint(spec, self.quad), delta=1e-9)

    def test_convergence_to_frozen(self):
        spec = CfSpec(self.functions, (1.0, 0.7), self.sinusoidal)
        frozen = spec.with_alpha(IndexFunction.constant(self.sinusoidal(0.3)))
        target = cf_joint(frozen, self.quad)
        deviations = [abs(scaled_cf(spec, 0.3, r, self.quad) - target) for r in (1e-1, 1e-2, 1e-3, 1e-4)]
        self.assertTrue(all(d2 < d1 for d1, d2 in zip(deviations, deviations[1:])))

    def test_shared_mesh_exponents(self):
        spec = CfSpec(self.functions, (1.0, 0.7), self.sinusoidal)
        scaled, frozen = scaled_exponents(spec, 0.3, 1e-3, self.quad)
        self.assertAlmostEqual(math.exp(-scaled), scaled_cf(spec, 0.3, 1e-3, self.quad), delta=1e-9)
        self.assertGreater(frozen, 0.0)

    def test_requires_positive_r_and_bounded_support(self):
        spec = CfSpec(self.functions, (1.0, 0.7), self.sinusoidal)
        with self.assertRaises(ValidationError):
            scaled_cf(spec, 0.0, 0.0, self.quad)
        unbounded = CfSpec((RealFunction.exponential(0.0, 1.0),), (1.0,), self.sinusoidal)
        with self.assertRaises(ValidationError):
            scaled_cf(unbounded, 0.0, 0.5, self.quad)


class TestSimulator(unittest.TestCase):
    """二进近似模拟测试类"""

    @classmethod
    def setUpClass(cls):
        cls.stream = RngStream.from_seed(2024)
        cls.sinusoidal = IndexFunction.sinusoidal(1.5, 0.3, 2.0, 1.2, 1.8)

    def test_aligned_cells(self):
        self.assertEqual(aligned_cells((0.3, 0.7), 2), (1, 3))
        self.assertEqual(aligned_cells((-1.0, 1.0), 3), (-8, 8))
        with self.assertRaises(ValidationError):
            aligned_cells((1.0, 1.0), 3)
        with self.assertRaises(ValidationError):
            aligned_cells((0.0, math.inf), 3)

    def test_domain_alignment(self):
        increments = simulate_increments(self.sinusoidal, 2, (0.3, 0.7), self.stream)
        self.assertEqual(increments.domain, (0.25, 0.75))
        self.assertEqual(increments.n_cells, 2)

    def test_left_endpoint_alpha(self):
        increments = simulate_increments(self.sinusoidal, 4, (0.0, 1.0), self.stream)
        np.testing.assert_array_equal(increments.alphas_used, self.sinusoidal(increments.cell_edges[:-1]))

    def test_single_cell(self):
        increments = simulate_increments(self.sinusoidal, 0, (0.0, 1.0), self.stream)
        self.assertEqual(increments.n_cells, 1)
        expected = sample_stable(StableParams(self.sinusoidal(0.0), 1.0), derive_stream(self.stream, 0, 0))
        self.assertEqual(increments.draws[0], expected)

    def test_cell_cap(self):
        with self.assertRaises(ResourceLimitError):
            simulate_increments(self.sinusoidal, 10, (0.0, 1.0), self.stream, max_cells=100)

    def test_draws_read_only(self):
        increments = simulate_increments(self.sinusoidal, 3, (0.0, 1.0), self.stream)
        with self.assertRaises(ValueError):
            increments.draws[0] = 0.0

    def test_batch_rows_match_single(self):
        batch = simulate_increment_batch(self.sinusoidal, 5, (0.0, 1.0), self.stream, 6, chunk_size=4)
        for i in range(6):
            single = simulate_increments(self.sinusoidal, 5, (0.0, 1.0), self.stream.advance(i))
            np.testing.assert_array_equal(batch.draws[i], single.draws)
            np.testing.assert_array_equal(batch.realization(i).draws, single.draws)

    def test_chunking_does_not_change_draws(self):
        rows = [chunk for _, chunk in iter_increment_chunks(self.sinusoidal, 4, (0.0, 1.0), self.stream, 7, 3)]
        whole = simulate_increment_batch(self.sinusoidal, 4, (0.0, 1.0), self.stream, 7, chunk_size=7)
        np.testing.assert_array_equal(np.vstack(rows), whole.draws)

    def test_total_mass_law(self):
        n = 10000
        batch = simulate_increment_batch(IndexFunction.constant(1.5), 6, (0.0, 1.0), self.stream, n)
        totals = batch.draws.sum(axis=1)
        thetas = np.array([0.5, 1.0, 2.0])
        re = np.cos(thetas[:, None] * totals[None, :]).mean(axis=1)
        self.assertTrue(np.all(np.abs(re - np.exp(-thetas ** 1.5)) <= 4.0 / math.sqrt(n)))

    def test_joint_law_piecewise_alpha(self):
        # 两段不相交集合在分段常数 α 下的联合特征函数
        alpha = IndexFunction.piecewise_constant([0.5], [1.2, 1.8])
        level, n = 10, 10000
        halves = [IntervalSet([[0.0, 0.5]]), IntervalSet([[0.5, 1.0]])]
        k_lo, k_hi = aligned_cells((0.0, 1.0), level)
        weights = [set_weights(A, level, k_lo, k_hi - k_lo) for A in halves]
        samples = np.empty((n, 2))
        for start, draws in iter_increment_chunks(alpha, level, (0.0, 1.0), RngStream.from_seed(4242), n):
            for j, w in enumerate(weights):
                samples[start:start + draws.shape[0], j] = weighted_sum(draws, w)

        axis = np.linspace(-2.0, 2.0, 5)
        grid = np.array([[t1, t2] for t1 in axis for t2 in axis])
        functions = (RealFunction.indicator([[0.0, 0.5]]), RealFunction.indicator([[0.5, 1.0]]))
        exact = cf_on_grid(CfSpec(functions, (0.0, 0.0), alpha), grid, QuadratureSpec())
        estimate = ecf(samples, grid)
        self.assertAlmostEqual(estimate.band, 4.0 / math.sqrt(n))
        self.assertLessEqual(estimate.sup_deviation(exact), estimate.band)

    def test_save_and_load(self):
        increments = simulate_increments(self.sinusoidal, 4, (-0.5, 0.5), self.stream)
        with tempfile.TemporaryDirectory() as tmp:
            manager = FileManager(tmp)
            path = save_increments(increments, "increments.csv", manager)
            loaded = load_increments(path, self.stream, self.sinusoidal.a, self.sinusoidal.b, manager)
        self.assertEqual(loaded.level, 4)
        self.assertEqual(loaded.first_cell, -8)
        np.testing.assert_array_equal(loaded.draws, increments.draws)
        np.testing.assert_array_equal(loaded.alphas_used, increments.alphas_used)


class TestSampleIntegrals(unittest.TestCase):
    """样本积分测试类"""

    @classmethod
    def setUpClass(cls):
        cls.quad = QuadratureSpec()
        cls.alpha = IndexFunction.sinusoidal(1.5, 0.3, 2.0, 1.2, 1.8)
        cls.increments = simulate_increments(cls.alpha, 6, (0.0, 1.0), RngStream.from_seed(99))

    def test_indicator_is_plain_sum(self):
        f = RealFunction.indicator([[0.0, 1.0]])
        self.assertEqual(integrate_sample(f, self.increments, self.quad), math.fsum(self.increments.draws))

    def test_zero_function(self):
        self.assertEqual(integrate_sample(RealFunction.zero(), self.increments), 0.0)

    def test_linearity(self):
        f1 = RealFunction.indicator([[0.0, 0.5]])
        f2 = RealFunction.power(0.25, 0.5, 0.5)
        combined = RealFunction.linear_combination([2.0, -3.0], [f1, f2])
        left = integrate_sample(combined, self.increments, self.quad)
        right = (2.0 * integrate_sample(f1, self.increments, self.quad)
                 - 3.0 * integrate_sample(f2, self.increments, self.quad))
        self.assertAlmostEqual(left, right, delta=1e-12 * max(1.0, abs(right)))

    def test_singular_cell_average(self):
        f = RealFunction.power(0.0, -0.3, 1.0)
        weights = function_weights(f, 3, 0, 8, self.quad)
        width = 1.0 / 8.0
        self.assertAlmostEqual(weights[0], width ** -0.3 / 0.7, places=8)
        self.assertAlmostEqual(weights[1], (1.5 * width) ** -0.3, places=12)

    def test_measure_of_domain(self):
        self.assertEqual(measure_of_set(IntervalSet([[0.0, 1.0]]), self.increments),
                         math.fsum(self.increments.draws))

    def test_measure_of_empty_set(self):
        self.assertEqual(measure_of_set(IntervalSet(), self.increments), 0.0)

    def test_additivity(self):
        a1, a2 = [[0.0, 0.25], [0.5, 0.625]], [[0.25, 0.5], [0.75, 1.0]]
        union = measure_of_set(a1 + a2, self.increments)
        parts = measure_of_set(a1, self.increments) + measure_of_set(a2, self.increments)
        self.assertAlmostEqual(union, parts, delta=1e-12 * max(1.0, abs(union)))

    def test_partial_cell_weight(self):
        increments = simulate_increments(self.alpha, 1, (0.0, 1.0), RngStream.from_seed(5))
        value = measure_of_set([[0.0, 0.25]], increments)
        self.assertAlmostEqual(value, 0.5 * increments.draws[0], places=15)

    def test_coverage_deficit(self):
        constant = simulate_increments(IndexFunction.constant(1.5), 4, (0.0, 1.0), RngStream.from_seed(1))
        f = RealFunction.indicator([[0.0, 2.0]])
        self.assertAlmostEqual(coverage_deficit(f, constant, self.quad), 1.0, places=9)
        self.assertEqual(coverage_deficit(RealFunction.indicator([[0.0, 1.0]]), constant, self.quad), 0.0)


if __name__ == "__main__":
    unittest.main()
