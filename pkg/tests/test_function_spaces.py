#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
函数空间模块测试

测试索引函数、积分引擎与范数：
- ∫|f|^{α(x)} 的闭式例子
- ‖·‖_p 与 Luxemburg 范数
- 齐次性、常指数退化、单位球嵌入
- 对数连续性诊断与指数泛函的连续性
"""

import math
import os
import sys
import unittest

import numpy as np

# 添加项目根目录到Python路径
sys.path.append(os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

from modules.spaces import (
    IndexFunction,
    IntervalSet,
    QuadratureSpec,
    RealFunction,
    integrate_ab_power,
    integrate_alpha_power,
    integrate_alpha_powers,
    norm_p,
    luxemburg_norm,
    log_continuity_diagnostic,
    exponent_continuity_gap,
)
from modules.utils.exceptions import DomainError, ValidationError


class TestIndexFunction(unittest.TestCase):
    """索引函数测试类"""

    def test_constant(self):
        alpha = IndexFunction.constant(1.5)
        self.assertTrue(alpha.is_constant)
        self.assertEqual(alpha.constant_value, 1.5)
        self.assertEqual(alpha(0.3), 1.5)
        self.assertEqual((alpha.a, alpha.b), (1.5, 1.5))

    def test_bounds_rejected(self):
        with self.assertRaises(ValidationError):
            IndexFunction.constant(2.5)
        with self.assertRaises(ValidationError):
            IndexFunction.sinusoidal(1.5, 0.3, 2.0, 1.3, 1.7)

    def test_sinusoidal_values(self):
        alpha = IndexFunction.sinusoidal(1.5, 0.3, 2.0, 1.2, 1.8)
        self.assertAlmostEqual(alpha(0.5), 1.8, places=12)
        self.assertAlmostEqual(alpha(1.5), 1.2, places=12)

    def test_affine_clamped(self):
        alpha = IndexFunction.affine_clamped(1.2, 0.3, 1.2, 1.5)
        np.testing.assert_allclose(alpha(np.array([-1.0, 0.5, 2.0])), [1.2, 1.35, 1.5])

    def test_dyadic_left_endpoint(self):
        alpha = IndexFunction.affine_clamped(1.0, 0.5, 1.0, 1.5)
        dyadic = alpha.dyadic(2)
        self.assertAlmostEqual(dyadic(0.3), alpha(0.25), places=14)
        self.assertAlmostEqual(dyadic(0.75), alpha(0.75), places=14)

    def test_shifted(self):
        alpha = IndexFunction.sinusoidal(1.5, 0.3, 2.0, 1.2, 1.8)
        beta = alpha.shifted(0.25)
        self.assertAlmostEqual(beta(0.1), alpha(0.35), places=14)

    def test_from_config(self):
        config = {"family": "sinusoidal", "params": {"mid": 1.5, "amp": 0.3, "period": 2.0}, "a": 1.2, "b": 1.8}
        alpha = IndexFunction.from_config(config)
        self.assertEqual(alpha.family, 'sinusoidal')
        table = IndexFunction.from_config({"family": "tabulated-linear-interp",
                                           "xs": [0.0, 1.0], "alphas": [1.2, 1.6]})
        self.assertAlmostEqual(table(0.5), 1.4, places=12)

    def test_non_constant_requires_bounds(self):
        with self.assertRaises(ValidationError):
            IndexFunction.from_config({"family": "sinusoidal", "params": {"mid": 1.5, "amp": 0.3, "period": 2.0}})


class TestIntegrals(unittest.TestCase):
    """积分测试类"""

    @classmethod
    def setUpClass(cls):
        cls.quad = QuadratureSpec()

    def test_unit_indicator(self):
        f = RealFunction.indicator([[0.0, 1.0]])
        for value in (0.7, 1.3, 2.0):
            self.assertAlmostEqual(integrate_alpha_power(f, IndexFunction.constant(value), self.quad), 1.0, places=9)

    def test_length_two(self):
        f = RealFunction.indicator([[0.0, 2.0]])
        self.assertAlmostEqual(integrate_alpha_power(f, IndexFunction.constant(1.5), self.quad), 2.0, places=9)

    def test_piecewise_index(self):
        f = RealFunction.indicator([[0.0, 2.0]], 2.0)
        alpha = IndexFunction.piecewise_constant([1.0], [1.0, 2.0])
        self.assertAlmostEqual(integrate_alpha_power(f, alpha, self.quad), 6.0, places=8)

    def test_exponential_closed_form(self):
        # ∫_0^∞ e^{−px}dx = 1/p
        f = RealFunction.exponential(0.0, 1.0)
        value = integrate_alpha_power(f, IndexFunction.constant(1.5), self.quad)
        self.assertAlmostEqual(value, 1.0 / 1.5, places=8)

    def test_power_singularity(self):
        # ∫_0^1 x^{−0.3·1.5}dx = 1/(1 − 0.45)
        f = RealFunction.power(0.0, -0.3, 1.0)
        value = integrate_alpha_power(f, IndexFunction.constant(1.5), self.quad)
        self.assertAlmostEqual(value, 1.0 / 0.55, delta=1e-7)

    def test_non_integrable_singularity(self):
        f = RealFunction.power(0.0, -0.7, 1.0)
        with self.assertRaises(DomainError):
            integrate_alpha_power(f, IndexFunction.constant(1.5), self.quad)

    def test_zero_function(self):
        self.assertEqual(integrate_alpha_power(RealFunction.zero(), IndexFunction.constant(1.2)), 0.0)

    def test_shared_mesh_vector(self):
        functions = [RealFunction.indicator([[0.0, 1.0]]), RealFunction.zero(),
                     RealFunction.indicator([[0.0, 2.0]], 2.0)]
        values = integrate_alpha_powers(functions, IndexFunction.constant(1.0), self.quad)
        np.testing.assert_allclose(values, [1.0, 0.0, 4.0], rtol=1e-9)

    def test_ab_power(self):
        # max(|1/2|^1, |1/2|^2) = 1/2
        f = RealFunction.indicator([[0.0, 1.0]], 0.5)
        self.assertAlmostEqual(integrate_ab_power(f, 1.0, 2.0, self.quad), 0.5, places=9)


class TestNorms(unittest.TestCase):
    """范数测试类"""

    @classmethod
    def setUpClass(cls):
        cls.quad = QuadratureSpec()
        cls.sinusoidal = IndexFunction.sinusoidal(1.5, 0.3, 2.0, 1.2, 1.8)

    def test_norm_p_examples(self):
        self.assertAlmostEqual(norm_p(RealFunction.indicator([[0.0, 1.0]]), 2.0, self.quad), 1.0, places=9)
        self.assertAlmostEqual(norm_p(RealFunction.indicator([[0.0, 4.0]]), 2.0, self.quad), 2.0, places=9)
        self.assertAlmostEqual(norm_p(RealFunction.indicator([[0.0, 1.0]], 3.0), 1.0, self.quad), 3.0, places=9)

    def test_norm_p_rejects_nonpositive(self):
        with self.assertRaises(ValidationError):
            norm_p(RealFunction.indicator([[0.0, 1.0]]), 0.0, self.quad)

    def test_luxemburg_examples(self):
        f = RealFunction.indicator([[0.0, 1.0]])
        self.assertAlmostEqual(luxemburg_norm(f, self.sinusoidal, self.quad), 1.0, delta=1e-8)
        g = RealFunction.indicator([[0.0, 2.0]])
        self.assertAlmostEqual(luxemburg_norm(g, IndexFunction.constant(1.0), self.quad), 2.0, delta=2e-8)
        h = RealFunction.indicator([[0.0, 2.0]], 2.0)
        alpha = IndexFunction.piecewise_constant([1.0], [1.0, 2.0])
        expected = 1.0 + math.sqrt(5.0)
        self.assertLess(abs(luxemburg_norm(h, alpha, self.quad) - expected) / expected, 1e-8)

    def test_luxemburg_zero(self):
        self.assertEqual(luxemburg_norm(RealFunction.zero(), self.sinusoidal), 0.0)

    def test_homogeneity(self):
        f = RealFunction.indicator([[0.0, 0.7], [1.1, 2.5]], 1.3)
        base = luxemburg_norm(f, self.sinusoidal, self.quad)
        for c in (0.25, 3.0, -2.0):
            scaled = luxemburg_norm(f.scaled(c), self.sinusoidal, self.quad)
            self.assertLess(abs(scaled - abs(c) * base) / (abs(c) * base), 1e-8)

    def test_homogeneity_randomized(self):
        rng = np.random.default_rng(1618)
        for case in range(20):
            a = float(rng.uniform(0.8, 1.9))
            b = float(rng.uniform(a, 2.0))
            if case % 4 == 0:
                alpha = IndexFunction.constant(a)
            elif case % 4 == 1:
                alpha = IndexFunction.affine_clamped(a, float(rng.uniform(-1.0, 1.0)), a, b)
            else:
                alpha = IndexFunction.sinusoidal(0.5 * (a + b), 0.5 * (b - a), float(rng.uniform(0.5, 3.0)), a, b)
            if case % 2 == 0:
                f = RealFunction.exponential(float(rng.uniform(-1.0, 1.0)), float(rng.uniform(1.0, 3.0)),
                                             float(rng.uniform(0.2, 3.0)))
            else:
                lo = float(rng.uniform(-1.0, 1.0))
                mid = lo + float(rng.uniform(0.1, 1.0))
                hi = mid + float(rng.uniform(0.1, 1.0))
                v1, v2 = rng.uniform(0.2, 3.0, size=2)
                f = RealFunction.linear_combination(
                    [1.0, 1.0], [RealFunction.indicator([[lo, mid]], v1), RealFunction.indicator([[mid, hi]], v2)])
            c = float(rng.uniform(0.05, 20.0)) * (1.0 if rng.uniform() < 0.5 else -1.0)
            with self.subTest(case=case, family=alpha.family, c=c):
                base = luxemburg_norm(f, alpha, self.quad)
                scaled = luxemburg_norm(f.scaled(c), alpha, self.quad)
                self.assertLess(abs(scaled - abs(c) * base) / (abs(c) * base), 1e-8)
                if alpha.is_constant:
                    expected = norm_p(f, a, self.quad)
                    self.assertLess(abs(base - expected) / expected, 1e-8)

    def test_constant_reduction(self):
        f = RealFunction.exponential(0.0, 1.0, 2.0)
        for p in (0.8, 1.3, 2.0):
            expected = norm_p(f, p, self.quad)
            value = luxemburg_norm(f, IndexFunction.constant(p), self.quad)
            self.assertLess(abs(value - expected) / expected, 1e-8)

    def test_unit_ball_embedding(self):
        f = RealFunction.indicator([[0.0, 1.5]], 0.6)
        self.assertLessEqual(integrate_ab_power(f, self.sinusoidal.a, self.sinusoidal.b, self.quad), 1.0)
        self.assertLessEqual(luxemburg_norm(f, self.sinusoidal, self.quad), 1.0 + 1e-8)


class TestContinuityDiagnostics(unittest.TestCase):
    """对数连续性与指数泛函连续性测试类"""

    def test_constant_alpha(self):
        report = log_continuity_diagnostic(IndexFunction.constant(1.4), (0.0, 1.0), [1e-1, 1e-2, 1e-3])
        self.assertEqual(report.m_values, [0.0, 0.0, 0.0])
        self.assertTrue(report.plausibly_satisfied)

    def test_affine_closed_form(self):
        alpha = IndexFunction.affine_clamped(1.2, 0.3, 1.2, 1.5)
        report = log_continuity_diagnostic(alpha, (0.0, 1.0), [1e-3])
        self.assertAlmostEqual(report.m_values[0], 0.3 * 1e-3 * abs(math.log(1e-3)), places=12)

    def test_slow_decay_is_only_a_note(self):
        # m(r) 严格递减但末值仍大于首值的一半
        alpha = IndexFunction.affine_clamped(1.2, 0.3, 1.2, 1.5)
        report = log_continuity_diagnostic(alpha, (0.0, 0.5), [1e-2, 0.9e-2, 0.8e-2])
        self.assertTrue(report.plausibly_satisfied)
        self.assertGreater(report.m_values[-1], 0.5 * report.m_values[0])
        self.assertTrue(any("衰减较慢" in note for note in report.notes))

    def test_increasing_m_fails(self):
        alpha = IndexFunction.piecewise_constant([0.25], [1.2, 1.5])
        report = log_continuity_diagnostic(alpha, (0.0, 0.5), [1e-1, 1e-2, 1e-3])
        self.assertFalse(report.plausibly_satisfied)

    def test_rejects_bad_r(self):
        alpha = IndexFunction.constant(1.4)
        with self.assertRaises(ValidationError):
            log_continuity_diagnostic(alpha, (0.0, 1.0), [])
        with self.assertRaises(ValidationError):
            log_continuity_diagnostic(alpha, (0.0, 1.0), [1e-2, 1e-1])

    def test_exponent_continuity_gap(self):
        # g_r = 1_[0, 1+r] → 1_[0,1]，指数差 = r
        alpha = IndexFunction.sinusoidal(1.5, 0.3, 2.0, 1.2, 1.8)
        k = RealFunction.indicator([[0.0, 1.0]])
        family = [(r, RealFunction.indicator([[0.0, 1.0 + r]])) for r in (1e-1, 1e-2, 1e-3)]
        rows = exponent_continuity_gap(family, k, alpha, QuadratureSpec())
        gaps = [gap for _, gap, _ in rows]
        distances = [distance for _, _, distance in rows]
        self.assertTrue(all(g2 < g1 for g1, g2 in zip(gaps, gaps[1:])))
        self.assertLess(gaps[-1], 1e-2)
        np.testing.assert_allclose(distances, [1e-1, 1e-2, 1e-3], rtol=1e-7)


class TestIntervalSet(unittest.TestCase):
    """区间集合测试类"""

    def test_merge_and_measure(self):
        s = IntervalSet([[1.0, 2.0], [0.0, 0.5], [0.5, 0.75]])
        self.assertEqual(s.intervals, ((0.0, 0.75), (1.0, 2.0)))
        self.assertAlmostEqual(s.measure, 1.75)

    def test_unbounded_rejected(self):
        with self.assertRaises(ValidationError):
            IntervalSet([[0.0, math.inf]])


if __name__ == "__main__":
    unittest.main()
