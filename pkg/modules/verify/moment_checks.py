#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
尾部与矩界校验模块

职责：
- 尾部常数 c₁ = max_{q∈{a,b}} 2^{q+1}/(q+1)（来自 ½∫_{−2}^{2}|θ|^q dθ）
- 矩常数 c₂ = c₁·a/(a − p)（来自 1 + p∫_1^∞ λ^{p−1−a}dλ）
- 两个常数都用 scipy.integrate.quad 独立重算，不一致时拒绝使用
- P(|∫g dM_α| ≥ λ) ≤ c₁∫|g/λ|^{α} 与 E|∫g dM_α|^p ≤ c₂‖g‖_α^p 的蒙特卡洛校验
- 模拟分布是 ∫g_n dM_{α_n}（g_n 为单元权重的阶梯函数），界按同一对 (g_n, α_n) 计算
"""

import math
from typing import Optional, Sequence
import logging

import numpy as np
from scipy import integrate
from scipy.special import gamma

from config.settings import settings
from modules.spaces import IndexFunction, QuadratureSpec, RealFunction, integrate_alpha_power, luxemburg_norm
from modules.stable import RngStream
from modules.measure import aligned_cells, function_weights, iter_increment_chunks, weighted_sum
from modules.verify.report import VerifyReport
from modules.utils.exceptions import NumericError, ValidationError

logger = logging.getLogger(__name__)

# 常数重算允许的差异
_REDERIVATION_TOL = 1e-8


def _tail_constant_closed(q: float) -> float:
    return 2.0 ** (q + 1.0) / (q + 1.0)


def _tail_constant_numeric(q: float) -> float:
    # ½∫_{−2}^{2}|θ|^q dθ = ∫_0^2 θ^q dθ，用代数权重处理 θ = 0
    value, _ = integrate.quad(lambda theta: 1.0, 0.0, 2.0, weight='alg', wvar=(q, 0.0))
    return value


def derive_tail_constant(p: float, b: Optional[float] = None) -> float:
    """
    尾部常数 c₁

    Args:
        p: 指数下界 a（或单一指数）
        b: 指数上界，缺省时等于 p

    Returns:
        float: max_{q∈{a,b}} 2^{q+1}/(q+1)
    """
    exponents = [float(p)] if b is None else [float(p), float(b)]
    if any(not (0.0 < q <= 2.0) for q in exponents):
        raise ValidationError(f"指数必须位于 (0, 2]: {exponents}", inequality="0 < a ≤ b ≤ 2")
    closed = max(_tail_constant_closed(q) for q in exponents)
    numeric = max(_tail_constant_numeric(q) for q in exponents)
    if abs(closed - numeric) > _REDERIVATION_TOL:
        logger.error(f"尾部常数重算不一致: 闭式 {closed}, 数值 {numeric}")
        raise NumericError("尾部常数的闭式与数值重算不一致", estimates=(closed, numeric))
    return closed


def derive_moment_constant(p: float, a: float, b: float) -> float:
    """
    矩常数 c₂ = c₁·a/(a − p)

    Args:
        p: 矩阶 0 < p < a
        a, b: 指数界

    Returns:
        float: c₂
    """
    if not (0.0 < p < a):
        raise ValidationError(f"矩阶 p={p} 必须满足 0 < p < a={a}", inequality="0 < p < inf α(x) = a")
    c1 = derive_tail_constant(a, b)
    closed = c1 * a / (a - p)
    # ∫_1^∞ λ^{p−1−a}dλ，换元 s = 1/λ 得 ∫_0^1 s^{a−p−1}ds
    tail, _ = integrate.quad(lambda s: 1.0, 0.0, 1.0, weight='alg', wvar=(a - p - 1.0, 0.0))
    numeric = c1 * (1.0 + p * tail)
    if abs(closed - numeric) > _REDERIVATION_TOL * max(1.0, closed):
        logger.error(f"矩常数重算不一致: 闭式 {closed}, 数值 {numeric}")
        raise NumericError("矩常数的闭式与数值重算不一致", estimates=(closed, numeric))
    return closed


def stable_absolute_moment(p: float, alpha: float, scale: float = 1.0) -> float:
    """
    对称稳定变量的绝对矩 E|X|^p（特征函数 exp(−σ^α|θ|^α)，p < α）

    σ^p·2^p·Γ((1+p)/2)·Γ(1 − p/α) / (Γ(1 − p/2)·√π)
    """
    if not (0.0 < p < alpha):
        raise ValidationError(f"矩阶 p={p} 必须满足 0 < p < α={alpha}", inequality="0 < p < α")
    return (scale ** p * 2.0 ** p * gamma((1.0 + p) / 2.0) * gamma(1.0 - p / alpha)
            / (gamma(1.0 - p / 2.0) * math.sqrt(math.pi)))


def _step_function(weights: np.ndarray, level: int, first_cell: int) -> RealFunction:
    """单元权重的阶梯函数 g_n"""
    width = 2.0 ** -level
    lo = first_cell * width
    hi = (first_cell + weights.size) * width
    edges = np.arange(first_cell, first_cell + weights.size + 1, dtype=float) * width

    def evaluate(x: np.ndarray) -> np.ndarray:
        index = np.clip(np.floor(np.asarray(x) / width).astype(np.int64) - first_cell, 0, weights.size - 1)
        return weights[index]

    return RealFunction.from_callable(evaluate, lo, hi, edges.tolist(), name="g_n")


def _simulate_integrals(g: RealFunction, alpha: IndexFunction, level: int, n_paths: int, stream: RngStream,
                        quad: Optional[QuadratureSpec]):
    if not g.layout.is_bounded:
        raise ValidationError(f"函数 {g.name} 必须紧支撑", inequality="supp g bounded")
    if n_paths < 100:
        raise ValidationError(f"实现次数过少: {n_paths}", inequality="N ≥ 100")
    domain = g.support
    k_lo, k_hi = aligned_cells(domain, level)
    weights = function_weights(g, level, k_lo, k_hi - k_lo, quad)
    samples = np.empty(n_paths)
    for start, draws in iter_increment_chunks(alpha, level, domain, stream, n_paths):
        samples[start:start + draws.shape[0]] = weighted_sum(draws, weights)
    return samples, _step_function(weights, level, k_lo)


def tail_bound_check(g: RealFunction, alpha: IndexFunction, lambda_grid: Sequence[float], level: int,
                     n_paths: int, stream: RngStream, quad: Optional[QuadratureSpec] = None,
                     constant_scale: float = 1.0) -> VerifyReport:
    """
    尾部界 P(|∫g dM_α| ≥ λ) ≤ c₁∫|g(x)/λ|^{α(x)}dx

    Args:
        g: 紧支撑函数
        alpha: 索引函数
        lambda_grid: 正的 λ 值
        level: 模拟层级
        n_paths: 实现次数
        constant_scale: c₁ 的乘数（小于1时作为反例对照）

    Returns:
        VerifyReport: 各 λ 的经验频率、界与3倍二项标准误
    """
    lambdas = np.asarray(lambda_grid, dtype=float).reshape(-1)
    if lambdas.size == 0 or np.any(lambdas <= 0):
        raise ValidationError("λ 必须为正", inequality="λ > 0")
    c1 = derive_tail_constant(alpha.a, alpha.b) * float(constant_scale)
    simulated = alpha.dyadic(level)

    if g.is_zero:
        empirical = np.zeros(lambdas.size)
        bounds = np.zeros(lambdas.size)
        errors = np.zeros(lambdas.size)
    else:
        samples, g_n = _simulate_integrals(g, alpha, level, n_paths, stream, quad)
        empirical = np.asarray([np.mean(np.abs(samples) >= lam) for lam in lambdas])
        bounds = np.asarray([c1 * integrate_alpha_power(g_n.scaled(1.0 / lam), simulated, quad) for lam in lambdas])
        errors = np.sqrt(empirical * (1.0 - empirical) / n_paths)
    passed = bool(np.all(empirical <= bounds + 3.0 * errors))
    return VerifyReport(
        check='tail_bound',
        statistics={'lambdas': lambdas, 'empirical': empirical, 'standard_errors': errors},
        thresholds={'bounds': bounds, 'c1': c1},
        passed=passed,
        seed=stream.seed,
        provenance={'level': level, 'n_paths': n_paths, 'alpha': alpha.to_config(),
                    'constant_scale': constant_scale, 'stream': stream.to_dict()},
    )


def _bootstrap_key(stream: RngStream) -> int:
    return stream.key[0] | (stream.key[1] << 32) | (stream.nonce[0] << 64) | (stream.nonce[1] << 96)


def moment_bound_check(g: RealFunction, alpha: IndexFunction, p: float, level: int, n_paths: int,
                       stream: RngStream, quad: Optional[QuadratureSpec] = None, constant_scale: float = 1.0,
                       resamples: Optional[int] = None) -> VerifyReport:
    """
    矩界 E|∫g dM_α|^p ≤ c₂‖g‖_α^p

    Args:
        g: 紧支撑函数
        alpha: 索引函数
        p: 矩阶 0 < p < a
        level: 模拟层级
        n_paths: 实现次数
        constant_scale: c₂ 的乘数
        resamples: bootstrap 次数，默认取配置

    Returns:
        VerifyReport: 经验矩、界与3倍bootstrap标准误
    """
    c2 = derive_moment_constant(p, alpha.a, alpha.b) * float(constant_scale)
    resamples = settings.BOOTSTRAP_RESAMPLES if resamples is None else int(resamples)
    statistics = {'p': p}
    if g.is_zero:
        empirical, bound, error = 0.0, 0.0, 0.0
    else:
        samples, g_n = _simulate_integrals(g, alpha, level, n_paths, stream, quad)
        powers = np.abs(samples) ** p
        empirical = float(np.mean(powers))
        rng = np.random.Generator(np.random.Philox(key=_bootstrap_key(stream)))
        means = np.asarray([np.mean(powers[rng.integers(0, n_paths, n_paths)]) for _ in range(resamples)])
        error = float(np.std(means, ddof=1)) if resamples > 1 else 0.0
        norm = luxemburg_norm(g_n, alpha.dyadic(level), quad)
        bound = c2 * norm ** p
        statistics['luxemburg_norm'] = norm
        if alpha.is_constant:
            frozen = alpha.constant_value
            scale = integrate_alpha_power(g_n, alpha, quad) ** (1.0 / frozen)
            statistics['reference_moment'] = stable_absolute_moment(p, frozen, scale)
    statistics.update({'empirical': empirical, 'bootstrap_se': error})
    return VerifyReport(
        check='moment_bound',
        statistics=statistics,
        thresholds={'bound': bound, 'c2': c2},
        passed=empirical <= bound + 3.0 * error,
        seed=stream.seed,
        provenance={'level': level, 'n_paths': n_paths, 'alpha': alpha.to_config(), 'resamples': resamples,
                    'constant_scale': constant_scale, 'stream': stream.to_dict()},
    )
